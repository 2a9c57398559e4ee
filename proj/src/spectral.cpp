// SPDX-License-Identifier: Apache-2.0
#include "msr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "msr/dense.hpp"
#include "msr/errors.hpp"

namespace msr {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fraction_string(int j, int n) {
  return std::to_string(j) + "/" + std::to_string(n);
}

// Per-axis table of f_k values on the n-point grid with exact zeroing.
std::vector<double> sinc_table(int k, int n) {
  std::vector<double> t(n);
  for (int j = 0; j < n; ++j)
    t[j] = grid_frequency_is_zero(k, j, n)
               ? 0.0
               : periodic_sinc(k, kTwoPi * static_cast<double>(j) / n);
  return t;
}

void check_dims(int d) {
  if (d != 1 && d != 2) throw std::invalid_argument("dims must be 1 or 2");
}

}  // namespace

double periodic_sinc(int k, double omega) {
  if (k < 1) throw std::invalid_argument("box size must be >= 1");
  if (omega < 0.0 || omega > kTwoPi)
    throw std::invalid_argument("omega outside [0, 2*pi]");
  if (omega == 0.0 || omega == kTwoPi) return 1.0;
  return std::sin(0.5 * k * omega) / (k * std::sin(0.5 * omega));
}

bool grid_frequency_is_zero(int k, int j, int n) {
  // 2*pi*j/n lies in Z_k = {2*pi*m/k : 1 <= m <= k-1}  iff  j*k = 0 (mod n)
  // with 0 < j < n (so m = j*k/n stays strictly inside (0, k)).
  if (j <= 0 || j >= n) return false;
  return (static_cast<std::int64_t>(j) * k) % n == 0;
}

bool pairwise_coprime(const std::vector<int>& scales) {
  for (std::size_t i = 0; i < scales.size(); ++i)
    for (std::size_t j = i + 1; j < scales.size(); ++j)
      if (std::gcd(scales[i], scales[j]) != 1) return false;
  return true;
}

std::vector<std::complex<double>> box_dft(int k, int n) {
  if (k > n) throw std::invalid_argument("box_dft requires k <= n");
  std::vector<std::complex<double>> out(n);
  const std::vector<double> f = sinc_table(k, n);
  for (int j = 0; j < n; ++j) {
    if (f[j] == 0.0) {
      out[j] = 0.0;
      continue;
    }
    const double omega = kTwoPi * static_cast<double>(j) / n;
    const double phase = -0.5 * (k - 1) * omega;
    out[j] = std::polar(1.0, phase) * f[j];
  }
  return out;
}

std::int64_t near_zero_count(int k, int n, int d, double epsilon) {
  check_dims(d);
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");
  std::vector<double> mag(n);
  const std::vector<double> f = sinc_table(k, n);
  for (int j = 0; j < n; ++j) mag[j] = std::abs(f[j]);
  if (d == 1)
    return std::count_if(mag.begin(), mag.end(),
                         [&](double m) { return m <= epsilon; });
  std::int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (int j0 = 0; j0 < n; ++j0)
    for (int j1 = 0; j1 < n; ++j1)
      if (mag[j0] * mag[j1] <= epsilon) ++count;
  return count;
}

double SpectralProfile::max_value() const {
  return *std::max_element(sigma_values.begin(), sigma_values.end());
}

double SpectralProfile::min_value() const {
  return *std::min_element(sigma_values.begin(), sigma_values.end());
}

std::int64_t SpectralProfile::argmin() const {
  return std::min_element(sigma_values.begin(), sigma_values.end()) -
         sigma_values.begin();
}

SpectralProfile stacked_profile(const std::vector<int>& scales, int n, int d) {
  check_dims(d);
  if (scales.empty()) throw std::invalid_argument("at least one scale required");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const std::int64_t total = (d == 1) ? n : static_cast<std::int64_t>(n) * n;
  if (total > (std::int64_t{1} << 28))
    throw std::invalid_argument("profile grid too large");

  SpectralProfile p;
  p.dims = d;
  p.n = n;
  p.scales = scales;
  p.sigma_values.resize(total);

  const std::size_t s = scales.size();
  std::vector<std::vector<double>> tables(s);
  for (std::size_t j = 0; j < s; ++j) tables[j] = sinc_table(scales[j], n);

  if (d == 1) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < s; ++j) acc += tables[j][i] * tables[j][i];
      p.sigma_values[i] = std::sqrt(acc);
    }
  } else {
#pragma omp parallel for schedule(static)
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1) {
        double acc = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
          const double prod = tables[j][i0] * tables[j][i1];
          acc += prod * prod;
        }
        p.sigma_values[static_cast<std::int64_t>(i0) * n + i1] = std::sqrt(acc);
      }
  }
  return p;
}

double condition_number(const SpectralProfile& profile) {
  const double mn = profile.min_value();
  if (mn == 0.0) return std::numeric_limits<double>::infinity();
  return profile.max_value() / mn;
}

ErrorPrediction predicted_mse(const SpectralProfile& profile, double sigma) {
  const std::int64_t total = static_cast<std::int64_t>(profile.sigma_values.size());
  double sum = 0.0;
  for (std::int64_t i = 0; i < total; ++i) {
    const double sv = profile.sigma_values[i];
    if (sv == 0.0) {
      const int n = profile.n;
      const int j0 = (profile.dims == 1) ? static_cast<int>(i) : static_cast<int>(i / n);
      const int j1 = (profile.dims == 1) ? 0 : static_cast<int>(i % n);
      throw NonInvertibleError(
          "stacked map is non-invertible: zero singular value at frequency index " +
              std::to_string(j0) + (profile.dims == 2 ? "," + std::to_string(j1) : "") +
              " (omega/2pi = " + fraction_string(j0, n) + ")",
          {j0, j1}, fraction_string(j0, n));
    }
    sum += 1.0 / (sv * sv);
  }
  ErrorPrediction e;
  e.trace_normalized = sum / static_cast<double>(total);
  e.rmse_factor = std::sqrt(e.trace_normalized);
  const int kmin = *std::min_element(profile.scales.begin(), profile.scales.end());
  double kd = 1.0;
  for (int i = 0; i < profile.dims; ++i) kd *= kmin;
  e.lower_bound = kd / static_cast<double>(profile.scales.size());
  e.asymptotic_value = pairwise_coprime(profile.scales)
                           ? asymptotic_trace(profile.scales, profile.dims)
                           : std::numeric_limits<double>::quiet_NaN();
  e.expected_mse = sigma * sigma * e.trace_normalized;
  return e;
}

double asymptotic_trace(const std::vector<int>& scales, int d, int grid) {
  check_dims(d);
  if (scales.empty()) throw std::invalid_argument("at least one scale required");
  if (!pairwise_coprime(scales))
    throw std::invalid_argument(
        "asymptotic trace requires pairwise coprime scales (integrand singular)");

  std::int64_t lcm = 1;
  for (int k : scales) lcm = std::lcm(lcm, static_cast<std::int64_t>(k));
  // Midpoint nodes (i + 1/2) * 2*pi/G with G a multiple of every k never
  // coincide with a sinc zero, and doubling G preserves that.
  std::int64_t g = lcm;
  const std::int64_t gmin = std::max<std::int64_t>(grid, d == 1 ? 256 : 64);
  while (g < gmin) g *= 2;

  auto midpoint_sum = [&](std::int64_t G) {
    const std::size_t s = scales.size();
    std::vector<std::vector<double>> tables(s, std::vector<double>(G));
    for (std::size_t j = 0; j < s; ++j)
      for (std::int64_t i = 0; i < G; ++i)
        tables[j][i] = periodic_sinc(scales[j], kTwoPi * (i + 0.5) / G);
    double sum = 0.0;
    if (d == 1) {
#pragma omp parallel for schedule(static) reduction(+ : sum)
      for (std::int64_t i = 0; i < G; ++i) {
        double f2 = 0.0;
        for (std::size_t j = 0; j < s; ++j) f2 += tables[j][i] * tables[j][i];
        sum += 1.0 / f2;
      }
      return sum / static_cast<double>(G);
    }
#pragma omp parallel for schedule(static) reduction(+ : sum)
    for (std::int64_t i0 = 0; i0 < G; ++i0)
      for (std::int64_t i1 = 0; i1 < G; ++i1) {
        double f2 = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
          const double prod = tables[j][i0] * tables[j][i1];
          f2 += prod * prod;
        }
        sum += 1.0 / f2;
      }
    return sum / (static_cast<double>(G) * static_cast<double>(G));
  };

  double prev = midpoint_sum(g);
  for (int iter = 0; iter < 16; ++iter) {
    g *= 2;
    const double cur = midpoint_sum(g);
    if (std::abs(cur - prev) <= 1e-4 * std::abs(cur)) return cur;
    prev = cur;
  }
  return prev;
}

double valid_mode_trace(const std::vector<int>& scales, int n, int d) {
  check_dims(d);
  return dense_normal_inverse_trace(scales, n, d, ConvMode::kValid,
                                    Normalization::kMean);
}

}  // namespace msr
