// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <numeric>

#include "msr/dense.hpp"
#include "msr/errors.hpp"
#include "msr/spectral.hpp"
#include "test_util.hpp"

using msr::SpectralProfile;

namespace {
constexpr double kPi = std::numbers::pi;

// Mean-normalized box as a length-n vector, for direct-DFT oracles.
std::vector<double> box_taps(int k, int n) {
  std::vector<double> b(n, 0.0);
  for (int t = 0; t < k; ++t) b[t] = 1.0 / k;
  return b;
}

}  // namespace

TEST_CASE("periodic sinc: value 1 at the endpoints for every k") {
  for (int k = 1; k <= 12; ++k) {
    CHECK(msr::periodic_sinc(k, 0.0) == 1.0);
    CHECK(msr::periodic_sinc(k, 2.0 * kPi) == 1.0);
  }
}

TEST_CASE("periodic sinc: zeros at 2*pi*m/k") {
  CHECK(msr::periodic_sinc(2, kPi) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(msr::periodic_sinc(3, 2.0 * kPi / 3.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("periodic sinc: |f| <= 1, equality only at the endpoints") {
  for (int k : {2, 3, 7, 11}) {
    for (int i = 1; i < 997; ++i) {
      const double omega = 2.0 * kPi * i / 997.0;
      CHECK(std::abs(msr::periodic_sinc(k, omega)) < 1.0);
    }
  }
}

TEST_CASE("periodic sinc rejects omega outside [0, 2*pi]") {
  CHECK_THROWS_AS(msr::periodic_sinc(3, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(msr::periodic_sinc(3, 2.0 * kPi + 0.1), std::invalid_argument);
}

TEST_CASE("f_7 matches the direct DFT magnitude of the width-7 box") {
  const int n = 1024, k = 7;
  const auto spectrum = testutil::naive_dft(box_taps(k, n));
  for (int j = 0; j < n; ++j) {
    const double omega = 2.0 * kPi * j / n;
    CHECK(std::abs(std::abs(msr::periodic_sinc(k, omega)) - std::abs(spectrum[j])) <
          1e-12);
  }
}

TEST_CASE("box_dft: n=4, k=2 magnitudes") {
  const auto d = msr::box_dft(2, 4);
  // direct 4-point DFT of (1/2, 1/2, 0, 0): magnitudes 1, 1/sqrt(2), 0, 1/sqrt(2)
  CHECK(std::abs(d[0]) == doctest::Approx(1.0));
  CHECK(std::abs(d[1]) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(d[2]) == 0.0);  // exact zero via the rational rule
  CHECK(std::abs(d[3]) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("box_dft equals the direct DFT summation") {
  for (auto [k, n] : std::vector<std::pair<int, int>>{{3, 17}, {5, 20}, {7, 21}}) {
    const auto got = msr::box_dft(k, n);
    const auto want = testutil::naive_dft(box_taps(k, n));
    for (int j = 0; j < n; ++j) CHECK(std::abs(got[j] - want[j]) < 1e-12);
  }
}

TEST_CASE("2-D DFT of the box factors into per-axis transforms") {
  const int k = 3, n = 12;
  const auto axis = msr::box_dft(k, n);
  // direct 2-D DFT of the mean-normalized k x k box on the n x n grid
  for (int j0 = 0; j0 < n; ++j0)
    for (int j1 = 0; j1 < n; ++j1) {
      std::complex<double> direct = 0.0;
      for (int t0 = 0; t0 < k; ++t0)
        for (int t1 = 0; t1 < k; ++t1) {
          const double ang = -2.0 * kPi * (j0 * t0 + j1 * t1) / n;
          direct += (1.0 / (k * k)) *
                    std::complex<double>(std::cos(ang), std::sin(ang));
        }
      CHECK(std::abs(direct - axis[j0] * axis[j1]) < 1e-12);
    }
}

TEST_CASE("box_dft: coprime k and n leaves no zeros") {
  const auto d = msr::box_dft(3, 8);
  for (const auto& v : d) CHECK(std::abs(v) > 0.0);
}

TEST_CASE("box_dft: k=n keeps only the DC term") {
  const auto d = msr::box_dft(6, 6);
  CHECK(std::abs(d[0]) == doctest::Approx(1.0));
  for (int j = 1; j < 6; ++j) CHECK(std::abs(d[j]) == 0.0);
}

TEST_CASE("box_dft rejects k > n") {
  CHECK_THROWS_AS(msr::box_dft(5, 4), std::invalid_argument);
}

TEST_CASE("zero sets are disjoint exactly for coprime sizes (rational check)") {
  for (int k1 = 2; k1 <= 30; ++k1)
    for (int k2 = k1 + 1; k2 <= 30; ++k2) {
      bool intersect = false;
      for (int m1 = 1; m1 < k1 && !intersect; ++m1)
        for (int m2 = 1; m2 < k2; ++m2)
          if (m1 * k2 == m2 * k1) {  // m1/k1 == m2/k2 exactly
            intersect = true;
            break;
          }
      CHECK(intersect == (std::gcd(k1, k2) != 1));
    }
}

TEST_CASE("near_zero_count: exact grid zeros of f_4 on n=1024") {
  CHECK(msr::near_zero_count(4, 1024, 1, 0.01) >= 3);
}

TEST_CASE("near_zero_count: epsilon >= 1 counts everything") {
  CHECK(msr::near_zero_count(5, 40, 1, 1.0) == 40);
  CHECK(msr::near_zero_count(5, 40, 2, 1.0) == 1600);
}

TEST_CASE("near_zero_count: 2-D bound d(k-1)n^{d-1} - C(d,2)(k-1)^2 n^{d-2}") {
  // k=3, n=300: zeros sit on the grid, so any positive epsilon catches the
  // two zero rows and columns: 2*2*300 - 4 = 1196.
  const std::int64_t bound = 2 * 2 * 300 - 1 * 2 * 2;
  CHECK(msr::near_zero_count(3, 300, 2, 1e-12) >= bound);
  CHECK(msr::near_zero_count(3, 300, 2, 1e-12) == 1196);
}

TEST_CASE("stacked profile: maximum sqrt(s) at omega = 0") {
  for (int n : {55, 110, 128}) {
    const SpectralProfile p = msr::stacked_profile({9, 11}, n, 1);
    CHECK(p.sigma_values[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(p.max_value() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  }
  const SpectralProfile p3 = msr::stacked_profile({2, 3, 5}, 30, 2);
  CHECK(p3.max_value() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("stacked profile: shared factor puts an exact zero on divisible grids") {
  const SpectralProfile p = msr::stacked_profile({9, 12}, 990, 1);
  CHECK(p.min_value() == 0.0);
  // omega = 2*pi/3 is grid index 330
  CHECK(p.sigma_values[330] == 0.0);
}

TEST_CASE("stacked profile: single scale k=n has exactly one nonzero value") {
  const SpectralProfile p = msr::stacked_profile({8}, 8, 1);
  int nonzero = 0;
  for (double v : p.sigma_values) nonzero += (v > 0.0) ? 1 : 0;
  CHECK(nonzero == 1);
  CHECK(p.sigma_values[0] == doctest::Approx(1.0));
}

TEST_CASE("profile positivity on a fine grid iff pairwise coprime") {
  auto min_on_fine_grid = [](const std::vector<int>& scales, int d) {
    std::int64_t lcm = 1;
    for (int k : scales) lcm = std::lcm(lcm, static_cast<std::int64_t>(k));
    const int n = static_cast<int>(4 * lcm);
    return msr::stacked_profile(scales, n, d).min_value();
  };
  CHECK(min_on_fine_grid({2, 3}, 1) > 0.0);
  CHECK(min_on_fine_grid({9, 11}, 1) > 0.0);
  CHECK(min_on_fine_grid({4, 9}, 1) > 0.0);
  CHECK(min_on_fine_grid({4, 6}, 1) == 0.0);
  CHECK(min_on_fine_grid({9, 12}, 1) == 0.0);
  CHECK(min_on_fine_grid({2, 3, 5}, 2) > 0.0);
  CHECK(min_on_fine_grid({2, 4, 5}, 2) == 0.0);
}

TEST_CASE("condition number: (9,11) finite, below the continuum bound, matches dense SVD") {
  // Continuum minimum from a fine scan (grid a multiple of 99 samples the
  // midpoint dips exactly).
  const double M = msr::stacked_profile({9, 11}, 99 * 400, 1).min_value();
  const double bound = std::sqrt(2.0) / M;
  for (int n : {110, 330, 990}) {
    const double kappa = msr::condition_number(msr::stacked_profile({9, 11}, n, 1));
    CHECK(std::isfinite(kappa));
    CHECK(kappa <= bound * (1.0 + 1e-9));
  }
  // dense SVD oracle at n = 110
  const Eigen::MatrixXd T = msr::build_forward_matrix(
      {9, 11}, 110, 1, 1, msr::ConvMode::kCyclic, msr::Normalization::kMean);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(T);
  const auto& sv = svd.singularValues();
  const double kappa_dense = sv(0) / sv(sv.size() - 1);
  const double kappa_profile =
      msr::condition_number(msr::stacked_profile({9, 11}, 110, 1));
  CHECK(kappa_profile == doctest::Approx(kappa_dense).epsilon(1e-8));
}

TEST_CASE("condition number: exact zero gives infinity") {
  const double kappa = msr::condition_number(msr::stacked_profile({9, 12}, 990, 1));
  CHECK(std::isinf(kappa));
}

TEST_CASE("condition number: non-coprime pair diverges along odd grids") {
  // gcd(4,6) = 2; odd n avoids the exact zero at omega = pi but the dip
  // deepens as the grid refines.
  std::vector<double> kappas;
  for (int n = 51; n <= 801; n += 50)
    kappas.push_back(msr::condition_number(msr::stacked_profile({4, 6}, n, 1)));
  for (double k : kappas) CHECK(std::isfinite(k));
  CHECK(kappas.back() > 10.0 * kappas.front());
  // broadly increasing: each value at least 90% of the running max
  double running = 0.0;
  for (double k : kappas) {
    CHECK(k > 0.9 * running);
    running = std::max(running, k);
  }
}

TEST_CASE("predicted_mse: identity scale k=1") {
  const auto p = msr::stacked_profile({1}, 64, 1);
  const auto e = msr::predicted_mse(p, 2.0);
  CHECK(e.trace_normalized == doctest::Approx(1.0));
  CHECK(e.rmse_factor == doctest::Approx(1.0));
  CHECK(e.expected_mse == doctest::Approx(4.0));
}

TEST_CASE("predicted_mse matches the dense trace at n=990 for (9,11)") {
  const auto p = msr::stacked_profile({9, 11}, 990, 1);
  const auto e = msr::predicted_mse(p, 1.0);
  const double dense = msr::dense_normal_inverse_trace(
      {9, 11}, 990, 1, msr::ConvMode::kCyclic, msr::Normalization::kMean);
  CHECK(std::abs(e.trace_normalized - dense) / dense < 1e-9);
}

TEST_CASE("predicted_mse equals the dense trace on small instances, 1-D and 2-D") {
  for (int n : {12, 30, 64}) {
    const auto e = msr::predicted_mse(msr::stacked_profile({2, 3}, n, 1), 1.0);
    const double dense = msr::dense_normal_inverse_trace(
        {2, 3}, n, 1, msr::ConvMode::kCyclic, msr::Normalization::kMean);
    CHECK(e.trace_normalized == doctest::Approx(dense).epsilon(1e-10));
  }
  for (int n : {12, 30}) {
    const auto e = msr::predicted_mse(msr::stacked_profile({2, 3, 5}, n, 2), 1.0);
    const double dense = msr::dense_normal_inverse_trace(
        {2, 3, 5}, n, 2, msr::ConvMode::kCyclic, msr::Normalization::kMean);
    CHECK(e.trace_normalized == doctest::Approx(dense).epsilon(1e-10));
  }
}

TEST_CASE("predicted_mse: Jensen lower bound for coprime triples in 2-D") {
  // 20 pairwise coprime triples with distinct smallest scales
  const std::vector<std::array<int, 3>> triples = {
      {2, 3, 5},  {2, 3, 7},  {2, 5, 7},  {2, 5, 9},  {2, 7, 9},
      {3, 4, 5},  {3, 4, 7},  {3, 5, 7},  {3, 5, 8},  {3, 7, 8},
      {4, 5, 7},  {4, 5, 9},  {4, 7, 9},  {4, 9, 11}, {5, 6, 7},
      {5, 7, 8},  {5, 7, 9},  {6, 7, 11}, {7, 8, 9},  {9, 10, 11}};
  for (const auto& t : triples) {
    const std::vector<int> scales(t.begin(), t.end());
    const auto p = msr::stacked_profile(scales, 32, 2);
    const auto e = msr::predicted_mse(p, 1.0);
    const double kmin = *std::min_element(scales.begin(), scales.end());
    CHECK(e.lower_bound == doctest::Approx(kmin * kmin / 3.0));
    CHECK(e.trace_normalized >= e.lower_bound);
  }
}

TEST_CASE("predicted_mse names the offending frequency when non-invertible") {
  const auto p = msr::stacked_profile({9, 12}, 990, 1);
  try {
    msr::predicted_mse(p, 1.0);
    FAIL("expected NonInvertibleError");
  } catch (const msr::NonInvertibleError& e) {
    CHECK(e.freq_index()[0] == 330);
    CHECK(e.omega_fraction() == "330/990");
  }
}

TEST_CASE("asymptotic trace: cyclic trace converges to the quadrature value") {
  const double asym = msr::asymptotic_trace({9, 11}, 1);
  const auto p = msr::stacked_profile({9, 11}, 10000, 1);
  const double finite_n = msr::predicted_mse(p, 1.0).trace_normalized;
  CHECK(std::abs(finite_n - asym) / asym < 0.01);
}

TEST_CASE("asymptotic trace: (2,3) respects the tradeoff bound") {
  CHECK(msr::asymptotic_trace({2, 3}, 1) >= 1.0);
}

TEST_CASE("asymptotic trace: refinement is stable (Richardson)") {
  const double a = msr::asymptotic_trace({9, 11}, 1, 99 * 4);
  const double b = msr::asymptotic_trace({9, 11}, 1, 99 * 8);
  CHECK(std::abs(a - b) / b < 1e-3);
}

TEST_CASE("asymptotic trace rejects non-coprime scales") {
  CHECK_THROWS_AS(msr::asymptotic_trace({4, 6}, 1), std::invalid_argument);
}

TEST_CASE("valid-mode trace: identity scale") {
  CHECK(msr::valid_mode_trace({1}, 17, 1) == doctest::Approx(1.0));
}

TEST_CASE("valid-mode trace: (2,3) at n=10 vs hand-built dense computation") {
  const int n = 10;
  // Build T for valid convolutions with mean-normalized boxes 2 and 3.
  std::vector<std::vector<double>> rows;
  for (int k : {2, 3})
    for (int a = 0; a + k <= n; ++a) {
      std::vector<double> r(n, 0.0);
      for (int t = 0; t < k; ++t) r[a + t] = 1.0 / k;
      rows.push_back(r);
    }
  std::vector<std::vector<double>> G(n, std::vector<double>(n, 0.0));
  for (const auto& r : rows)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G[i][j] += r[i] * r[j];
  const auto inv = testutil::naive_inverse(G);
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += inv[i][i];
  CHECK(msr::valid_mode_trace({2, 3}, n, 1) ==
        doctest::Approx(trace / n).epsilon(1e-12));
}

TEST_CASE("valid-mode trace dominates the cyclic trace, gap shrinking") {
  std::vector<double> valid, cyclic;
  for (int n : {50, 100, 200, 400}) {
    valid.push_back(msr::valid_mode_trace({9, 11}, n, 1));
    cyclic.push_back(
        msr::predicted_mse(msr::stacked_profile({9, 11}, n, 1), 1.0).trace_normalized);
  }
  for (std::size_t i = 0; i < valid.size(); ++i) CHECK(valid[i] >= cyclic[i]);
  const double gap_first = valid.front() - cyclic.front();
  const double gap_last = valid.back() - cyclic.back();
  CHECK(gap_last < gap_first);
}
