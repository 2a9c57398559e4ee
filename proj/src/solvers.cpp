// SPDX-License-Identifier: Apache-2.0
#include "msr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "msr/errors.hpp"
#include "msr/fft.hpp"
#include "msr/forward.hpp"
#include "msr/spectral.hpp"

namespace msr {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Embeds a valid-mode measurement into the cyclic n-grid per pad policy.
GridSignal embed_valid(const GridSignal& z, int k, const std::array<int, 2>& shape,
                       int dims, PadPolicy pad) {
  auto map_index = [&](int axis, int a) -> int {
    const int valid_len = shape[axis] - k + 1;
    if (a < valid_len) return a;
    if (pad == PadPolicy::kZeroPad) return -1;
    // Reflect about the last valid sample.
    const int r = 2 * (valid_len - 1) - a;
    return std::max(0, r);
  };
  if (dims == 1) {
    GridSignal out(shape[0]);
    for (int a = 0; a < shape[0]; ++a) {
      const int src = map_index(0, a);
      out[a] = src < 0 ? 0.0 : z[src];
    }
    return out;
  }
  GridSignal out(shape[0], shape[1]);
  for (int a = 0; a < shape[0]; ++a) {
    const int ra = map_index(0, a);
    for (int b = 0; b < shape[1]; ++b) {
      const int rb = map_index(1, b);
      out.at(a, b) = (ra < 0 || rb < 0) ? 0.0 : z.at(ra, rb);
    }
  }
  return out;
}

}  // namespace

void ReconstructionConfig::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (tol <= 0.0) throw std::invalid_argument("tol must be > 0");
  if (method == SolverMethod::kLocal && lambda != 0.0)
    throw std::invalid_argument("local reconstruction requires lambda = 0");
}

std::vector<std::complex<double>> forward_multiplier(int k, int n, Normalization norm) {
  std::vector<std::complex<double>> m(n);
  const double gain = (norm == Normalization::kUnit) ? static_cast<double>(k) : 1.0;
  for (int j = 0; j < n; ++j) {
    if (grid_frequency_is_zero(k, j, n)) {
      m[j] = 0.0;
      continue;
    }
    const double omega = kTwoPi * static_cast<double>(j) / n;
    // Window [a, a+k) instead of centered taps shifts the phase forward.
    m[j] = std::polar(gain * periodic_sinc(k, omega), 0.5 * (k - 1) * omega);
  }
  return m;
}

GridSignal fourier_reconstruct(const MeasurementSet& ms, double lambda, PadPolicy pad) {
  ms.validate();
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (ms.mode == ConvMode::kFull)
    throw std::invalid_argument("fourier solver does not support full mode");
  if (ms.mode == ConvMode::kValid && pad == PadPolicy::kReject)
    throw std::invalid_argument(
        "fourier solver requires cyclic measurements (pad policy is reject)");

  const int n0 = ms.source_shape[0];
  const int n1 = ms.source_shape[1];
  const int d = ms.dims;
  const std::int64_t total = static_cast<std::int64_t>(n0) * n1;
  const std::size_t s = ms.scales.size();

  std::vector<std::vector<std::complex<double>>> mult0(s), mult1(s);
  for (std::size_t j = 0; j < s; ++j) {
    mult0[j] = forward_multiplier(ms.scales[j], n0, ms.norm);
    if (d == 2) mult1[j] = forward_multiplier(ms.scales[j], n1, ms.norm);
  }

  std::vector<std::complex<double>> numer(total, 0.0);
  std::vector<double> denom(total, lambda);
  for (std::size_t j = 0; j < s; ++j) {
    GridSignal zc = (ms.mode == ConvMode::kCyclic)
                        ? ms.data[j]
                        : embed_valid(ms.data[j], ms.scales[j], ms.source_shape, d, pad);
    auto Z = dft_forward(zc);
    for (std::int64_t i = 0; i < total; ++i) {
      const std::complex<double> m =
          (d == 1) ? mult0[j][i] : mult0[j][i / n1] * mult1[j][i % n1];
      numer[i] += std::conj(m) * Z[i];
      denom[i] += std::norm(m);
    }
  }

  for (std::int64_t i = 0; i < total; ++i) {
    if (denom[i] == 0.0) {
      const int j0 = (d == 1) ? static_cast<int>(i) : static_cast<int>(i / n1);
      const int j1 = (d == 1) ? 0 : static_cast<int>(i % n1);
      throw NonInvertibleError(
          "fourier reconstruction is non-invertible at frequency index " +
              std::to_string(j0) + (d == 2 ? "," + std::to_string(j1) : "") +
              " (omega/2pi = " + std::to_string(j0) + "/" + std::to_string(n0) +
              (d == 2 ? " x " + std::to_string(j1) + "/" + std::to_string(n1) : "") +
              "); use lambda > 0 or coprime scales",
          {j0, j1}, std::to_string(j0) + "/" + std::to_string(n0));
    }
    numer[i] /= denom[i];
  }
  return dft_inverse_real(numer, n0, n1, d);
}

std::vector<GridSignal> per_scale_filters(const std::vector<int>& scales, int n,
                                          int d, double lambda, Normalization norm) {
  if (d != 1 && d != 2) throw std::invalid_argument("dims must be 1 or 2");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const std::size_t s = scales.size();
  const int n1 = (d == 2) ? n : 1;
  const std::int64_t total = static_cast<std::int64_t>(n) * n1;

  std::vector<std::vector<std::complex<double>>> mult(s);
  for (std::size_t j = 0; j < s; ++j) mult[j] = forward_multiplier(scales[j], n, norm);

  auto mj = [&](std::size_t j, std::int64_t i) {
    return (d == 1) ? mult[j][i] : mult[j][i / n1] * mult[j][i % n1];
  };

  std::vector<double> denom(total, lambda);
  for (std::int64_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < s; ++j) denom[i] += std::norm(mj(j, i));

  std::vector<GridSignal> filters;
  filters.reserve(s);
  std::vector<std::complex<double>> h(total);
  for (std::size_t j = 0; j < s; ++j) {
    for (std::int64_t i = 0; i < total; ++i) {
      if (denom[i] == 0.0)
        throw NonInvertibleError(
            "per-scale filters undefined: zero denominator at frequency " +
                std::to_string(i),
            {static_cast<int>(d == 1 ? i : i / n1), static_cast<int>(d == 1 ? 0 : i % n1)},
            std::to_string(d == 1 ? i : i / n1) + "/" + std::to_string(n));
      h[i] = std::conj(mj(j, i)) / denom[i];
    }
    filters.push_back(dft_inverse_real(h, n, n1, d));
  }
  return filters;
}

namespace {

// Flat-vector views of the stacked measurement space.
std::int64_t stacked_size(const MeasurementSet& ms) {
  std::int64_t n = 0;
  for (const auto& z : ms.data) n += z.size();
  return n;
}

void apply_forward(const MeasurementSet& shape, const std::vector<double>& x,
                   std::vector<double>& out) {
  GridSignal u = (shape.dims == 1)
                     ? GridSignal(shape.source_shape[0])
                     : GridSignal(shape.source_shape[0], shape.source_shape[1]);
  std::copy(x.begin(), x.end(), u.values().begin());
  MeasurementSet m = apply_T(u, shape.scales, shape.mode, shape.norm);
  std::int64_t at = 0;
  for (const auto& z : m.data) {
    std::copy(z.values().begin(), z.values().end(), out.begin() + at);
    at += z.size();
  }
}

void apply_adjoint(const MeasurementSet& shape, const std::vector<double>& y,
                   std::vector<double>& out) {
  MeasurementSet m = shape;
  std::int64_t at = 0;
  for (auto& z : m.data) {
    std::copy(y.begin() + at, y.begin() + at + z.size(), z.values().begin());
    at += z.size();
  }
  GridSignal g = apply_T_adjoint(m);
  std::copy(g.values().begin(), g.values().end(), out.begin());
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

LsqrResult lsqr_reconstruct(const MeasurementSet& ms, const ReconstructionConfig& cfg) {
  ms.validate();
  cfg.validate();
  const std::int64_t ncols = static_cast<std::int64_t>(ms.source_shape[0]) *
                             (ms.dims == 2 ? ms.source_shape[1] : 1);
  const std::int64_t nrows = stacked_size(ms);
  const double damp = std::sqrt(cfg.lambda);
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter
                                        : static_cast<int>(std::min<std::int64_t>(
                                              10 * ncols, 1000000));

  std::vector<double> x(ncols, 0.0), v(ncols), w(ncols), tmpc(ncols);
  std::vector<double> u(nrows), tmpr(nrows);

  // u = b
  {
    std::int64_t at = 0;
    for (const auto& z : ms.data) {
      std::copy(z.values().begin(), z.values().end(), u.begin() + at);
      at += z.size();
    }
  }

  LsqrResult res;
  res.estimate = (ms.dims == 1)
                     ? GridSignal(ms.source_shape[0])
                     : GridSignal(ms.source_shape[0], ms.source_shape[1]);

  // ||T||_2 = f(0) of the stacked map: sqrt(sum of squared per-scale gains).
  double opnorm2 = cfg.lambda;
  for (int k : ms.scales) {
    double gain = 1.0;
    if (ms.norm == Normalization::kUnit)
      for (int i = 0; i < ms.dims; ++i) gain *= k;
    opnorm2 += gain * gain;
  }

  auto finish = [&](int iters, bool conv) {
    // Report the explicitly computed normal-equation residual
    // ||T'(z - Tx) - lambda x||, scaled by ||T|| ||z|| so it stays
    // well-defined for consistent (zero-residual) systems.
    apply_forward(ms, x, tmpr);
    std::int64_t at = 0;
    double bn2 = 0.0;
    for (const auto& z : ms.data) {
      for (std::int64_t i = 0; i < z.size(); ++i) {
        bn2 += z[i] * z[i];
        tmpr[at + i] = z[i] - tmpr[at + i];
      }
      at += z.size();
    }
    apply_adjoint(ms, tmpr, tmpc);
    double gn = 0.0;
    for (std::int64_t i = 0; i < ncols; ++i) {
      const double g = tmpc[i] - cfg.lambda * x[i];
      gn += g * g;
    }
    res.iterations = iters;
    res.converged = conv;
    res.relative_residual =
        (bn2 > 0.0) ? std::sqrt(gn) / std::sqrt(opnorm2 * bn2) : 0.0;
    std::copy(x.begin(), x.end(), res.estimate.values().begin());
    return res;
  };

  double beta = norm2(u);
  if (beta == 0.0) return finish(0, true);
  for (auto& e : u) e /= beta;
  apply_adjoint(ms, u, v);
  double alpha = norm2(v);
  if (alpha == 0.0) return finish(0, true);
  for (auto& e : v) e /= alpha;
  w = v;

  double phibar = beta;
  double rhobar = alpha;
  double anorm2 = alpha * alpha;
  double res2 = 0.0;

  for (int it = 1; it <= max_iter; ++it) {
    // Golub-Kahan step: u <- A v - alpha u, v <- A' u - beta v.
    apply_forward(ms, v, tmpr);
    for (std::int64_t i = 0; i < nrows; ++i) u[i] = tmpr[i] - alpha * u[i];
    beta = norm2(u);
    anorm2 += alpha * alpha + beta * beta + damp * damp;
    if (beta > 0.0)
      for (auto& e : u) e /= beta;
    apply_adjoint(ms, u, tmpc);
    for (std::int64_t i = 0; i < ncols; ++i) v[i] = tmpc[i] - beta * v[i];
    alpha = norm2(v);
    if (alpha > 0.0)
      for (auto& e : v) e /= alpha;

    // Eliminate the damping entry, then the lower-bidiagonal entry.
    const double rhobar1 = std::hypot(rhobar, damp);
    const double cs1 = rhobar / rhobar1;
    const double sn1 = damp / rhobar1;
    const double psi = sn1 * phibar;
    phibar = cs1 * phibar;

    const double rho = std::hypot(rhobar1, beta);
    const double cs = rhobar1 / rho;
    const double sn = beta / rho;
    const double theta = sn * alpha;
    rhobar = -cs * alpha;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    for (std::int64_t i = 0; i < ncols; ++i) {
      x[i] += t1 * w[i];
      w[i] = v[i] + t2 * w[i];
    }
    res2 += psi * psi;

    // rhobar1 = hypot(rhobar, damp) drops rhobar's sign, so phibar may carry
    // a flipped sign from here on; the stopping quantities are magnitudes.
    const double rnorm = std::sqrt(phibar * phibar + res2);
    const double arnorm = alpha * std::abs(cs * phibar);
    const double anorm = std::sqrt(anorm2);
    const double test2 = arnorm / (anorm * rnorm + 1e-300);
    if (test2 <= cfg.tol) return finish(it, true);
    if (alpha == 0.0 || beta == 0.0) return finish(it, true);  // Krylov exhausted
  }
  return finish(max_iter, false);
}

}  // namespace msr
