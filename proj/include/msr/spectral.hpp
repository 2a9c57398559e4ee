// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "msr/signal.hpp"

namespace msr {

// Spectral theory of box filters. Everything here uses kMean normalization
// (taps 1/k^d); kUnit singular values are the kMean ones scaled by k^d per
// scale.

/// Periodic sinc sin(k*omega/2) / (k*sin(omega/2)) on [0, 2*pi], with the
/// continuous extension value 1 at both endpoints. Throws outside [0, 2*pi].
double periodic_sinc(int k, double omega);

/// True iff the grid frequency 2*pi*j/n is a zero of f_k, decided by exact
/// rational comparison (j*k = 0 mod n with j != 0), never by floating
/// equality.
bool grid_frequency_is_zero(int k, int j, int n);

bool pairwise_coprime(const std::vector<int>& scales);

/// DFT of the 1-D mean-normalized box: e^{-i(k-1)omega/2} f_k(omega) at
/// omega in (2*pi/n)*{0..n-1}. Entries at exact zeros of f_k are exactly 0.
std::vector<std::complex<double>> box_dft(int k, int n);

/// Number of grid frequencies in d dimensions where |DFT of b_k| <= epsilon.
std::int64_t near_zero_count(int k, int n, int d, double epsilon);

/// Per-frequency singular values of the stacked cyclic map.
struct SpectralProfile {
  int dims = 1;
  int n = 0;
  std::vector<int> scales;
  std::vector<double> sigma_values;  // n^d values, row-major over the grid

  double max_value() const;
  double min_value() const;
  /// Flattened grid index of the smallest singular value.
  std::int64_t argmin() const;
};

/// sigma(omega) = sqrt(sum_j prod_l f_{k_j}^2(omega_l)) over the n^d grid.
SpectralProfile stacked_profile(const std::vector<int>& scales, int n, int d);

/// max/min singular value; +infinity when the minimum is an exact zero.
double condition_number(const SpectralProfile& profile);

struct ErrorPrediction {
  double trace_normalized = 0.0;  // tr((T'T)^{-1}) / n^d
  double rmse_factor = 0.0;       // sqrt(trace_normalized)
  double asymptotic_value = 0.0;  // quadrature limit; NaN if not coprime
  double lower_bound = 0.0;       // k_min^d / s  (Jensen bound)
  double expected_mse = 0.0;      // sigma^2 * trace_normalized, per pixel
};

/// Expected least-squares error for the profile's cyclic map. Throws
/// NonInvertibleError (naming the frequency) on an exact zero singular value.
ErrorPrediction predicted_mse(const SpectralProfile& profile, double sigma);

/// lim_{n->inf} tr((T'T)^{-1})/n^d as midpoint quadrature of
/// (2*pi)^{-d} integral of 1/f^2 over [0,2*pi]^d, refined until the relative
/// change is < 1e-4. Grid counts stay multiples of every scale so nodes
/// never hit a zero. Requires pairwise coprime scales.
double asymptotic_trace(const std::vector<int>& scales, int d, int grid = 0);

/// tr((T'T)^{-1})/n^d for the valid-convolution map, via an explicit dense
/// matrix (kMean). Requires n^d small enough for dense work and injective T.
double valid_mode_trace(const std::vector<int>& scales, int n, int d);

}  // namespace msr
