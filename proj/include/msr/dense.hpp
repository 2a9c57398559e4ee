// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "msr/signal.hpp"

namespace msr {

// Explicit dense builds of the stacked forward map, used as the verification
// oracle for the fast solvers and for small-n rank/trace studies. These
// builders enumerate windows directly and share no code with the prefix-sum
// fast path.

/// Rows are measurement entries (scale-major, then row-major output pixels,
/// matching apply_T's stacking); columns are source pixels.
Eigen::MatrixXd build_forward_matrix(const std::vector<int>& scales, int n0, int n1,
                                     int dims, ConvMode mode, Normalization norm);

/// Minimum-norm least squares (lambda = 0, complete orthogonal
/// decomposition) or ridge via normal equations (lambda > 0).
/// Guard: n^d <= 4096.
GridSignal dense_oracle(const MeasurementSet& ms, double lambda);

/// Exact column rank of the kUnit forward matrix (integer entries) via
/// fraction-free Bareiss elimination over 128-bit integers.
int exact_forward_rank(const std::vector<int>& scales, int n0, int n1, int dims,
                       ConvMode mode);

/// tr((T'T)^{-1}) / n^d for the dense map. Throws NonInvertibleError when
/// the normal matrix is singular. Guard: n^d <= 4096.
double dense_normal_inverse_trace(const std::vector<int>& scales, int n, int d,
                                  ConvMode mode, Normalization norm);

}  // namespace msr
