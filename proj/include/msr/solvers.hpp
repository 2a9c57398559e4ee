// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "msr/signal.hpp"

namespace msr {

enum class SolverMethod { kFourier, kLsqr, kLocal, kDenseOracle };
enum class PadPolicy { kReject, kZeroPad, kReflectPad };

struct ReconstructionConfig {
  SolverMethod method = SolverMethod::kLsqr;
  double lambda = 0.0;
  int max_iter = 0;  // <= 0 means 10 * n^d
  double tol = 1e-10;
  PadPolicy pad = PadPolicy::kReject;

  void validate() const;
};

/// Per-frequency multiplier of the cyclic width-k window sum along one axis:
/// DFT(y) = M_k(omega) * DFT(u). Entries at exact sinc zeros are exactly 0.
std::vector<std::complex<double>> forward_multiplier(int k, int n, Normalization norm);

/// Closed-form regularized least squares in the Fourier domain (Prop-style
/// per-frequency solve). Cyclic measurements; valid measurements are
/// embedded per the pad policy (kReject throws). With lambda = 0 an exact
/// common zero raises NonInvertibleError naming the frequency.
GridSignal fourier_reconstruct(const MeasurementSet& ms, double lambda,
                               PadPolicy pad = PadPolicy::kReject);

/// Filters h_j with DFT(h_j) = conj(M_j) / (lambda + sum |M_j'|^2); summing
/// the cyclic convolutions z_j (*) h_j reproduces fourier_reconstruct.
std::vector<GridSignal> per_scale_filters(const std::vector<int>& scales, int n,
                                          int d, double lambda, Normalization norm);

struct LsqrResult {
  GridSignal estimate;
  int iterations = 0;
  double relative_residual = 0.0;  // ||T'(z-Tx) - lambda x|| / (||T|| ||r||)
  bool converged = false;
};

/// Iterative damped LSQR against the fast apply_T / apply_T_adjoint
/// operators; O(N*S) per iteration, any mode. Minimizes
/// sum_j ||x (*) b_kj - z_j||^2 + lambda ||x||^2; converges to the
/// minimum-norm solution for rank-deficient systems.
LsqrResult lsqr_reconstruct(const MeasurementSet& ms, const ReconstructionConfig& cfg);

}  // namespace msr
