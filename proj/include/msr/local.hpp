// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "msr/signal.hpp"

namespace msr {

// Exact local reconstruction from coprime box sums. The building block is
// the difference identity u(a) = y_{K+1}(a) - y_K(a+1) for adjacent-scale
// window sums, reached by aggregating each measurement to scales K and K+1.

/// Multipliers with m2*k2 = m1*k1 + 1, 1 <= m1 <= k2, 1 <= m2 <= k1.
struct BezoutPlan {
  int k1 = 0, k2 = 0;
  int m1 = 0, m2 = 0;
};

/// Extended-Euclid solution reduced into the stated ranges. Requires
/// gcd(k1,k2) = 1; throws for non-coprime input and for k2 == 1 < k1
/// (pass the unit scale first in that case).
BezoutPlan bezout_plan(int k1, int k2);

/// Reconstructs u from UNIT measurements y1 (scale k1) and y2 (scale k2).
/// Exact on noiseless data. Cyclic mode returns all n samples; valid mode
/// returns the prefix u(0 .. n-K-1) where K = m1*k1, the indices for which
/// every referenced window exists.
GridSignal local_reconstruct_1d(const GridSignal& y1, const GridSignal& y2,
                                const BezoutPlan& plan, ConvMode mode,
                                Normalization norm = Normalization::kUnit);

/// k = m1*k1, k+1 = m2*k2, 2k+1 = m3*k3 with k3 odd (relabeled if needed)
/// and max(m_j) <= k1*k2*k3. k is the smallest admissible value.
struct CrtPlan {
  int k1 = 0, k2 = 0, k3 = 0;  // relabeled so k3 is odd
  std::int64_t k = 0;
  std::int64_t m1 = 0, m2 = 0, m3 = 0;
};

CrtPlan crt_plan(int k1, int k2, int k3);

/// 2-D local reconstruction from three UNIT measurements at the plan's
/// scales via the five-window packing identity. Cyclic mode requires
/// n >= 2k+1 per axis and returns the full grid; valid mode returns the
/// interior block with a k-pixel margin on every side.
GridSignal local_reconstruct_2d(const MeasurementSet& ms, const CrtPlan& plan);

/// A nonzero 2-D signal invisible to valid box sums at both k1 and k2:
/// the outer product of 1-D witnesses (zero-sum patterns tiled periodically).
GridSignal nullspace_witness(int k1, int k2, int n);

}  // namespace msr
