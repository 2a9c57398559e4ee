// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "msr/signal.hpp"

namespace msr {

// Forward measurement model. Window convention: y_k(a) is the box sum (or
// mean) over the window [a, a+k) along each axis; cyclic indices wrap mod n.

/// Box filter via per-axis running prefix sums: O(N) per scale, independent
/// of k. OpenMP-parallel across lines.
GridSignal box_convolve(const GridSignal& u, const BoxKernel& kernel, ConvMode mode);

/// Serial direct-summation reference, O(N * k^d). Kept as the independent
/// oracle for the fast path and as the benchmark baseline.
GridSignal box_convolve_reference(const GridSignal& u, const BoxKernel& kernel,
                                  ConvMode mode);

/// Simulates the k^d shifted, stride-k decimated captures of a
/// low-resolution sensor and interleaves them. Equals box_convolve exactly.
GridSignal interlace_measure(const GridSignal& u, int k, ConvMode mode,
                             Normalization norm = Normalization::kUnit);

/// Aggregates a scale-k measurement to scale m*k by summing m consecutive
/// windows per axis: y_{mk}(a) = sum_i y_k(a + i*k). For kMean input the
/// output is rescaled to be the mean over the mk-window.
GridSignal aggregate_scale(const GridSignal& y, int k, int m, ConvMode mode,
                           Normalization norm = Normalization::kUnit);

/// Stacked forward map: measurements of u at every scale. Scales are sorted
/// ascending; duplicates are rejected.
MeasurementSet apply_T(const GridSignal& u, std::vector<int> scales, ConvMode mode,
                       Normalization norm);

/// Exact adjoint of apply_T under the standard inner product.
GridSignal apply_T_adjoint(const MeasurementSet& ms);

/// Adds i.i.d. Gaussian noise, independent across pixels and scales.
/// Deterministic given seed (scale j draws from derive_stream(seed, j));
/// records sigma in the returned set.
MeasurementSet add_noise(const MeasurementSet& ms, double sigma, std::uint64_t seed);

}  // namespace msr
