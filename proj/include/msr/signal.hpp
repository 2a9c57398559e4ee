// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace msr {

// Output extents per mode for signal length n, box size k:
//   kValid:  n-k+1 (requires n >= k)
//   kFull:   n+k-1 (all partial overlaps)
//   kCyclic: n     (indices wrap mod n; k may exceed n)
enum class ConvMode { kValid, kFull, kCyclic };

// kUnit: box taps weigh 1 (window sums). kMean: taps weigh 1/k^d.
enum class Normalization { kUnit, kMean };

int conv_output_extent(int n, int k, ConvMode mode);

std::string to_string(ConvMode mode);
std::string to_string(Normalization norm);
ConvMode conv_mode_from_string(const std::string& s);
Normalization normalization_from_string(const std::string& s);

/// Real-valued signal on a 1-D or 2-D integer grid, row-major storage.
/// 1-D signals have extent(1) == 1 and live along axis 0.
class GridSignal {
 public:
  GridSignal() = default;
  explicit GridSignal(int n, double fill = 0.0);
  GridSignal(int rows, int cols, double fill = 0.0);

  int dims() const { return dims_; }
  int extent(int axis) const { return axis == 0 ? n0_ : n1_; }
  std::int64_t size() const { return static_cast<std::int64_t>(n0_) * n1_; }

  double operator[](std::int64_t i) const { return v_[i]; }
  double& operator[](std::int64_t i) { return v_[i]; }
  double at(int i, int j) const { return v_[static_cast<std::int64_t>(i) * n1_ + j]; }
  double& at(int i, int j) { return v_[static_cast<std::int64_t>(i) * n1_ + j]; }

  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  bool same_shape(const GridSignal& o) const {
    return dims_ == o.dims_ && n0_ == o.n0_ && n1_ == o.n1_;
  }
  bool all_finite() const;

 private:
  int dims_ = 1;
  int n0_ = 0;
  int n1_ = 1;
  std::vector<double> v_;
};

/// Separable box filter: the d-dim kernel is the outer product of d
/// identical 1-D boxes of size k.
struct BoxKernel {
  int size = 1;
  int dims = 1;
  Normalization norm = Normalization::kUnit;

  BoxKernel(int k, int d, Normalization n = Normalization::kUnit);
  /// Per-tap weight: 1 for kUnit, 1/k^d for kMean.
  double weight() const;
};

/// Per-scale low-resolution observations of one source signal.
struct MeasurementSet {
  std::vector<int> scales;  // ascending, pairwise distinct, each >= 1
  ConvMode mode = ConvMode::kValid;
  Normalization norm = Normalization::kUnit;
  double sigma = 0.0;  // known/assumed per-pixel noise std
  int dims = 1;
  std::array<int, 2> source_shape{0, 1};  // {n0, n1}; n1 == 1 for 1-D
  std::vector<GridSignal> data;

  /// Checks scale ordering, sigma >= 0, and that each data entry has the
  /// shape implied by (source_shape, scale, mode). Throws on violation.
  void validate() const;

  /// The measurement subset using only the first `count` scales.
  MeasurementSet head_scales(int count) const;
};

}  // namespace msr
