// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "msr/signal.hpp"

namespace msr {

/// Summed-area table with one guard row/column of zeros per axis.
/// Any axis-aligned box sum over the source is a +/- combination of 2^d
/// cumulative entries.
class IntegralImage {
 public:
  explicit IntegralImage(const GridSignal& s);

  int dims() const { return dims_; }
  int extent(int axis) const { return axis == 0 ? n0_ : n1_; }

  /// 1-D sum over [a, b), 0 <= a <= b <= n.
  double box_sum(int a, int b) const {
    return c_[static_cast<std::size_t>(b)] - c_[static_cast<std::size_t>(a)];
  }

  /// 2-D sum over rows [r0, r1) x cols [c0, c1).
  double box_sum(int r0, int r1, int c0, int c1) const {
    const std::int64_t w = n1_ + 1;
    return c_[r1 * w + c1] - c_[r0 * w + c1] - c_[r1 * w + c0] + c_[r0 * w + c0];
  }

  const std::vector<double>& cumulative() const { return c_; }

 private:
  int dims_ = 1;
  int n0_ = 0;
  int n1_ = 1;
  std::vector<double> c_;
};

inline IntegralImage integral_image(const GridSignal& s) { return IntegralImage(s); }

}  // namespace msr
