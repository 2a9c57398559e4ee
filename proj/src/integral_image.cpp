// SPDX-License-Identifier: Apache-2.0
#include "msr/integral_image.hpp"

namespace msr {

IntegralImage::IntegralImage(const GridSignal& s)
    : dims_(s.dims()), n0_(s.extent(0)), n1_(s.extent(1)) {
  if (dims_ == 1) {
    c_.assign(static_cast<std::size_t>(n0_) + 1, 0.0);
    for (int i = 0; i < n0_; ++i) c_[i + 1] = c_[i] + s[i];
    return;
  }
  const std::int64_t w = n1_ + 1;
  c_.assign(static_cast<std::size_t>(n0_ + 1) * w, 0.0);
  // Row-wise prefix sums, then column-wise; both passes are per-line
  // independent so each parallelizes without changing summation order.
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n0_; ++i) {
    double run = 0.0;
    for (int j = 0; j < n1_; ++j) {
      run += s.at(i, j);
      c_[(i + 1) * w + (j + 1)] = run;
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 1; j <= n1_; ++j) {
    double run = 0.0;
    for (int i = 1; i <= n0_; ++i) {
      run += c_[i * w + j];
      c_[i * w + j] = run;
    }
  }
}

}  // namespace msr
