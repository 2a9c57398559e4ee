// SPDX-License-Identifier: Apache-2.0
#include "msr/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace msr {

int conv_output_extent(int n, int k, ConvMode mode) {
  if (n < 1) throw std::invalid_argument("signal extent must be positive");
  if (k < 1) throw std::invalid_argument("box size must be >= 1");
  switch (mode) {
    case ConvMode::kValid:
      if (n < k)
        throw std::invalid_argument("valid convolution requires n >= k (n=" +
                                    std::to_string(n) + ", k=" + std::to_string(k) + ")");
      return n - k + 1;
    case ConvMode::kFull:
      return n + k - 1;
    case ConvMode::kCyclic:
      return n;
  }
  throw std::logic_error("unreachable");
}

std::string to_string(ConvMode mode) {
  switch (mode) {
    case ConvMode::kValid: return "valid";
    case ConvMode::kFull: return "full";
    case ConvMode::kCyclic: return "cyclic";
  }
  return "?";
}

std::string to_string(Normalization norm) {
  return norm == Normalization::kUnit ? "unit" : "mean";
}

ConvMode conv_mode_from_string(const std::string& s) {
  if (s == "valid") return ConvMode::kValid;
  if (s == "full") return ConvMode::kFull;
  if (s == "cyclic") return ConvMode::kCyclic;
  throw std::invalid_argument("unknown convolution mode: " + s);
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "unit") return Normalization::kUnit;
  if (s == "mean") return Normalization::kMean;
  throw std::invalid_argument("unknown normalization: " + s);
}

GridSignal::GridSignal(int n, double fill) : dims_(1), n0_(n), n1_(1) {
  if (n < 1) throw std::invalid_argument("1-D signal length must be >= 1");
  v_.assign(static_cast<std::size_t>(n), fill);
}

GridSignal::GridSignal(int rows, int cols, double fill)
    : dims_(2), n0_(rows), n1_(cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("2-D signal extents must be >= 1");
  v_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

bool GridSignal::all_finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

BoxKernel::BoxKernel(int k, int d, Normalization n) : size(k), dims(d), norm(n) {
  if (k < 1) throw std::invalid_argument("box size must be >= 1");
  if (d != 1 && d != 2) throw std::invalid_argument("dims must be 1 or 2");
}

double BoxKernel::weight() const {
  if (norm == Normalization::kUnit) return 1.0;
  double w = 1.0;
  for (int i = 0; i < dims; ++i) w /= size;
  return w;
}

void MeasurementSet::validate() const {
  if (dims != 1 && dims != 2) throw std::invalid_argument("dims must be 1 or 2");
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (scales.empty()) throw std::invalid_argument("measurement set has no scales");
  if (scales.size() != data.size())
    throw std::invalid_argument("scales/data length mismatch");
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (scales[j] < 1) throw std::invalid_argument("scales must be >= 1");
    if (j > 0 && scales[j] <= scales[j - 1])
      throw std::invalid_argument("scales must be ascending and distinct");
    const GridSignal& z = data[j];
    if (z.dims() != dims) throw std::invalid_argument("measurement dims mismatch");
    for (int axis = 0; axis < dims; ++axis) {
      int want = conv_output_extent(source_shape[axis], scales[j], mode);
      if (z.extent(axis) != want)
        throw std::invalid_argument(
            "measurement shape mismatch at scale " + std::to_string(scales[j]) +
            ": axis " + std::to_string(axis) + " has " +
            std::to_string(z.extent(axis)) + ", expected " + std::to_string(want));
    }
    if (dims == 1 && z.extent(1) != 1)
      throw std::invalid_argument("1-D measurement must have extent(1) == 1");
  }
}

MeasurementSet MeasurementSet::head_scales(int count) const {
  if (count < 1 || count > static_cast<int>(scales.size()))
    throw std::invalid_argument("head_scales count out of range");
  MeasurementSet out = *this;
  out.scales.assign(scales.begin(), scales.begin() + count);
  out.data.assign(data.begin(), data.begin() + count);
  return out;
}

}  // namespace msr
