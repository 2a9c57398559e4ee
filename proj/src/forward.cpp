// SPDX-License-Identifier: Apache-2.0
#include "msr/forward.hpp"

#include <algorithm>
#include <stdexcept>

#include "msr/rng.hpp"

namespace msr {
namespace {

// pre has n+1 entries: pre[i] = x[0] + ... + x[i-1] along a strided line.
void line_prefix(const double* x, int n, std::int64_t stride, double* pre) {
  pre[0] = 0.0;
  for (int i = 0; i < n; ++i) pre[i + 1] = pre[i] + x[i * stride];
}

// Window sums of width k from a prefix table, written to a strided output.
void line_window_sums(const double* pre, int n, int k, ConvMode mode, double* y,
                      std::int64_t ys) {
  switch (mode) {
    case ConvMode::kValid: {
      const int m = n - k + 1;
      for (int a = 0; a < m; ++a) y[a * ys] = pre[a + k] - pre[a];
      return;
    }
    case ConvMode::kFull: {
      const int m = n + k - 1;
      for (int i = 0; i < m; ++i) {
        const int hi = std::min(i, n - 1) + 1;
        const int lo = std::max(0, i - k + 1);
        y[i * ys] = pre[hi] - pre[lo];
      }
      return;
    }
    case ConvMode::kCyclic: {
      const double total = pre[n];
      const int q = k / n;
      const int r = k % n;
      for (int a = 0; a < n; ++a) {
        double s = q * total;
        if (r > 0)
          s += (a + r <= n) ? pre[a + r] - pre[a] : total - pre[a] + pre[a + r - n];
        y[a * ys] = s;
      }
      return;
    }
  }
}

// Width-k window sums (UNIT weights) along one axis; other axes untouched.
GridSignal axis_window_sum(const GridSignal& in, int k, ConvMode mode, int axis) {
  if (k == 1) return in;  // width-1 windows are the identity, bit-exact
  const int n = in.extent(axis);
  const int out_n = conv_output_extent(n, k, mode);
  if (in.dims() == 1) {
    GridSignal out(out_n);
    std::vector<double> pre(n + 1);
    line_prefix(in.values().data(), n, 1, pre.data());
    line_window_sums(pre.data(), n, k, mode, out.values().data(), 1);
    return out;
  }
  const int n0 = in.extent(0), n1 = in.extent(1);
  GridSignal out = (axis == 0) ? GridSignal(out_n, n1) : GridSignal(n0, out_n);
  const int lines = (axis == 0) ? n1 : n0;
  const std::int64_t in_stride = (axis == 0) ? n1 : 1;
  const std::int64_t out_stride = (axis == 0) ? out.extent(1) : 1;
#pragma omp parallel
  {
    std::vector<double> pre(n + 1);
#pragma omp for schedule(static)
    for (int L = 0; L < lines; ++L) {
      const double* src =
          in.values().data() + ((axis == 0) ? L : static_cast<std::int64_t>(L) * n1);
      double* dst = out.values().data() +
                    ((axis == 0) ? L : static_cast<std::int64_t>(L) * out.extent(1));
      line_prefix(src, n, in_stride, pre.data());
      line_window_sums(pre.data(), n, k, mode, dst, out_stride);
    }
  }
  return out;
}

void scale_in_place(GridSignal& s, double factor) {
  if (factor == 1.0) return;
  double* v = s.values().data();
  const std::int64_t n = s.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) v[i] *= factor;
}

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

// Direct window sum with per-mode index arithmetic (reference path).
double direct_window_sum_1d(const GridSignal& u, int a, int k, ConvMode mode) {
  const int n = u.extent(0);
  double s = 0.0;
  switch (mode) {
    case ConvMode::kValid:
      for (int t = 0; t < k; ++t) s += u[a + t];
      return s;
    case ConvMode::kFull:
      for (int t = a - k + 1; t <= a; ++t)
        if (t >= 0 && t < n) s += u[t];
      return s;
    case ConvMode::kCyclic:
      for (int t = 0; t < k; ++t) s += u[wrap(a + t, n)];
      return s;
  }
  return s;
}

double direct_window_sum_2d(const GridSignal& u, int a, int b, int k, ConvMode mode) {
  const int n0 = u.extent(0), n1 = u.extent(1);
  double s = 0.0;
  switch (mode) {
    case ConvMode::kValid:
      for (int t0 = 0; t0 < k; ++t0)
        for (int t1 = 0; t1 < k; ++t1) s += u.at(a + t0, b + t1);
      return s;
    case ConvMode::kFull:
      for (int t0 = a - k + 1; t0 <= a; ++t0) {
        if (t0 < 0 || t0 >= n0) continue;
        for (int t1 = b - k + 1; t1 <= b; ++t1)
          if (t1 >= 0 && t1 < n1) s += u.at(t0, t1);
      }
      return s;
    case ConvMode::kCyclic:
      for (int t0 = 0; t0 < k; ++t0)
        for (int t1 = 0; t1 < k; ++t1) s += u.at(wrap(a + t0, n0), wrap(b + t1, n1));
      return s;
  }
  return s;
}

}  // namespace

GridSignal box_convolve(const GridSignal& u, const BoxKernel& kernel, ConvMode mode) {
  if (kernel.dims != u.dims())
    throw std::invalid_argument("kernel/signal dims mismatch");
  GridSignal out = axis_window_sum(u, kernel.size, mode, u.dims() == 2 ? 1 : 0);
  if (u.dims() == 2) out = axis_window_sum(out, kernel.size, mode, 0);
  scale_in_place(out, kernel.weight());
  return out;
}

GridSignal box_convolve_reference(const GridSignal& u, const BoxKernel& kernel,
                                  ConvMode mode) {
  if (kernel.dims != u.dims())
    throw std::invalid_argument("kernel/signal dims mismatch");
  const int k = kernel.size;
  const double w = kernel.weight();
  if (u.dims() == 1) {
    const int m = conv_output_extent(u.extent(0), k, mode);
    GridSignal out(m);
    for (int a = 0; a < m; ++a) out[a] = w * direct_window_sum_1d(u, a, k, mode);
    return out;
  }
  const int m0 = conv_output_extent(u.extent(0), k, mode);
  const int m1 = conv_output_extent(u.extent(1), k, mode);
  GridSignal out(m0, m1);
  for (int a = 0; a < m0; ++a)
    for (int b = 0; b < m1; ++b) out.at(a, b) = w * direct_window_sum_2d(u, a, b, k, mode);
  return out;
}

GridSignal interlace_measure(const GridSignal& u, int k, ConvMode mode,
                             Normalization norm) {
  const BoxKernel kernel(k, u.dims(), norm);
  const double w = kernel.weight();
  if (u.dims() == 1) {
    const int m = conv_output_extent(u.extent(0), k, mode);
    GridSignal out(m);
    // One decimated capture per sub-pixel origin s, sampled at stride k.
    for (int s = 0; s < k; ++s)
      for (int a = s; a < m; a += k) out[a] = w * direct_window_sum_1d(u, a, k, mode);
    return out;
  }
  const int m0 = conv_output_extent(u.extent(0), k, mode);
  const int m1 = conv_output_extent(u.extent(1), k, mode);
  GridSignal out(m0, m1);
  for (int s0 = 0; s0 < k; ++s0)
    for (int s1 = 0; s1 < k; ++s1)
      for (int a = s0; a < m0; a += k)
        for (int b = s1; b < m1; b += k)
          out.at(a, b) = w * direct_window_sum_2d(u, a, b, k, mode);
  return out;
}

GridSignal aggregate_scale(const GridSignal& y, int k, int m, ConvMode mode,
                           Normalization norm) {
  if (k < 1) throw std::invalid_argument("box size must be >= 1");
  if (m < 1) throw std::invalid_argument("aggregation multiplier must be >= 1");
  if (m == 1) return y;
  const int big = m * k;
  const int d = y.dims();

  auto out_extent = [&](int axis) {
    const int len = y.extent(axis);
    switch (mode) {
      case ConvMode::kValid: {
        // y has n-k+1 entries, so the source had n = len+k-1.
        const int n = len + k - 1;
        if (n - big + 1 < 1)
          throw std::invalid_argument("aggregated scale exceeds signal extent");
        return n - big + 1;
      }
      case ConvMode::kFull:
        return (len - k + 1) + big - 1;
      case ConvMode::kCyclic:
        return len;
    }
    return 0;
  };

  // kValid/kCyclic windows are start-indexed (the i-th contributing window
  // begins at a + i*k); kFull output is end-indexed, so windows step
  // backwards and indices outside y contribute empty windows.
  auto fetch = [&](int axis, int a, int i) -> int {
    const int len = y.extent(axis);
    switch (mode) {
      case ConvMode::kValid:
        return a + i * k;
      case ConvMode::kFull: {
        const int idx = a - i * k;
        return (idx >= 0 && idx < len) ? idx : -1;
      }
      case ConvMode::kCyclic:
        return wrap(a + i * k, len);
    }
    return -1;
  };

  GridSignal out = (d == 1) ? GridSignal(out_extent(0))
                            : GridSignal(out_extent(0), out_extent(1));
  if (d == 1) {
    const int mo = out.extent(0);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < mo; ++a) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) {
        const int src = fetch(0, a, i);
        if (src >= 0) s += y[src];
      }
      out[a] = s;
    }
  } else {
    const int mo0 = out.extent(0), mo1 = out.extent(1);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < mo0; ++a)
      for (int b = 0; b < mo1; ++b) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
          const int r = fetch(0, a, i);
          if (r < 0) continue;
          for (int j = 0; j < m; ++j) {
            const int c = fetch(1, b, j);
            if (c >= 0) s += y.at(r, c);
          }
        }
        out.at(a, b) = s;
      }
  }
  if (norm == Normalization::kMean) {
    // Input entries are k-window means; their sum over m^d windows divided
    // by m^d is the mean over the mk-window.
    double f = 1.0;
    for (int i = 0; i < d; ++i) f /= m;
    scale_in_place(out, f);
  }
  return out;
}

MeasurementSet apply_T(const GridSignal& u, std::vector<int> scales, ConvMode mode,
                       Normalization norm) {
  if (scales.empty()) throw std::invalid_argument("at least one scale required");
  std::sort(scales.begin(), scales.end());
  if (std::adjacent_find(scales.begin(), scales.end()) != scales.end())
    throw std::invalid_argument("scales must be pairwise distinct");
  MeasurementSet ms;
  ms.scales = std::move(scales);
  ms.mode = mode;
  ms.norm = norm;
  ms.dims = u.dims();
  ms.source_shape = {u.extent(0), u.extent(1)};
  ms.data.reserve(ms.scales.size());
  for (int k : ms.scales)
    ms.data.push_back(box_convolve(u, BoxKernel(k, u.dims(), norm), mode));
  return ms;
}

namespace {

// Adjoint of the width-k window sum along one axis. For kValid the adjoint
// is the kFull window sum of the measurement, for kFull it is the kValid
// sum, and for kCyclic it is the reversed cyclic window sum.
GridSignal axis_window_sum_adjoint(const GridSignal& z, int k, ConvMode mode,
                                   int axis, int source_extent) {
  switch (mode) {
    case ConvMode::kValid:
      return axis_window_sum(z, k, ConvMode::kFull, axis);
    case ConvMode::kFull:
      return axis_window_sum(z, k, ConvMode::kValid, axis);
    case ConvMode::kCyclic: {
      const int n = source_extent;
      GridSignal w = axis_window_sum(z, k, ConvMode::kCyclic, axis);
      GridSignal out = w;  // same shape
      const int r = wrap(1 - k, n);  // out(t) = w((t - k + 1) mod n)
      if (z.dims() == 1) {
        for (int t = 0; t < n; ++t) out[t] = w[wrap(t + r, n)];
      } else {
        const int n0 = w.extent(0), n1 = w.extent(1);
        for (int i = 0; i < n0; ++i)
          for (int j = 0; j < n1; ++j) {
            const int ii = (axis == 0) ? wrap(i + r, n0) : i;
            const int jj = (axis == 1) ? wrap(j + r, n1) : j;
            out.at(i, j) = w.at(ii, jj);
          }
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

GridSignal apply_T_adjoint(const MeasurementSet& ms) {
  ms.validate();
  GridSignal acc = (ms.dims == 1) ? GridSignal(ms.source_shape[0])
                                  : GridSignal(ms.source_shape[0], ms.source_shape[1]);
  for (std::size_t j = 0; j < ms.scales.size(); ++j) {
    const int k = ms.scales[j];
    GridSignal t = axis_window_sum_adjoint(ms.data[j], k, ms.mode,
                                           ms.dims == 2 ? 1 : 0, ms.source_shape[ms.dims == 2 ? 1 : 0]);
    if (ms.dims == 2) t = axis_window_sum_adjoint(t, k, ms.mode, 0, ms.source_shape[0]);
    const double w = BoxKernel(k, ms.dims, ms.norm).weight();
    const std::int64_t n = acc.size();
    double* a = acc.values().data();
    const double* b = t.values().data();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) a[i] += w * b[i];
  }
  return acc;
}

MeasurementSet add_noise(const MeasurementSet& ms, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  MeasurementSet out = ms;
  out.sigma = sigma;
  if (sigma == 0.0) return out;
  for (std::size_t j = 0; j < out.data.size(); ++j) {
    const std::uint64_t stream = derive_stream(seed, j);
    double* v = out.data[j].values().data();
    const std::int64_t n = out.data[j].size();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
      v[i] += sigma * gaussian(stream, static_cast<std::uint64_t>(i));
  }
  return out;
}

}  // namespace msr
