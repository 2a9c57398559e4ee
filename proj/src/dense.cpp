// SPDX-License-Identifier: Apache-2.0
#include "msr/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "msr/errors.hpp"

namespace msr {
namespace {

constexpr std::int64_t kDenseGuard = 4096;

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

// Column indices touched by the 1-D window at output index a.
std::vector<int> window_columns(int a, int k, int n, ConvMode mode) {
  std::vector<int> cols;
  switch (mode) {
    case ConvMode::kValid:
      for (int t = 0; t < k; ++t) cols.push_back(a + t);
      break;
    case ConvMode::kFull:
      for (int t = a - k + 1; t <= a; ++t)
        if (t >= 0 && t < n) cols.push_back(t);
      break;
    case ConvMode::kCyclic:
      for (int t = 0; t < k; ++t) cols.push_back(wrap(a + t, n));
      break;
  }
  return cols;
}

std::int64_t check_guard(int n0, int n1, int dims) {
  const std::int64_t cols = (dims == 1) ? n0 : static_cast<std::int64_t>(n0) * n1;
  if (cols > kDenseGuard)
    throw std::invalid_argument("dense build guard exceeded (n^d > 4096)");
  return cols;
}

}  // namespace

Eigen::MatrixXd build_forward_matrix(const std::vector<int>& scales, int n0, int n1,
                                     int dims, ConvMode mode, Normalization norm) {
  const std::int64_t cols = check_guard(n0, n1, dims);
  std::int64_t rows = 0;
  for (int k : scales) {
    std::int64_t r = conv_output_extent(n0, k, mode);
    if (dims == 2) r *= conv_output_extent(n1, k, mode);
    rows += r;
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(rows, cols);
  std::int64_t row = 0;
  for (int k : scales) {
    const double w = BoxKernel(k, dims, norm).weight();
    if (dims == 1) {
      const int m = conv_output_extent(n0, k, mode);
      for (int a = 0; a < m; ++a, ++row)
        for (int c : window_columns(a, k, n0, mode)) T(row, c) += w;
    } else {
      const int m0 = conv_output_extent(n0, k, mode);
      const int m1 = conv_output_extent(n1, k, mode);
      for (int a = 0; a < m0; ++a) {
        const auto rows0 = window_columns(a, k, n0, mode);
        for (int b = 0; b < m1; ++b, ++row) {
          const auto cols1 = window_columns(b, k, n1, mode);
          for (int r0 : rows0)
            for (int c1 : cols1) T(row, static_cast<std::int64_t>(r0) * n1 + c1) += w;
        }
      }
    }
  }
  return T;
}

GridSignal dense_oracle(const MeasurementSet& ms, double lambda) {
  ms.validate();
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const int n0 = ms.source_shape[0], n1 = ms.source_shape[1];
  const std::int64_t cols = check_guard(n0, n1, ms.dims);

  Eigen::MatrixXd T = build_forward_matrix(ms.scales, n0, n1, ms.dims, ms.mode, ms.norm);
  Eigen::VectorXd b(T.rows());
  std::int64_t at = 0;
  for (const GridSignal& z : ms.data) {
    for (std::int64_t i = 0; i < z.size(); ++i) b[at + i] = z[i];
    at += z.size();
  }

  Eigen::VectorXd x;
  if (lambda == 0.0) {
    x = T.completeOrthogonalDecomposition().solve(b);
  } else {
    Eigen::MatrixXd G = T.transpose() * T;
    G.diagonal().array() += lambda;
    x = G.llt().solve(T.transpose() * b);
  }

  GridSignal out = (ms.dims == 1) ? GridSignal(n0) : GridSignal(n0, n1);
  for (std::int64_t i = 0; i < cols; ++i) out[i] = x[i];
  return out;
}

int exact_forward_rank(const std::vector<int>& scales, int n0, int n1, int dims,
                       ConvMode mode) {
  const std::int64_t cols = check_guard(n0, n1, dims);
  if (cols > 64)
    throw std::invalid_argument("exact rank limited to n^d <= 64 columns");
  Eigen::MatrixXd Td =
      build_forward_matrix(scales, n0, n1, dims, mode, Normalization::kUnit);
  const std::int64_t rows = Td.rows();
  std::vector<std::vector<__int128>> a(rows, std::vector<__int128>(cols));
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j)
      a[i][j] = static_cast<__int128>(llround(Td(i, j)));

  // Fraction-free Bareiss elimination; exact over the integers, so the rank
  // decision involves no floating threshold. Intermediate values are minors
  // of the original matrix; multiplication is overflow-checked because the
  // Hadamard bound alone does not certify 128 bits at the size guard.
  auto mul = [](__int128 x, __int128 y) {
    __int128 r;
    if (__builtin_mul_overflow(x, y, &r))
      throw std::overflow_error("exact rank elimination overflowed 128 bits");
    return r;
  };
  int rank = 0;
  __int128 prev = 1;
  for (std::int64_t col = 0; col < cols && rank < rows; ++col) {
    std::int64_t pivot = -1;
    for (std::int64_t i = rank; i < rows; ++i)
      if (a[i][col] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(a[rank], a[pivot]);
    for (std::int64_t i = rank + 1; i < rows; ++i) {
      for (std::int64_t j = col + 1; j < cols; ++j)
        a[i][j] = (mul(a[rank][col], a[i][j]) - mul(a[i][col], a[rank][j])) / prev;
      a[i][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

double dense_normal_inverse_trace(const std::vector<int>& scales, int n, int d,
                                  ConvMode mode, Normalization norm) {
  const int n1 = (d == 2) ? n : 1;
  const std::int64_t cols = check_guard(n, n1, d);
  Eigen::MatrixXd T = build_forward_matrix(scales, n, n1, d, mode, norm);
  Eigen::MatrixXd G = T.transpose() * T;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw NonInvertibleError("normal matrix is singular or indefinite", {0, 0}, "0/" + std::to_string(n));
  const Eigen::MatrixXd inv =
      llt.solve(Eigen::MatrixXd::Identity(cols, cols));
  return inv.trace() / static_cast<double>(cols);
}

}  // namespace msr
