// SPDX-License-Identifier: Apache-2.0
#include "msr/local.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "msr/forward.hpp"

namespace msr {
namespace {

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

// x with a^{-1} * x = 1 (mod m), for gcd(a, m) = 1, result in [0, m).
std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = m, new_r = a % m;
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    std::swap(t -= q * new_t, new_t);
    std::swap(r -= q * new_r, new_r);
  }
  if (r != 1) throw std::invalid_argument("mod_inverse: arguments not coprime");
  return t < 0 ? t + m : t;
}

GridSignal rescale_to_unit(const GridSignal& y, int k, Normalization norm) {
  if (norm == Normalization::kUnit) return y;
  GridSignal out = y;
  double f = 1.0;
  for (int i = 0; i < y.dims(); ++i) f *= k;
  for (auto& v : out.values()) v *= f;
  return out;
}

}  // namespace

BezoutPlan bezout_plan(int k1, int k2) {
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("box sizes must be >= 1");
  if (std::gcd(k1, k2) != 1)
    throw std::invalid_argument("bezout_plan requires coprime sizes, gcd(" +
                                std::to_string(k1) + "," + std::to_string(k2) +
                                ") = " + std::to_string(std::gcd(k1, k2)));
  BezoutPlan p;
  p.k1 = k1;
  p.k2 = k2;
  if (k1 == 1) {
    // m2 * k2 = m1 + 1 with m2 <= 1: take one k2-window.
    if (k2 == 1)
      throw std::invalid_argument("bezout_plan undefined for sizes (1, 1)");
    p.m2 = 1;
    p.m1 = k2 - 1;
    return p;
  }
  if (k2 == 1)
    throw std::invalid_argument(
        "bezout_plan has no positive solution with k2 = 1; pass (1, " +
        std::to_string(k1) + ") instead");
  // m2 = k2^{-1} (mod k1) lands in [1, k1); then m1 = (m2*k2 - 1)/k1 < k2.
  p.m2 = static_cast<int>(mod_inverse(k2 % k1, k1));
  p.m1 = (p.m2 * k2 - 1) / k1;
  return p;
}

GridSignal local_reconstruct_1d(const GridSignal& y1, const GridSignal& y2,
                                const BezoutPlan& plan, ConvMode mode,
                                Normalization norm) {
  if (y1.dims() != 1 || y2.dims() != 1)
    throw std::invalid_argument("local 1-D reconstruction expects 1-D data");
  if (mode == ConvMode::kFull)
    throw std::invalid_argument("local reconstruction supports valid or cyclic mode");
  if (plan.m2 * plan.k2 != plan.m1 * plan.k1 + 1)
    throw std::invalid_argument("invalid bezout plan");

  const GridSignal u1 = rescale_to_unit(y1, plan.k1, norm);
  const GridSignal u2 = rescale_to_unit(y2, plan.k2, norm);
  const GridSignal Y1 = aggregate_scale(u1, plan.k1, plan.m1, mode);
  const GridSignal Y2 = aggregate_scale(u2, plan.k2, plan.m2, mode);

  if (mode == ConvMode::kCyclic) {
    const int n = Y1.extent(0);
    if (Y2.extent(0) != n)
      throw std::invalid_argument("measurement lengths disagree");
    GridSignal u(n);
    for (int a = 0; a < n; ++a) u[a] = Y2[a] - Y1[wrap(a + 1, n)];
    return u;
  }
  // valid: Y2 has n-K samples, Y1 has n-K+1; u(a) defined for a < n-K.
  const int m = Y2.extent(0);
  if (Y1.extent(0) != m + 1)
    throw std::invalid_argument("measurement lengths disagree");
  GridSignal u(m);
  for (int a = 0; a < m; ++a) u[a] = Y2[a] - Y1[a + 1];
  return u;
}

CrtPlan crt_plan(int k1, int k2, int k3) {
  if (k1 < 1 || k2 < 1 || k3 < 1) throw std::invalid_argument("box sizes must be >= 1");
  if (std::gcd(k1, k2) != 1 || std::gcd(k1, k3) != 1 || std::gcd(k2, k3) != 1)
    throw std::invalid_argument("crt_plan requires pairwise coprime sizes");
  // At most one even size survives pairwise coprimality; park it away from
  // the k3 slot so that 2 is invertible mod k3.
  if (k3 % 2 == 0) {
    if (k2 % 2 == 1)
      std::swap(k2, k3);
    else
      std::swap(k1, k3);
  }
  CrtPlan p;
  p.k1 = k1;
  p.k2 = k2;
  p.k3 = k3;

  // k = 0 (mod k1), k = -1 (mod k2), 2k = -1 (mod k3).
  const std::int64_t r2 = (k2 - 1) % k2;
  const std::int64_t r3 = (mod_inverse(2, k3) * ((k3 - 1) % k3)) % k3;
  // Garner-style combination, smallest positive representative.
  std::int64_t mod = k1;
  std::int64_t k = 0;  // k = 0 (mod k1)
  {
    const std::int64_t inc = mod_inverse(mod % k2, k2) * ((r2 - k) % k2 + k2) % k2;
    k += mod * inc;
    mod *= k2;
  }
  {
    const std::int64_t inc = mod_inverse(mod % k3, k3) * ((r3 - k) % k3 + k3) % k3;
    k += mod * inc;
    mod *= k3;
  }
  if (k == 0) k = mod;
  p.k = k;
  p.m1 = k / k1;
  p.m2 = (k + 1) / k2;
  p.m3 = (2 * k + 1) / k3;
  if (p.m1 * k1 != p.k || p.m2 * k2 != p.k + 1 || p.m3 * k3 != 2 * p.k + 1)
    throw std::logic_error("crt_plan: congruence solve failed");
  return p;
}

GridSignal local_reconstruct_2d(const MeasurementSet& ms, const CrtPlan& plan) {
  ms.validate();
  if (ms.dims != 2) throw std::invalid_argument("local 2-D reconstruction expects 2-D data");
  if (ms.mode == ConvMode::kFull)
    throw std::invalid_argument("local reconstruction supports valid or cyclic mode");

  auto find_scale = [&](int k) -> const GridSignal& {
    for (std::size_t j = 0; j < ms.scales.size(); ++j)
      if (ms.scales[j] == k) return ms.data[j];
    throw std::invalid_argument("measurement set lacks scale " + std::to_string(k));
  };

  const std::int64_t big = plan.k;
  const int n0 = ms.source_shape[0], n1 = ms.source_shape[1];
  if (big > (1 << 20)) throw std::invalid_argument("aggregated scale too large");
  const int K = static_cast<int>(big);

  const GridSignal Y1 =
      aggregate_scale(rescale_to_unit(find_scale(plan.k1), plan.k1, ms.norm),
                      plan.k1, static_cast<int>(plan.m1), ms.mode);
  const GridSignal Y2 =
      aggregate_scale(rescale_to_unit(find_scale(plan.k2), plan.k2, ms.norm),
                      plan.k2, static_cast<int>(plan.m2), ms.mode);
  const GridSignal Y3 =
      aggregate_scale(rescale_to_unit(find_scale(plan.k3), plan.k3, ms.norm),
                      plan.k3, static_cast<int>(plan.m3), ms.mode);

  // Five-window packing: u(a,b) = Y1(a+1,b-K) + Y1(a-K,b+1)
  //                             + Y2(a,b) + Y2(a-K,b-K) - Y3(a-K,b-K),
  // with Y1 at scale K, Y2 at K+1, Y3 at 2K+1.
  if (ms.mode == ConvMode::kCyclic) {
    if (n0 < 2 * K + 1 || n1 < 2 * K + 1)
      throw std::invalid_argument("grid must satisfy n >= 2k+1 (k = " +
                                  std::to_string(K) + ")");
    GridSignal u(n0, n1);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < n0; ++a)
      for (int b = 0; b < n1; ++b) {
        const int am = wrap(a - K, n0), bm = wrap(b - K, n1);
        u.at(a, b) = Y1.at(wrap(a + 1, n0), bm) + Y1.at(am, wrap(b + 1, n1)) +
                     Y2.at(a, b) + Y2.at(am, bm) - Y3.at(am, bm);
      }
    return u;
  }
  // valid: interior pixels a,b in [K, n-K-1]; Y indices are window starts.
  const int out0 = n0 - 2 * K, out1 = n1 - 2 * K;
  if (out0 < 1 || out1 < 1)
    throw std::invalid_argument("valid-mode interior is empty (margin " +
                                std::to_string(K) + ")");
  GridSignal u(out0, out1);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < out0; ++i)
    for (int j = 0; j < out1; ++j) {
      const int a = i + K, b = j + K;
      u.at(i, j) = Y1.at(a + 1, b - K) + Y1.at(a - K, b + 1) + Y2.at(a, b) +
                   Y2.at(a - K, b - K) - Y3.at(a - K, b - K);
    }
  return u;
}

GridSignal nullspace_witness(int k1, int k2, int n) {
  if (k1 < 2 || k2 < 2)
    throw std::invalid_argument("witness requires box sizes >= 2");
  if (n < std::max(k1, k2))
    throw std::invalid_argument("n too small to host a periodic witness");
  // 1-D witness for box k: the zero-sum pattern (1, -1, 0, ..., 0) tiled
  // k-periodically; every k consecutive samples sum to zero.
  auto witness_1d = [&](int k) {
    std::vector<double> x(n);
    for (int t = 0; t < n; ++t) {
      const int r = t % k;
      x[t] = (r == 0) ? 1.0 : (r == 1 ? -1.0 : 0.0);
    }
    return x;
  };
  const std::vector<double> x1 = witness_1d(k1);
  const std::vector<double> x2 = witness_1d(k2);
  GridSignal w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w.at(i, j) = x1[i] * x2[j];
  return w;
}

}  // namespace msr
