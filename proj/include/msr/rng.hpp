// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

// Counter-based seeded randomness.
//
// Every draw is a pure function of (stream, counter), so results do not
// depend on evaluation order: serial and OpenMP runs produce bit-identical
// noise. Stream-splitting rule:
//
//   stream  = derive_stream(seed, stream_id)   // one stream per scale/trial
//   value i = uniform01(stream, i)             // or gaussian(stream, i)
//
// gaussian(stream, i) consumes counters 2i and 2i+1 of its stream, so a
// stream must not mix uniform and gaussian draws.

namespace msr {

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

/// splitmix64 output function; mix64(x + n*kGolden64) over n = 0,1,2,... is
/// exactly the splitmix64 sequence seeded with x.
inline std::uint64_t mix64(std::uint64_t x) {
  x += kGolden64;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return mix64(seed ^ mix64(stream_id));
}

/// Uniform double in [0, 1), 53-bit resolution.
inline double uniform01(std::uint64_t stream, std::uint64_t counter) {
  return static_cast<double>(mix64(stream + counter * kGolden64) >> 11) *
         0x1.0p-53;
}

/// Standard normal via Box-Muller (cosine branch, one value per counter).
inline double gaussian(std::uint64_t stream, std::uint64_t counter) {
  const double u1 = uniform01(stream, 2 * counter);
  const double u2 = uniform01(stream, 2 * counter + 1);
  // 1 - u1 lies in (0, 1], so the log is finite.
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace msr
