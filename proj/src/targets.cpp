// SPDX-License-Identifier: Apache-2.0
#include "msr/targets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "msr/io.hpp"
#include "msr/rng.hpp"

namespace msr {

TargetKind target_kind_from_string(const std::string& s) {
  if (s == "grating") return TargetKind::kGrating;
  if (s == "pinwheel") return TargetKind::kPinwheel;
  if (s == "checker") return TargetKind::kChecker;
  if (s == "usaf") return TargetKind::kUsafLike;
  if (s == "random") return TargetKind::kRandom;
  if (s == "file") return TargetKind::kFromFile;
  throw std::invalid_argument("unknown target kind: " + s);
}

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::kGrating: return "grating";
    case TargetKind::kPinwheel: return "pinwheel";
    case TargetKind::kChecker: return "checker";
    case TargetKind::kUsafLike: return "usaf";
    case TargetKind::kRandom: return "random";
    case TargetKind::kFromFile: return "file";
  }
  return "?";
}

std::vector<GratingSegment> grating_segments(int n, int initial_bar, double bar_growth) {
  if (initial_bar < 1) throw std::invalid_argument("initial bar width must be >= 1");
  if (bar_growth < 0.0) throw std::invalid_argument("bar growth must be >= 0");
  std::vector<GratingSegment> segs;
  int at = 0;
  for (int pair = 0; at < n; ++pair) {
    const int w = initial_bar + static_cast<int>(pair * bar_growth);
    for (int half = 0; half < 2 && at < n; ++half) {
      GratingSegment s;
      s.start = at;
      s.width = std::min(w, n - at);
      s.bright = (half == 0);
      segs.push_back(s);
      at += s.width;
    }
  }
  return segs;
}

namespace {

std::vector<double> grating_line(const TargetSpec& spec, int n) {
  std::vector<double> line(n, spec.lo);
  for (const auto& seg : grating_segments(n, spec.initial_bar, spec.bar_growth))
    if (seg.bright)
      for (int i = seg.start; i < seg.start + seg.width; ++i) line[i] = spec.hi;
  return line;
}

void fill_usaf(GridSignal& g, const TargetSpec& spec) {
  // Nested three-bar triplets, halving in size per group, horizontal and
  // vertical variants side by side.
  const int n0 = g.extent(0), n1 = g.extent(1);
  for (auto& v : g.values()) v = spec.lo;
  int bar = std::max(1, n0 / 16);
  int r0 = bar, c0 = bar;
  while (bar >= 1 && r0 + 5 * bar < n0 && c0 + 11 * bar < n1) {
    // horizontal bars
    for (int b = 0; b < 3; ++b)
      for (int i = 0; i < bar; ++i)
        for (int j = 0; j < 5 * bar && c0 + j < n1; ++j)
          g.at(r0 + 2 * b * bar + i, c0 + j) = spec.hi;
    // vertical bars
    const int cv = c0 + 6 * bar;
    for (int b = 0; b < 3; ++b)
      for (int j = 0; j < bar; ++j)
        for (int i = 0; i < 5 * bar && r0 + i < n0; ++i)
          g.at(r0 + i, cv + 2 * b * bar + j) = spec.hi;
    r0 += 6 * bar;
    bar /= 2;
  }
}

}  // namespace

GridSignal make_target(const TargetSpec& spec) {
  if (spec.dims != 1 && spec.dims != 2)
    throw std::invalid_argument("dims must be 1 or 2");
  if (spec.kind != TargetKind::kFromFile && spec.n0 < 1)
    throw std::invalid_argument("target extent must be >= 1");
  const int n0 = spec.n0;
  const int n1 = (spec.dims == 2) ? (spec.n1 > 0 ? spec.n1 : spec.n0) : 1;
  if (spec.lo > spec.hi) throw std::invalid_argument("lo must be <= hi");

  switch (spec.kind) {
    case TargetKind::kGrating: {
      const std::vector<double> line = grating_line(spec, n0);
      if (spec.dims == 1) {
        GridSignal g(n0);
        for (int i = 0; i < n0; ++i) g[i] = line[i];
        return g;
      }
      GridSignal g(n0, n1);
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) g.at(i, j) = line[i];
      return g;
    }
    case TargetKind::kPinwheel: {
      if (spec.dims != 2) throw std::invalid_argument("pinwheel is 2-D only");
      if (spec.sectors < 2) throw std::invalid_argument("pinwheel needs >= 2 sectors");
      GridSignal g(n0, n1);
      const double cy = 0.5 * (n0 - 1), cx = 0.5 * (n1 - 1);
      const double step = 2.0 * std::numbers::pi / spec.sectors;
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
          const double ang = std::atan2(i - cy, j - cx) + std::numbers::pi;
          const int sector = std::min(spec.sectors - 1,
                                      static_cast<int>(ang / step));
          g.at(i, j) = (sector % 2 == 0) ? spec.hi : spec.lo;
        }
      return g;
    }
    case TargetKind::kChecker: {
      if (spec.period < 1) throw std::invalid_argument("checker period must be >= 1");
      if (spec.dims == 1) {
        GridSignal g(n0);
        for (int i = 0; i < n0; ++i)
          g[i] = ((i / spec.period) % 2 == 0) ? spec.hi : spec.lo;
        return g;
      }
      GridSignal g(n0, n1);
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
          g.at(i, j) = (((i / spec.period) + (j / spec.period)) % 2 == 0) ? spec.hi
                                                                          : spec.lo;
      return g;
    }
    case TargetKind::kUsafLike: {
      if (spec.dims != 2) throw std::invalid_argument("usaf target is 2-D only");
      GridSignal g(n0, n1);
      fill_usaf(g, spec);
      return g;
    }
    case TargetKind::kRandom: {
      const std::uint64_t stream = derive_stream(spec.seed, 0x7a46);
      GridSignal g = (spec.dims == 1) ? GridSignal(n0) : GridSignal(n0, n1);
      for (std::int64_t i = 0; i < g.size(); ++i)
        g[i] = spec.lo + (spec.hi - spec.lo) *
                             uniform01(stream, static_cast<std::uint64_t>(i));
      return g;
    }
    case TargetKind::kFromFile:
      return read_signal(spec.path);
  }
  throw std::logic_error("unreachable");
}

}  // namespace msr
