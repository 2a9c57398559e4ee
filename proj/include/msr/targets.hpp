// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msr/signal.hpp"

namespace msr {

enum class TargetKind { kGrating, kPinwheel, kChecker, kUsafLike, kRandom, kFromFile };

TargetKind target_kind_from_string(const std::string& s);
std::string to_string(TargetKind kind);

struct TargetSpec {
  TargetKind kind = TargetKind::kRandom;
  int dims = 1;
  int n0 = 0;
  int n1 = 0;  // ignored for 1-D
  // grating: alternating bright/dark stripe pairs whose width grows by
  // floor(pair_index * bar_growth); bars run across axis 1, widths vary
  // along axis 0.
  int initial_bar = 2;
  double bar_growth = 1.0 / 3.0;
  int sectors = 12;  // pinwheel
  int period = 1;    // checker
  std::uint64_t seed = 0;
  double lo = 0.0, hi = 1.0;  // contrast levels
  std::string path;  // from_file
};

/// Deterministic synthetic target with values in [lo, hi].
GridSignal make_target(const TargetSpec& spec);

/// Stripe layout of the grating along its varying axis: (start, width,
/// bright) triples, in order. Exposed so tests can locate stripes of a
/// given width.
struct GratingSegment {
  int start = 0;
  int width = 0;
  bool bright = false;
};
std::vector<GratingSegment> grating_segments(int n, int initial_bar, double bar_growth);

}  // namespace msr
