// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace msr {

/// Thrown when an exact-zero singular value makes a linear system
/// non-invertible. Carries the offending frequency so callers (and the CLI,
/// which maps this to exit code 2) can name it.
class NonInvertibleError : public std::runtime_error {
 public:
  NonInvertibleError(std::string what, std::array<int, 2> freq_index,
                     std::string omega_fraction)
      : std::runtime_error(std::move(what)),
        freq_index_(freq_index),
        omega_fraction_(std::move(omega_fraction)) {}

  // Grid index of the zero frequency; second entry is 0 for 1-D.
  const std::array<int, 2>& freq_index() const { return freq_index_; }
  // omega/(2*pi) as an exact fraction string, e.g. "330/990".
  const std::string& omega_fraction() const { return omega_fraction_; }

 private:
  std::array<int, 2> freq_index_;
  std::string omega_fraction_;
};

}  // namespace msr
