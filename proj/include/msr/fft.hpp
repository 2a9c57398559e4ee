// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "msr/signal.hpp"

namespace msr {

// Thin FFTW front end. Convention:
//   forward:  X(j) = sum_t x(t) e^{-2 pi i j t / n}   (per axis)
//   inverse:  x(t) = (1/N) sum_j X(j) e^{+2 pi i j t / n}
// Plans are cached per thread; FFTW's planner is serialized internally, so
// these are safe to call from concurrent trials.

std::vector<std::complex<double>> dft_forward(const GridSignal& s);

/// Inverse DFT of an n0 x n1 spectrum (n1 == 1 for 1-D), real part.
GridSignal dft_inverse_real(const std::vector<std::complex<double>>& spectrum,
                            int n0, int n1, int dims);

/// Cyclic convolution of equal-shape signals via the DFT.
GridSignal cyclic_convolve(const GridSignal& a, const GridSignal& b);

}  // namespace msr
