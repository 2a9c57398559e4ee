// SPDX-License-Identifier: Apache-2.0
#include "msr/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace msr {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  Plan(int n0, int n1, int sign) : count_(static_cast<std::size_t>(n0) * n1) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count_));
    if (!buf_) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = (n1 == 1) ? fftw_plan_dft_1d(n0, buf_, buf_, sign, FFTW_ESTIMATE)
                      : fftw_plan_dft_2d(n0, n1, buf_, buf_, sign, FFTW_ESTIMATE);
    if (!plan_) {
      fftw_free(buf_);
      throw std::runtime_error("fftw plan creation failed");
    }
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void execute(std::complex<double>* inout) const {
    // std::complex<double> is layout-compatible with fftw_complex.
    std::memcpy(static_cast<void*>(buf_), static_cast<const void*>(inout),
                sizeof(fftw_complex) * count_);
    fftw_execute(plan_);
    std::memcpy(static_cast<void*>(inout), static_cast<const void*>(buf_),
                sizeof(fftw_complex) * count_);
  }

 private:
  std::size_t count_;
  fftw_complex* buf_;
  fftw_plan plan_;
};

const Plan& cached_plan(int n0, int n1, int sign) {
  thread_local std::map<std::tuple<int, int, int>, Plan> cache;
  auto key = std::make_tuple(n0, n1, sign);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.try_emplace(key, n0, n1, sign).first;
  return it->second;
}

}  // namespace

std::vector<std::complex<double>> dft_forward(const GridSignal& s) {
  const int n0 = s.extent(0), n1 = s.extent(1);
  std::vector<std::complex<double>> x(s.size());
  for (std::int64_t i = 0; i < s.size(); ++i) x[i] = s[i];
  cached_plan(n0, n1, FFTW_FORWARD).execute(x.data());
  return x;
}

GridSignal dft_inverse_real(const std::vector<std::complex<double>>& spectrum,
                            int n0, int n1, int dims) {
  const std::int64_t total = static_cast<std::int64_t>(n0) * n1;
  if (static_cast<std::int64_t>(spectrum.size()) != total)
    throw std::invalid_argument("spectrum size mismatch");
  std::vector<std::complex<double>> x = spectrum;
  cached_plan(n0, n1, FFTW_BACKWARD).execute(x.data());
  GridSignal out = (dims == 1) ? GridSignal(n0) : GridSignal(n0, n1);
  const double inv = 1.0 / static_cast<double>(total);
  for (std::int64_t i = 0; i < total; ++i) out[i] = x[i].real() * inv;
  return out;
}

GridSignal cyclic_convolve(const GridSignal& a, const GridSignal& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("shape mismatch");
  auto fa = dft_forward(a);
  auto fb = dft_forward(b);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  return dft_inverse_real(fa, a.extent(0), a.extent(1), a.dims());
}

}  // namespace msr
