// SPDX-License-Identifier: Apache-2.0
#include "msr/experiment.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "msr/fft.hpp"
#include "msr/forward.hpp"
#include "msr/rng.hpp"
#include "msr/spectral.hpp"

namespace msr {
namespace {

double wall_ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

GridSignal solve(const MeasurementSet& ms, SolverMethod method, double lambda) {
  switch (method) {
    case SolverMethod::kFourier:
      return fourier_reconstruct(ms, lambda);
    case SolverMethod::kLsqr: {
      ReconstructionConfig cfg;
      cfg.method = SolverMethod::kLsqr;
      cfg.lambda = lambda;
      return lsqr_reconstruct(ms, cfg).estimate;
    }
    default:
      throw std::invalid_argument("noise experiment supports fourier or lsqr");
  }
}

std::string method_name(SolverMethod m) {
  switch (m) {
    case SolverMethod::kFourier: return "fourier";
    case SolverMethod::kLsqr: return "lsqr";
    case SolverMethod::kLocal: return "local";
    case SolverMethod::kDenseOracle: return "oracle";
  }
  return "?";
}

}  // namespace

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["config"] = {{"scales", scales},
                 {"n0", n0},
                 {"n1", n1},
                 {"dims", dims},
                 {"mode", to_string(mode)},
                 {"normalization", to_string(norm)},
                 {"sigma", sigma},
                 {"lambda", lambda},
                 {"trials", trials},
                 {"seed", seed},
                 {"method", method}};
  j["predicted_rmse_factor"] = predicted_rmse_factor;
  j["empirical_rmse_factor"] = empirical_rmse_factor;
  j["empirical_rmse_std"] = empirical_rmse_std;
  j["ratio"] = ratio;
  j["exact_noiseless"] = exact_noiseless;
  j["band"] = {{"low", band_low}, {"high", band_high}, {"formula", band_formula}};
  if (!per_scale_count.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : per_scale_count)
      rows.push_back({{"scale_count", r.scale_count},
                      {"scales", r.scales},
                      {"rmse", r.rmse},
                      {"blindspot_energy_fraction", r.blindspot_energy_fraction}});
    j["per_scale_count"] = rows;
    j["strictly_decreasing"] = strictly_decreasing;
    j["blindspot_mask_width_cells"] = blindspot_mask_width;
  }
  j["wall_ms"] = wall_ms;
  return j;
}

ExperimentReport run_noise_experiment(const GridSignal& target,
                                      const NoiseExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");

  const int d = target.dims();
  const int n = target.extent(0);
  if (d == 2 && target.extent(1) != n)
    throw std::invalid_argument("noise experiment expects square 2-D targets");

  ExperimentReport rep;
  rep.scales = cfg.scales;
  rep.n0 = target.extent(0);
  rep.n1 = target.extent(1);
  rep.dims = d;
  rep.mode = cfg.mode;
  rep.norm = Normalization::kMean;
  rep.sigma = cfg.sigma;
  rep.lambda = cfg.lambda;
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  rep.method = method_name(cfg.method);

  // Prediction is exact for the cyclic map; it is the reference the
  // empirical factor is compared against.
  const SpectralProfile profile = stacked_profile(cfg.scales, n, d);
  const ErrorPrediction pred = predicted_mse(profile, cfg.sigma);
  rep.predicted_rmse_factor = pred.rmse_factor;

  const MeasurementSet clean = apply_T(target, cfg.scales, cfg.mode,
                                       Normalization::kMean);
  const double npix = static_cast<double>(target.size());

  if (cfg.sigma == 0.0) {
    rep.exact_noiseless = true;
    rep.empirical_rmse_factor = 0.0;
    rep.ratio = 0.0;
    rep.wall_ms = wall_ms_since(t0);
    return rep;
  }

  std::vector<double> sqerr(cfg.trials, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < cfg.trials; ++t) {
    const MeasurementSet noisy = add_noise(clean, cfg.sigma, derive_stream(cfg.seed, t));
    const GridSignal est = solve(noisy, cfg.method, cfg.lambda);
    double acc = 0.0;
    for (std::int64_t i = 0; i < est.size(); ++i) {
      const double e = est[i] - target[i];
      acc += e * e;
    }
    sqerr[t] = acc / (npix * cfg.sigma * cfg.sigma);
  }

  double mean = 0.0;
  for (double v : sqerr) mean += v;
  mean /= cfg.trials;
  double var = 0.0;
  double sqrt_mean = 0.0;
  for (double v : sqerr) {
    var += (v - mean) * (v - mean);
    sqrt_mean += std::sqrt(v);
  }
  var /= std::max(1, cfg.trials - 1);
  sqrt_mean /= cfg.trials;
  double sqrt_var = 0.0;
  for (double v : sqerr) sqrt_var += (std::sqrt(v) - sqrt_mean) * (std::sqrt(v) - sqrt_mean);
  sqrt_var /= std::max(1, cfg.trials - 1);

  rep.empirical_rmse_factor = std::sqrt(mean);
  rep.empirical_rmse_std = std::sqrt(sqrt_var);
  rep.ratio = rep.empirical_rmse_factor / rep.predicted_rmse_factor;

  // The squared-error average concentrates like a generalized chi-square:
  // std(mean)/mean ~= std(sample)/ (mean sqrt(trials)); the sqrt halves the
  // relative deviation.
  const double rel = std::sqrt(var) / (mean * std::sqrt(static_cast<double>(cfg.trials)));
  rep.band_low = std::sqrt(std::max(0.0, 1.0 - 3.0 * rel));
  rep.band_high = std::sqrt(1.0 + 3.0 * rel);
  rep.band_formula =
      "ratio in sqrt(1 -+ 3*sd(|e|^2/(n^d sigma^2))/(mean*sqrt(trials)))";
  rep.wall_ms = wall_ms_since(t0);
  return rep;
}

nlohmann::json CoprimeScanResult::to_json() const {
  nlohmann::json j;
  j["kmax"] = kmax;
  j["n"] = n;
  j["dims"] = dims;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json e;
    e["scales"] = c.scales;
    e["coprime"] = c.coprime;
    if (std::isfinite(c.rmse_factor))
      e["rmse_factor"] = c.rmse_factor;
    else
      e["rmse_factor"] = "inf";
    arr.push_back(e);
  }
  j["cells"] = arr;
  return j;
}

CoprimeScanResult coprime_scan(int kmax, int n, int d, ConvMode mode, int max_cells) {
  if (mode != ConvMode::kCyclic)
    throw std::invalid_argument("coprime scan predicts cyclic-mode errors");
  if (kmax < 2) throw std::invalid_argument("kmax must be >= 2");
  CoprimeScanResult res;
  res.kmax = kmax;
  res.n = n;
  res.dims = d;

  auto add_cell = [&](std::vector<int> scales) {
    CoprimeCell cell;
    cell.scales = scales;
    cell.coprime = pairwise_coprime(scales);
    if (!cell.coprime) {
      // Shared factors drive the condition number to infinity with n; on
      // grids divisible by the shared factor the zero is exact.
      cell.rmse_factor = std::numeric_limits<double>::infinity();
    } else {
      // trace only; skip the asymptotic quadrature predicted_mse would run
      const SpectralProfile p = stacked_profile(scales, n, d);
      double sum = 0.0;
      for (double sv : p.sigma_values) sum += 1.0 / (sv * sv);
      cell.rmse_factor = std::sqrt(sum / static_cast<double>(p.sigma_values.size()));
    }
    res.cells.push_back(std::move(cell));
  };

  if (d == 1) {
    for (int k1 = 2; k1 <= kmax; ++k1)
      for (int k2 = k1 + 1; k2 <= kmax; ++k2) add_cell({k1, k2});
  } else if (d == 2) {
    int count = 0;
    for (int k1 = 2; k1 <= kmax && count < max_cells; ++k1)
      for (int k2 = k1 + 1; k2 <= kmax && count < max_cells; ++k2)
        for (int k3 = k2 + 1; k3 <= kmax && count < max_cells; ++k3) {
          add_cell({k1, k2, k3});
          ++count;
        }
  } else {
    throw std::invalid_argument("dims must be 1 or 2");
  }
  return res;
}

namespace {

// Grid indices within `width` grid steps (each 2*pi/n) of any zero 2*pi*m/k.
std::vector<bool> near_zero_axis(int k, int n, int width) {
  std::vector<bool> near(n, false);
  for (int m = 1; m < k; ++m) {
    const double pos = static_cast<double>(m) * n / k;  // in grid units
    const int lo = static_cast<int>(std::floor(pos - width));
    const int hi = static_cast<int>(std::ceil(pos + width));
    for (int j = lo; j <= hi; ++j) {
      if (std::abs(pos - j) > width) continue;
      near[((j % n) + n) % n] = true;
    }
  }
  return near;
}

}  // namespace

std::vector<bool> blindspot_mask_2d(int k1, int k2, int n, int width_cells) {
  const auto a1 = near_zero_axis(k1, n, width_cells);
  const auto a2 = near_zero_axis(k2, n, width_cells);
  std::vector<bool> mask(static_cast<std::size_t>(n) * n, false);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool cross = (a1[i] && a2[j]) || (a2[i] && a1[j]);
      if (cross) mask[static_cast<std::size_t>(i) * n + j] = true;
    }
  return mask;
}

std::vector<bool> blindspot_mask_single_2d(int k, int n, int width_cells) {
  const auto a = near_zero_axis(k, n, width_cells);
  std::vector<bool> mask(static_cast<std::size_t>(n) * n, false);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a[i] || a[j]) mask[static_cast<std::size_t>(i) * n + j] = true;
  return mask;
}

ExperimentReport scale_count_comparison(const GridSignal& target,
                                        const std::array<int, 3>& scales,
                                        double lambda, double sigma,
                                        std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  if (target.dims() != 2)
    throw std::invalid_argument("scale-count comparison is a 2-D experiment");
  std::vector<int> all(scales.begin(), scales.end());
  if (!pairwise_coprime(all))
    throw std::invalid_argument("scales must be pairwise coprime");
  const int n = target.extent(0);
  if (target.extent(1) != n) throw std::invalid_argument("square targets only");

  ExperimentReport rep;
  rep.scales = all;
  rep.n0 = n;
  rep.n1 = n;
  rep.dims = 2;
  rep.mode = ConvMode::kCyclic;
  rep.norm = Normalization::kMean;
  rep.sigma = sigma;
  rep.lambda = lambda;
  rep.trials = 1;
  rep.seed = seed;
  rep.method = "fourier";

  // One acquisition of all three scales; subsets reuse the same noisy data.
  MeasurementSet noisy = add_noise(
      apply_T(target, all, ConvMode::kCyclic, Normalization::kMean), sigma, seed);

  rep.blindspot_mask_width = std::max(1, n / 64);
  const double npix = static_cast<double>(target.size());
  for (int count = 1; count <= 3; ++count) {
    const MeasurementSet subset = noisy.head_scales(count);
    const GridSignal est = fourier_reconstruct(subset, lambda);
    ScaleCountRow row;
    row.scale_count = count;
    row.scales = subset.scales;
    double acc = 0.0;
    GridSignal residual(n, n);
    for (std::int64_t i = 0; i < est.size(); ++i) {
      const double e = est[i] - target[i];
      residual[i] = e;
      acc += e * e;
    }
    row.rmse = std::sqrt(acc / npix);
    if (count == 2) {
      const auto mask = blindspot_mask_2d(subset.scales[0], subset.scales[1], n,
                                          rep.blindspot_mask_width);
      const auto spec = dft_forward(residual);
      double on = 0.0, total = 0.0;
      for (std::size_t i = 0; i < spec.size(); ++i) {
        const double e = std::norm(spec[i]);
        total += e;
        if (mask[i]) on += e;
      }
      row.blindspot_energy_fraction = (total > 0.0) ? on / total : 0.0;
    }
    rep.per_scale_count.push_back(std::move(row));
  }
  rep.strictly_decreasing = rep.per_scale_count[0].rmse > rep.per_scale_count[1].rmse &&
                            rep.per_scale_count[1].rmse > rep.per_scale_count[2].rmse;
  rep.wall_ms = wall_ms_since(t0);
  return rep;
}

nlohmann::json TraceSweep::to_json() const {
  nlohmann::json j;
  j["scales"] = scales;
  j["dims"] = dims;
  j["asymptotic_rmse_factor"] = asymptotic_rmse_factor;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json e;
    e["n"] = r.n;
    e["cyclic_rmse_factor"] = r.cyclic_rmse_factor;
    if (std::isfinite(r.valid_rmse_factor))
      e["valid_rmse_factor"] = r.valid_rmse_factor;
    rows_json.push_back(e);
  }
  j["rows"] = rows_json;
  return j;
}

TraceSweep trace_convergence_sweep(const std::vector<int>& scales, int d,
                                   const std::vector<int>& n_list, int dense_limit) {
  TraceSweep sweep;
  sweep.scales = scales;
  sweep.dims = d;
  sweep.asymptotic_rmse_factor = std::sqrt(asymptotic_trace(scales, d));
  for (int n : n_list) {
    TraceSweepRow row;
    row.n = n;
    const SpectralProfile p = stacked_profile(scales, n, d);
    row.cyclic_rmse_factor = predicted_mse(p, 1.0).rmse_factor;
    const std::int64_t cols = (d == 1) ? n : static_cast<std::int64_t>(n) * n;
    row.valid_rmse_factor =
        (cols <= dense_limit)
            ? std::sqrt(valid_mode_trace(scales, n, d))
            : std::numeric_limits<double>::quiet_NaN();
    sweep.rows.push_back(row);
  }
  return sweep;
}

}  // namespace msr
