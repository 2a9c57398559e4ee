// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "msr/signal.hpp"
#include "msr/solvers.hpp"

namespace msr {

// End-to-end simulated experiments: predicted vs empirical reconstruction
// error, coprime scans, multi-scale comparisons, and trace convergence.
// Everything is reproducible bit-for-bit given (config, seed): trial t of a
// run draws its noise from derive_stream(seed, t), independent of execution
// order.

struct NoiseExperimentConfig {
  std::vector<int> scales;
  ConvMode mode = ConvMode::kCyclic;
  double sigma = 0.05;
  int trials = 256;
  SolverMethod method = SolverMethod::kFourier;
  double lambda = 0.0;
  std::uint64_t seed = 1;
};

struct ScaleCountRow {
  int scale_count = 0;
  std::vector<int> scales;
  double rmse = 0.0;
  // fraction of residual DFT energy on the common-blindspot frequency set
  // (only meaningful for the two-scale row)
  double blindspot_energy_fraction = 0.0;
};

struct ExperimentReport {
  // config echo
  std::vector<int> scales;
  int n0 = 0, n1 = 1, dims = 1;
  ConvMode mode = ConvMode::kCyclic;
  Normalization norm = Normalization::kMean;
  double sigma = 0.0, lambda = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::string method;

  double predicted_rmse_factor = 0.0;
  double empirical_rmse_factor = 0.0;  // sqrt(mean over trials of |e|^2/(n^d s^2))
  double empirical_rmse_std = 0.0;     // std of the per-trial rmse factor
  double ratio = 0.0;                  // empirical / predicted
  bool exact_noiseless = false;        // sigma == 0: empirical factor is 0/0-free flag
  // 3-sigma band for the ratio from chi-square concentration of the
  // squared-error average; the formula is recorded alongside.
  double band_low = 0.0, band_high = 0.0;
  std::string band_formula;

  std::vector<ScaleCountRow> per_scale_count;
  bool strictly_decreasing = false;
  int blindspot_mask_width = 0;  // grid cells; scale-count runs only
  double wall_ms = 0.0;

  nlohmann::json to_json() const;
};

/// Simulates `trials` noisy acquisitions of the target, reconstructs each,
/// and compares the averaged squared error against sigma^2 * trace_normalized.
/// Measurements use kMean normalization (the convention the prediction is
/// stated in). Methods: kFourier (cyclic) or kLsqr.
ExperimentReport run_noise_experiment(const GridSignal& target,
                                      const NoiseExperimentConfig& cfg);

struct CoprimeCell {
  std::vector<int> scales;
  bool coprime = false;
  double rmse_factor = 0.0;  // +inf when non-invertible
};

struct CoprimeScanResult {
  int kmax = 0;
  int n = 0;
  int dims = 1;
  std::vector<CoprimeCell> cells;
  nlohmann::json to_json() const;
};

/// Predicted rmse factors over scale pairs (d=1) or triples (d=2, capped at
/// `max_cells`). Non-coprime combinations are flagged non-invertible.
CoprimeScanResult coprime_scan(int kmax, int n, int d, ConvMode mode,
                               int max_cells = 512);

/// Reconstructs with {k1}, {k1,k2}, {k1,k2,k3} at fixed lambda from one
/// noisy cyclic acquisition; reports RMSE per subset and the two-scale
/// residual's blindspot energy fraction.
ExperimentReport scale_count_comparison(const GridSignal& target,
                                        const std::array<int, 3>& scales,
                                        double lambda, double sigma,
                                        std::uint64_t seed);

/// Grid frequencies within `width_cells` grid steps of the common blindspot
/// set of two scales (crossings of the per-axis zero sets), as a flat n*n
/// mask. The noise amplification around each crossing decays like the
/// inverse squared distance, so a few cells of width capture its energy.
std::vector<bool> blindspot_mask_2d(int k1, int k2, int n, int width_cells = 1);
/// Same for a single scale: the zero lines of one box filter.
std::vector<bool> blindspot_mask_single_2d(int k, int n, int width_cells = 1);

struct TraceSweepRow {
  int n = 0;
  double cyclic_rmse_factor = 0.0;
  double valid_rmse_factor = 0.0;  // NaN where the dense build was skipped
};

struct TraceSweep {
  std::vector<int> scales;
  int dims = 1;
  std::vector<TraceSweepRow> rows;
  double asymptotic_rmse_factor = 0.0;
  nlohmann::json to_json() const;
};

/// sqrt(trace/n^d) for cyclic (all n) and valid (n <= dense_limit) maps,
/// plus the asymptotic quadrature value.
TraceSweep trace_convergence_sweep(const std::vector<int>& scales, int d,
                                   const std::vector<int>& n_list,
                                   int dense_limit = 400);

}  // namespace msr
