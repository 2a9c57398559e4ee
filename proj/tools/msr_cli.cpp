// SPDX-License-Identifier: Apache-2.0
//
// msr — multiscale super-resolution toolbox.
//
// Subcommands: synth, measure, reconstruct, analyze, experiment, oracle.
// Exit codes: 0 success, 1 flag/IO errors, 2 non-invertible configuration.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "msr/dense.hpp"
#include "msr/errors.hpp"
#include "msr/experiment.hpp"
#include "msr/forward.hpp"
#include "msr/io.hpp"
#include "msr/local.hpp"
#include "msr/solvers.hpp"
#include "msr/spectral.hpp"
#include "msr/targets.hpp"

namespace {

std::vector<int> parse_scales(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  if (out.empty()) throw CLI::ValidationError("--scales", "no scales given");
  return out;
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += " ";
    s += argv[i];
  }
  return s;
}

struct CommonOut {
  std::string out;
  bool binary = false;
};

void write_target_files(const CommonOut& o, const msr::GridSignal& g,
                        const std::string& cmdline, std::uint64_t seed,
                        const nlohmann::json& spec_echo) {
  msr::Manifest m;
  m.kind = "target";
  m.command_line = cmdline;
  m.seed = seed;
  m.extra = spec_echo;
  std::vector<std::string> files;
  const std::string csv = o.out + ".csv";
  msr::write_csv(csv, g);
  files.push_back(csv);
  if (g.dims() == 2) {
    const std::string pgm = o.out + ".pgm";
    msr::write_pgm(pgm, g, o.binary);
    files.push_back(pgm);
  }
  for (const auto& f : files)
    m.payloads.push_back(
        {std::filesystem::path(f).filename().string(), msr::sha256_file(f)});
  m.extra["data"] = m.payloads.front().path;
  msr::write_manifest(o.out + ".manifest.json", m);
}

msr::GridSignal load_target(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    const msr::Manifest m = msr::read_manifest(path);
    const auto dir = std::filesystem::path(path).parent_path();
    const std::string rel = m.extra.at("data").get<std::string>();
    return msr::read_signal(dir.empty() ? rel : (dir / rel).string());
  }
  return msr::read_signal(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiscale super-resolution: simulate box-binned measurements, "
               "reconstruct, and analyze stability"};
  app.require_subcommand(1);
  const std::string cmdline = join_args(argc, argv);

  // ---- synth -------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic target");
  std::string sy_kind = "random";
  int sy_n = 256, sy_n2 = 0, sy_d = 0, sy_sectors = 12, sy_period = 1, sy_bar0 = 2;
  double sy_growth = 1.0 / 3.0, sy_lo = 0.0, sy_hi = 1.0;
  std::uint64_t sy_seed = 0;
  std::string sy_file;
  CommonOut sy_out;
  synth->add_option("--kind", sy_kind, "grating|pinwheel|checker|usaf|random|file");
  synth->add_option("--n", sy_n, "extent along axis 0");
  synth->add_option("--n2", sy_n2, "extent along axis 1 (default n)");
  synth->add_option("--d", sy_d, "dimensions (default: 2 for 2-D-only kinds, else 1)");
  synth->add_option("--sectors", sy_sectors, "pinwheel sector count");
  synth->add_option("--period", sy_period, "checker period");
  synth->add_option("--bar", sy_bar0, "grating initial bar width");
  synth->add_option("--growth", sy_growth, "grating bar growth per pair");
  synth->add_option("--lo", sy_lo, "dark level");
  synth->add_option("--hi", sy_hi, "bright level");
  synth->add_option("--seed", sy_seed, "seed for random targets");
  synth->add_option("--file", sy_file, "input path for --kind file");
  synth->add_option("--out", sy_out.out, "output prefix")->required();
  synth->add_flag("--binary", sy_out.binary, "write P5 instead of P2 pgm");

  // ---- measure -----------------------------------------------------------
  auto* measure = app.add_subcommand("measure", "simulate multiscale measurements");
  std::string me_target, me_scales, me_mode = "valid", me_norm = "unit";
  double me_sigma = 0.0;
  std::uint64_t me_seed = 0;
  CommonOut me_out;
  measure->add_option("--target", me_target, "target manifest/csv/pgm")->required();
  measure->add_option("--scales", me_scales, "comma-separated box sizes")->required();
  measure->add_option("--mode", me_mode, "valid|full|cyclic");
  measure->add_option("--norm", me_norm, "unit|mean");
  measure->add_option("--sigma", me_sigma, "noise std");
  measure->add_option("--seed", me_seed, "noise seed");
  measure->add_option("--out", me_out.out, "output prefix")->required();
  measure->add_flag("--binary", me_out.binary, "also write P5 pgm snapshots");

  // ---- reconstruct -------------------------------------------------------
  auto* rec = app.add_subcommand("reconstruct", "reconstruct from a measurement set");
  std::string rc_input, rc_method = "fourier", rc_pad = "reject", rc_mode;
  double rc_lambda = 0.0, rc_tol = 1e-10;
  int rc_maxiter = 0;
  CommonOut rc_out;
  rec->add_option("--input", rc_input, "measurement-set manifest")->required();
  rec->add_option("--method", rc_method, "fourier|lsqr|local|oracle");
  rec->add_option("--lambda", rc_lambda, "Tikhonov regularization");
  rec->add_option("--tol", rc_tol, "lsqr stopping tolerance");
  rec->add_option("--max-iter", rc_maxiter, "lsqr iteration cap (0 = 10*n^d)");
  rec->add_option("--pad", rc_pad, "fourier pad policy: reject|zero|reflect");
  rec->add_option("--mode", rc_mode,
                  "expected measurement mode; fails if the manifest disagrees");
  rec->add_option("--out", rc_out.out, "output prefix")->required();
  rec->add_flag("--binary", rc_out.binary, "write P5 instead of P2 pgm");

  // ---- analyze -----------------------------------------------------------
  auto* an = app.add_subcommand("analyze", "spectral profile and error prediction");
  std::string an_scales;
  int an_n = 0, an_d = 1;
  double an_sigma = 1.0;
  std::string an_out;
  an->add_option("--scales", an_scales, "comma-separated box sizes")->required();
  an->add_option("--n", an_n, "grid size per axis")->required();
  an->add_option("--d", an_d, "dimensions");
  an->add_option("--sigma", an_sigma, "noise std for the MSE prediction");
  an->add_option("--out", an_out, "output prefix")->required();

  // ---- experiment ----------------------------------------------------------
  auto* ex = app.add_subcommand("experiment", "end-to-end simulated experiments");
  std::string ex_kind = "noise", ex_scales = "9,11", ex_target, ex_nlist;
  int ex_trials = 256, ex_kmax = 12, ex_n = 1024, ex_d = 1;
  double ex_sigma = 0.05, ex_lambda = 0.0;
  std::uint64_t ex_seed = 1;
  std::string ex_method = "fourier";
  CommonOut ex_out;
  ex->add_option("--kind", ex_kind, "noise|coprime-scan|scale-count|trace-sweep");
  ex->add_option("--scales", ex_scales, "scales for noise/scale-count/trace-sweep");
  ex->add_option("--target", ex_target, "target manifest (default: synthetic)");
  ex->add_option("--trials", ex_trials, "noise trials");
  ex->add_option("--kmax", ex_kmax, "scan upper bound");
  ex->add_option("--n", ex_n, "grid size");
  ex->add_option("--d", ex_d, "dimensions");
  ex->add_option("--sigma", ex_sigma, "noise std");
  ex->add_option("--lambda", ex_lambda, "regularization");
  ex->add_option("--seed", ex_seed, "experiment seed");
  ex->add_option("--method", ex_method, "fourier|lsqr");
  ex->add_option("--n-list", ex_nlist, "comma-separated n values for trace-sweep");
  ex->add_option("--out", ex_out.out, "output prefix")->required();
  ex->add_flag("--binary", ex_out.binary, "write P5 snapshots");

  // ---- oracle --------------------------------------------------------------
  auto* ora = app.add_subcommand("oracle", "dense minimum-norm least squares");
  std::string or_input;
  double or_lambda = 0.0;
  CommonOut or_out;
  ora->add_option("--input", or_input, "measurement-set manifest")->required();
  ora->add_option("--lambda", or_lambda, "Tikhonov regularization");
  ora->add_option("--out", or_out.out, "output prefix")->required();
  ora->add_flag("--binary", or_out.binary, "write P5 instead of P2 pgm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      msr::TargetSpec spec;
      spec.kind = msr::target_kind_from_string(sy_kind);
      const bool twod_default = spec.kind == msr::TargetKind::kPinwheel ||
                                spec.kind == msr::TargetKind::kUsafLike ||
                                spec.kind == msr::TargetKind::kChecker;
      spec.dims = sy_d > 0 ? sy_d : (twod_default ? 2 : 1);
      spec.n0 = sy_n;
      spec.n1 = sy_n2 > 0 ? sy_n2 : sy_n;
      spec.sectors = sy_sectors;
      spec.period = sy_period;
      spec.initial_bar = sy_bar0;
      spec.bar_growth = sy_growth;
      spec.lo = sy_lo;
      spec.hi = sy_hi;
      spec.seed = sy_seed;
      spec.path = sy_file;
      const msr::GridSignal g = msr::make_target(spec);
      nlohmann::json echo = {{"kind", sy_kind},   {"dims", spec.dims},
                             {"n0", spec.n0},     {"n1", spec.n1},
                             {"sectors", spec.sectors}, {"period", spec.period},
                             {"initial_bar", spec.initial_bar},
                             {"bar_growth", spec.bar_growth},
                             {"lo", spec.lo},     {"hi", spec.hi},
                             {"seed", spec.seed}};
      write_target_files(sy_out, g, cmdline, sy_seed, echo);
      return 0;
    }

    if (measure->parsed()) {
      const msr::GridSignal target = load_target(me_target);
      msr::MeasurementSet ms =
          msr::apply_T(target, parse_scales(me_scales),
                       msr::conv_mode_from_string(me_mode),
                       msr::normalization_from_string(me_norm));
      if (me_sigma > 0.0) ms = msr::add_noise(ms, me_sigma, me_seed);
      msr::write_measurement_set(me_out.out, ms, cmdline, me_seed, me_out.binary);
      return 0;
    }

    if (rec->parsed()) {
      const msr::MeasurementSet ms = msr::read_measurement_set(rc_input);
      if (!rc_mode.empty() && msr::conv_mode_from_string(rc_mode) != ms.mode)
        throw std::invalid_argument("measurement set mode is " +
                                    msr::to_string(ms.mode) + ", expected " + rc_mode);
      const auto t0 = std::chrono::steady_clock::now();
      msr::GridSignal est;
      int iterations = 0;
      double residual = 0.0;
      if (rc_method == "fourier") {
        msr::PadPolicy pad = msr::PadPolicy::kReject;
        if (rc_pad == "zero") pad = msr::PadPolicy::kZeroPad;
        else if (rc_pad == "reflect") pad = msr::PadPolicy::kReflectPad;
        else if (rc_pad != "reject") throw std::invalid_argument("bad --pad");
        est = msr::fourier_reconstruct(ms, rc_lambda, pad);
      } else if (rc_method == "lsqr") {
        msr::ReconstructionConfig cfg;
        cfg.method = msr::SolverMethod::kLsqr;
        cfg.lambda = rc_lambda;
        cfg.tol = rc_tol;
        cfg.max_iter = rc_maxiter;
        const msr::LsqrResult r = msr::lsqr_reconstruct(ms, cfg);
        est = r.estimate;
        iterations = r.iterations;
        residual = r.relative_residual;
        if (!r.converged)
          std::cerr << "warning: lsqr hit the iteration cap; result is partial\n";
      } else if (rc_method == "local") {
        if (ms.dims == 1) {
          if (ms.scales.size() != 2)
            throw std::invalid_argument("local 1-D needs exactly two scales");
          const msr::BezoutPlan plan = msr::bezout_plan(ms.scales[0], ms.scales[1]);
          est = msr::local_reconstruct_1d(ms.data[0], ms.data[1], plan, ms.mode,
                                          ms.norm);
        } else {
          if (ms.scales.size() != 3)
            throw std::invalid_argument("local 2-D needs exactly three scales");
          const msr::CrtPlan plan =
              msr::crt_plan(ms.scales[0], ms.scales[1], ms.scales[2]);
          est = msr::local_reconstruct_2d(ms, plan);
        }
      } else if (rc_method == "oracle") {
        est = msr::dense_oracle(ms, rc_lambda);
      } else {
        throw std::invalid_argument("unknown --method " + rc_method);
      }
      const double wall =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                    t0)
              .count();
      msr::write_csv(rc_out.out + ".csv", est);
      if (est.dims() == 2) msr::write_pgm(rc_out.out + ".pgm", est, rc_out.binary);
      nlohmann::json rep = {{"method", rc_method},
                            {"iterations", iterations},
                            {"residual", residual},
                            {"wall_ms", wall},
                            {"lambda", rc_lambda}};
      std::ofstream(rc_out.out + ".report.json") << rep.dump(2) << "\n";
      return 0;
    }

    if (an->parsed()) {
      const std::vector<int> scales = parse_scales(an_scales);
      const msr::SpectralProfile p = msr::stacked_profile(scales, an_n, an_d);
      {
        std::ofstream csv(an_out + ".profile.csv");
        if (an_d == 1) {
          csv << "index,omega,sigma\n";
          for (int j = 0; j < an_n; ++j)
            csv << j << "," << 2.0 * M_PI * j / an_n << "," << p.sigma_values[j]
                << "\n";
        } else {
          csv << "index0,index1,omega0,omega1,sigma\n";
          for (int i = 0; i < an_n; ++i)
            for (int j = 0; j < an_n; ++j)
              csv << i << "," << j << "," << 2.0 * M_PI * i / an_n << ","
                  << 2.0 * M_PI * j / an_n << ","
                  << p.sigma_values[static_cast<std::int64_t>(i) * an_n + j] << "\n";
        }
      }
      nlohmann::json j;
      j["scales"] = scales;
      j["n"] = an_n;
      j["dims"] = an_d;
      j["coprime"] = msr::pairwise_coprime(scales);
      const double kappa = msr::condition_number(p);
      j["kappa_finite"] = std::isfinite(kappa);
      if (std::isfinite(kappa)) {
        j["kappa"] = kappa;
      } else {
        j["kappa"] = "inf";
        double min_pos = std::numeric_limits<double>::infinity();
        for (double v : p.sigma_values)
          if (v > 0.0) min_pos = std::min(min_pos, v);
        j["largest_finite_ratio"] = p.max_value() / min_pos;
      }
      try {
        const msr::ErrorPrediction e = msr::predicted_mse(p, an_sigma);
        j["invertible"] = true;
        j["trace_normalized"] = e.trace_normalized;
        j["rmse_factor"] = e.rmse_factor;
        j["lower_bound"] = e.lower_bound;
        if (std::isfinite(e.asymptotic_value)) j["asymptotic_trace"] = e.asymptotic_value;
        j["expected_mse"] = e.expected_mse;
      } catch (const msr::NonInvertibleError& e) {
        j["invertible"] = false;
        j["non_invertible_frequency"] = e.omega_fraction();
      }
      std::ofstream(an_out + ".json") << j.dump(2) << "\n";
      return 0;
    }

    if (ex->parsed()) {
      if (ex_kind == "noise") {
        msr::GridSignal target;
        if (!ex_target.empty()) {
          target = load_target(ex_target);
        } else {
          msr::TargetSpec spec;
          spec.kind = msr::TargetKind::kRandom;
          spec.dims = ex_d;
          spec.n0 = ex_n;
          spec.n1 = ex_n;
          spec.seed = ex_seed;
          target = msr::make_target(spec);
        }
        msr::NoiseExperimentConfig cfg;
        cfg.scales = parse_scales(ex_scales);
        cfg.sigma = ex_sigma;
        cfg.trials = ex_trials;
        cfg.lambda = ex_lambda;
        cfg.method = (ex_method == "lsqr") ? msr::SolverMethod::kLsqr
                                           : msr::SolverMethod::kFourier;
        cfg.seed = ex_seed;
        const msr::ExperimentReport rep = msr::run_noise_experiment(target, cfg);
        nlohmann::json out_json = rep.to_json();
        out_json["target"] = ex_target.empty()
                                 ? "random(n=" + std::to_string(ex_n) +
                                       ", seed=" + std::to_string(ex_seed) + ")"
                                 : ex_target;
        std::ofstream(ex_out.out + ".json") << out_json.dump(2) << "\n";
        return 0;
      }
      if (ex_kind == "coprime-scan") {
        const msr::CoprimeScanResult res =
            msr::coprime_scan(ex_kmax, ex_n, ex_d, msr::ConvMode::kCyclic);
        std::ofstream(ex_out.out + ".json") << res.to_json().dump(2) << "\n";
        std::ofstream csv(ex_out.out + ".csv");
        csv << "scales,coprime,rmse_factor\n";
        for (const auto& c : res.cells) {
          for (std::size_t i = 0; i < c.scales.size(); ++i)
            csv << (i ? "x" : "") << c.scales[i];
          csv << "," << (c.coprime ? 1 : 0) << ","
              << (std::isfinite(c.rmse_factor) ? std::to_string(c.rmse_factor)
                                               : "inf")
              << "\n";
        }
        return 0;
      }
      if (ex_kind == "scale-count") {
        const std::vector<int> scales = parse_scales(ex_scales);
        if (scales.size() != 3)
          throw std::invalid_argument("scale-count needs exactly three scales");
        msr::GridSignal target;
        if (!ex_target.empty()) {
          target = load_target(ex_target);
        } else {
          msr::TargetSpec spec;
          spec.kind = msr::TargetKind::kPinwheel;
          spec.dims = 2;
          spec.n0 = ex_n;
          spec.n1 = ex_n;
          target = msr::make_target(spec);
        }
        const msr::ExperimentReport rep = msr::scale_count_comparison(
            target, {scales[0], scales[1], scales[2]}, ex_lambda, ex_sigma, ex_seed);
        nlohmann::json out_json = rep.to_json();
        out_json["target"] = ex_target.empty()
                                 ? "pinwheel(n=" + std::to_string(ex_n) + ")"
                                 : ex_target;
        std::ofstream(ex_out.out + ".json") << out_json.dump(2) << "\n";
        // snapshots: target, per-count reconstructions, residuals
        msr::write_pgm(ex_out.out + "_target.pgm", target, ex_out.binary);
        msr::MeasurementSet noisy = msr::add_noise(
            msr::apply_T(target, scales, msr::ConvMode::kCyclic,
                         msr::Normalization::kMean),
            ex_sigma, ex_seed);
        for (int count = 1; count <= 3; ++count) {
          const msr::GridSignal est =
              msr::fourier_reconstruct(noisy.head_scales(count), ex_lambda);
          msr::write_pgm(ex_out.out + "_recon" + std::to_string(count) + ".pgm", est,
                         ex_out.binary);
          msr::GridSignal res(ex_n, ex_n);
          for (std::int64_t i = 0; i < est.size(); ++i) res[i] = est[i] - target[i];
          msr::write_pgm(ex_out.out + "_residual" + std::to_string(count) + ".pgm",
                         res, ex_out.binary);
        }
        return 0;
      }
      if (ex_kind == "trace-sweep") {
        std::vector<int> ns;
        if (!ex_nlist.empty()) {
          for (int v : parse_scales(ex_nlist)) ns.push_back(v);
        } else {
          ns = {50, 100, 200, 400, 1000, 10000};
        }
        const msr::TraceSweep sweep =
            msr::trace_convergence_sweep(parse_scales(ex_scales), ex_d, ns);
        std::ofstream(ex_out.out + ".json") << sweep.to_json().dump(2) << "\n";
        std::ofstream csv(ex_out.out + ".csv");
        csv << "n,cyclic_rmse_factor,valid_rmse_factor,asymptotic\n";
        for (const auto& r : sweep.rows) {
          csv << r.n << "," << r.cyclic_rmse_factor << ",";
          if (std::isfinite(r.valid_rmse_factor)) csv << r.valid_rmse_factor;
          csv << "," << sweep.asymptotic_rmse_factor << "\n";
        }
        return 0;
      }
      throw std::invalid_argument("unknown experiment kind " + ex_kind);
    }

    if (ora->parsed()) {
      const msr::MeasurementSet ms = msr::read_measurement_set(or_input);
      const msr::GridSignal est = msr::dense_oracle(ms, or_lambda);
      msr::write_csv(or_out.out + ".csv", est);
      if (est.dims() == 2) msr::write_pgm(or_out.out + ".pgm", est, or_out.binary);
      nlohmann::json rep = {{"method", "oracle"}, {"lambda", or_lambda}};
      std::ofstream(or_out.out + ".report.json") << rep.dump(2) << "\n";
      return 0;
    }
  } catch (const msr::NonInvertibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
