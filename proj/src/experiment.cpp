#include "qtrack/experiment.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <vector>

#include "qtrack/csv.hpp"
#include "qtrack/errors.hpp"
#include "qtrack/learner.hpp"

namespace qtrack {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Everything needed to re-run this invocation bit-for-bit. Deliberately
// no timestamp: two identical runs must produce identical manifests.
void write_manifest(const RunContext& ctx, const std::string& command) {
  json j;
  j["command"] = command;
  j["config"] = ctx.config_path.string();
  j["config_fnv1a"] = hex64(fnv1a_file(ctx.config_path));
  j["seed"] = ctx.cfg.learner.seed;
  j["stop_after_first_vi"] = ctx.stop_after_first_vi;
  j["tool"] = "qtrack";
  j["tool_version"] = "1.0.0";
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
#ifdef __VERSION__
  j["compiler"] = __VERSION__;
#else
  j["compiler"] = "unknown";
#endif
  write_json_file(ctx.out_dir / "manifest.json", j);
}

double spectral_radius(const Mat& M) {
  return Eigen::EigenSolver<Mat>(M, false).eigenvalues().cwiseAbs().maxCoeff();
}

// Quantifies how well the computed fixed point honors the structure the
// learner will assume: structural zeros, the fixed (x, r_0) and
// (r_0, r_0) blocks, and closed-loop stability of the extracted gain.
json structure_report(const ExperimentConfig& cfg, const OracleArtifacts& art) {
  const SparsityPattern& pat = art.oracle.pattern;
  const ZLayout lay = pat.layout();
  const Mat& H = art.oracle.H;
  const int p = pat.dim;

  std::vector<std::vector<char>> free_mask(p, std::vector<char>(p, 0));
  for (const auto& [i, jj] : pat.free_entries) {
    free_mask[i][jj] = free_mask[jj][i] = 1;
  }
  double max_zero = 0.0;
  for (int i = 0; i < p; ++i) {
    for (int jj = 0; jj < p; ++jj) {
      if (!free_mask[i][jj]) max_zero = std::max(max_zero, std::abs(H(i, jj)));
    }
  }
  const double h_max = H.cwiseAbs().maxCoeff();

  const int n = lay.n;
  const double dev_xr0 =
      (H.block(lay.x(), lay.r(0), n, n) + cfg.Q).cwiseAbs().maxCoeff();
  const double dev_r0r0 =
      (H.block(lay.r(0), lay.r(0), n, n) - cfg.Q).cwiseAbs().maxCoeff();
  const double rho = spectral_radius(cfg.A + cfg.B * art.oracle.gain.Lx());

  json j;
  j["dimension"] = p;
  j["n"] = lay.n;
  j["m"] = lay.m;
  j["N"] = lay.N;
  j["q"] = pat.q;
  j["weights"] = {{"pattern", pat.weight_count()},
                  {"full", count_weights_full(lay.n, lay.m, lay.N)},
                  {"sparse", count_weights_sparse(lay.n, lay.m, lay.N, pat.q)},
                  {"naive", count_weights_naive(lay.n, lay.m, lay.N)}};
  j["value_iteration"] = {
      {"iterations", art.oracle.trace.iterations},
      {"final_delta",
       art.oracle.trace.deltas.empty() ? 0.0 : art.oracle.trace.deltas.back()}};
  j["structural_zero_max_abs"] = max_zero;
  j["structural_zero_max_rel"] = h_max > 0.0 ? max_zero / h_max : 0.0;
  j["x_r0_block_deviation_from_minus_Q"] = dev_xr0;
  j["r0_r0_block_deviation_from_Q"] = dev_r0r0;
  j["closed_loop_spectral_radius"] = rho;
  j["discount_weighted_radius"] = std::sqrt(cfg.gamma) * rho;
  return j;
}

// Simulates the given gains over every configured evaluation reference,
// writes one tidy trajectory file per reference, and returns the metric
// rows. baseline_K may be null (learn/eval runs have no baseline).
std::vector<MetricsRow> evaluate_suite(const RunContext& ctx,
                                       const GainMatrix& learned,
                                       const GainMatrix& oracle_gain,
                                       double e_I, double e_II,
                                       const Mat* baseline_K,
                                       double baseline_e_I,
                                       double baseline_e_II) {
  const ExperimentConfig& cfg = ctx.cfg;
  const PlantModel plant(cfg.A, cfg.B);
  const CostParams cost(cfg.Q, cfg.R, cfg.gamma);
  const Vec x0 = Vec::Zero(plant.n);
  const long T = cfg.eval_steps;

  std::vector<MetricsRow> rows;
  for (const ReferenceSource& src : cfg.eval_refs) {
    const int coord = src.coord;
    const SimResult opt = simulate_closed_loop(plant, cost, oracle_gain, src, T, x0);
    const SimResult lrn = simulate_closed_loop(plant, cost, learned, src, T, x0);

    MetricsRow row;
    row.system = cfg.name;
    row.method = "proposed";
    row.reference = src.name;
    row.rms = rms_error(lrn.traj, opt.traj, coord);
    row.rms_ref = rms_tracking(lrn.traj, lrn.refs, coord);
    row.e_I = e_I;
    row.e_II = e_II;
    rows.push_back(row);

    std::vector<TidyRow> tidy;
    tidy.reserve(static_cast<std::size_t>(T) * (baseline_K ? 7 : 5));
    for (long k = 0; k < T; ++k) {
      tidy.push_back({"r", k, lrn.refs[static_cast<std::size_t>(k)](coord)});
      tidy.push_back({"x_opt", k, opt.traj.states[static_cast<std::size_t>(k)](coord)});
      tidy.push_back({"x_learned", k, lrn.traj.states[static_cast<std::size_t>(k)](coord)});
      tidy.push_back({"u_opt", k, opt.traj.inputs[static_cast<std::size_t>(k)](0)});
      tidy.push_back({"u_learned", k, lrn.traj.inputs[static_cast<std::size_t>(k)](0)});
    }

    if (baseline_K != nullptr) {
      const SimResult bl = evaluate_baseline(*baseline_K, plant, cost, src,
                                             cfg.exo_F, T, coord);
      MetricsRow brow;
      brow.system = cfg.name;
      brow.method = "baseline";
      brow.reference = src.name;
      brow.rms = rms_error(bl.traj, opt.traj, coord);
      brow.rms_ref = rms_tracking(bl.traj, bl.refs, coord);
      brow.e_I = baseline_e_I;
      brow.e_II = baseline_e_II;
      rows.push_back(brow);
      for (long k = 0; k < T; ++k) {
        tidy.push_back({"x_baseline", k, bl.traj.states[static_cast<std::size_t>(k)](coord)});
        tidy.push_back({"u_baseline", k, bl.traj.inputs[static_cast<std::size_t>(k)](0)});
      }
    }
    write_tidy_csv(ctx.out_dir / ("traj_" + src.name + ".csv"), tidy);
  }
  return rows;
}

struct LearnOutput {
  OracleArtifacts art;
  OnlineResult run;
  double e_I = 0.0;
  double e_II = 0.0;
};

// Shared body of learn and compare: online learning against the hidden
// plant plus the logs that make the run auditable.
LearnOutput run_learning(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const PlantModel plant(cfg.A, cfg.B);
  const CostParams cost(cfg.Q, cfg.R, cfg.gamma);

  LearnOutput out{compute_oracle(cfg), OnlineResult{}, 0.0, 0.0};
  out.run = run_online(plant, cost, cfg.training_ref, cfg.learner,
                       ctx.stop_after_first_vi, &out.art.w_star);

  const SparsityPattern& pattern = out.art.oracle.pattern;
  write_steps_csv(ctx.out_dir / "steps.csv", out.run.steps, cfg.learner.seed);
  write_iterations_csv(ctx.out_dir / "iterations.csv", out.run.iterations,
                       cfg.learner.seed);
  write_weights_csv(ctx.out_dir / "weights.csv", out.run.w, pattern);
  write_weights_csv(ctx.out_dir / "oracle_weights.csv", out.art.w_star, pattern);

  const auto [e1, e2] = weight_errors(out.run.w, out.art.w_star);
  out.e_I = e1;
  out.e_II = e2;

  double residual = 0.0;
  if (!out.run.last_batch.samples.empty()) {
    residual = bellman_residual(out.run.w, out.run.last_batch, cfg.gamma, pattern);
  }

  json summary;
  summary["system"] = cfg.name;
  summary["steps"] = out.run.steps.size();
  summary["vi_rounds"] = out.run.vi_rounds;
  summary["sweeps"] = out.run.iterations.size();
  summary["converged"] = out.run.last_converged;
  summary["final_dw"] =
      out.run.iterations.empty() ? 0.0 : out.run.iterations.back().dw;
  summary["e_I"] = out.e_I;
  summary["e_II"] = out.e_II;
  summary["bellman_residual"] = residual;
  summary["have_gain"] = out.run.have_gain;
  write_json_file(ctx.out_dir / "learn_summary.json", summary);

  std::cout << cfg.name << ": " << out.run.vi_rounds << " round(s), "
            << out.run.iterations.size() << " sweep(s), converged="
            << (out.run.last_converged ? "yes" : "no") << ", e_I=" << out.e_I
            << ", e_II=" << out.e_II << ", residual=" << residual << "\n";
  return out;
}

}  // namespace

OracleArtifacts compute_oracle(const ExperimentConfig& cfg) {
  OracleArtifacts art{
      model_value_iteration(cfg.A, cfg.B, cfg.Q, cfg.R, cfg.gamma, cfg.N), Vec()};
  art.w_star = H_to_weights(art.oracle.H, art.oracle.pattern);
  return art;
}

int cmd_oracle(const RunContext& ctx) {
  fs::create_directories(ctx.out_dir);
  const OracleArtifacts art = compute_oracle(ctx.cfg);

  write_dense_csv(ctx.out_dir / "oracle_H.csv", art.oracle.H);
  write_dense_csv(ctx.out_dir / "oracle_gain.csv", art.oracle.gain.L);
  write_weights_csv(ctx.out_dir / "oracle_weights.csv", art.w_star,
                    art.oracle.pattern);
  {
    std::ofstream f(ctx.out_dir / "oracle_trace.csv");
    if (!f) throw Error("cannot write oracle_trace.csv");
    f << "i,delta\n";
    for (std::size_t i = 0; i < art.oracle.trace.deltas.size(); ++i) {
      f << (i + 1) << "," << format_double(art.oracle.trace.deltas[i]) << "\n";
    }
  }
  const json report = structure_report(ctx.cfg, art);
  write_json_file(ctx.out_dir / "structure_report.json", report);
  write_manifest(ctx, "oracle");

  std::cout << ctx.cfg.name << ": H is " << art.oracle.pattern.dim << "x"
            << art.oracle.pattern.dim << " with "
            << art.oracle.pattern.weight_count() << " free entries; "
            << art.oracle.trace.iterations << " iterations, final step "
            << (art.oracle.trace.deltas.empty() ? 0.0
                                                : art.oracle.trace.deltas.back())
            << "\n";
  return 0;
}

int cmd_learn(const RunContext& ctx) {
  fs::create_directories(ctx.out_dir);
  const LearnOutput out = run_learning(ctx);

  std::vector<MetricsRow> rows;
  if (out.run.have_gain) {
    rows = evaluate_suite(ctx, out.run.gain, out.art.oracle.gain, out.e_I,
                          out.e_II, nullptr, 0.0, 0.0);
  }
  write_metrics_csv(ctx.out_dir / "metrics.csv", rows);
  write_manifest(ctx, "learn");
  return 0;
}

int cmd_compare(const RunContext& ctx) {
  fs::create_directories(ctx.out_dir);
  const ExperimentConfig& cfg = ctx.cfg;
  if (cfg.exo_F.size() == 0) {
    throw Error(
        "compare needs a reference generator: set baseline_exo or use an "
        "exo_sine training reference");
  }

  const LearnOutput out = run_learning(ctx);
  if (!out.run.have_gain) {
    throw NotPositiveDefinite(
        "learned weights never produced a positive definite control "
        "curvature; nothing to compare");
  }

  const PlantModel plant(cfg.A, cfg.B);
  const CostParams cost(cfg.Q, cfg.R, cfg.gamma);
  const int coord = cfg.training_ref.coord;
  const ExoSystem exo{cfg.exo_F, cfg.exo_r0};

  const BaselineResult bl = train_baseline(plant, exo, cost, coord, cfg.learner);
  const BaselineOracle borc = baseline_oracle(plant, cfg.exo_F, cost, coord);
  const Vec bw_star = H_to_weights(borc.H, bl.pattern);
  const auto [be1, be2] = weight_errors(bl.w, bw_star);

  write_iterations_csv(ctx.out_dir / "baseline_iterations.csv", bl.iterations,
                       cfg.learner.seed);
  write_weights_csv(ctx.out_dir / "baseline_weights.csv", bl.w, bl.pattern);
  write_dense_csv(ctx.out_dir / "baseline_gain.csv", bl.K);

  json bsummary;
  bsummary["converged"] = bl.converged;
  bsummary["sweeps"] = bl.iterations.size();
  bsummary["e_I"] = be1;
  bsummary["e_II"] = be2;
  bsummary["gain_deviation_from_oracle"] = (bl.K - borc.K).cwiseAbs().maxCoeff();
  write_json_file(ctx.out_dir / "baseline_summary.json", bsummary);

  const std::vector<MetricsRow> rows =
      evaluate_suite(ctx, out.run.gain, out.art.oracle.gain, out.e_I, out.e_II,
                     &bl.K, be1, be2);
  write_metrics_csv(ctx.out_dir / "metrics.csv", rows);
  write_manifest(ctx, "compare");

  for (const MetricsRow& row : rows) {
    std::cout << "  " << row.reference << " / " << row.method
              << ": rms_ref=" << row.rms_ref << " rms_vs_opt=" << row.rms
              << "\n";
  }
  return 0;
}

int cmd_eval(const RunContext& ctx, const std::filesystem::path& weights_path) {
  fs::create_directories(ctx.out_dir);
  const OracleArtifacts art = compute_oracle(ctx.cfg);

  const fs::path wpath =
      weights_path.empty() ? ctx.out_dir / "weights.csv" : weights_path;
  const Vec w = read_weights_csv(wpath, art.oracle.pattern);
  const GainMatrix gain = policy_improvement(w, art.oracle.pattern);
  const auto [e1, e2] = weight_errors(w, art.w_star);

  const std::vector<MetricsRow> rows =
      evaluate_suite(ctx, gain, art.oracle.gain, e1, e2, nullptr, 0.0, 0.0);
  write_metrics_csv(ctx.out_dir / "metrics.csv", rows);
  write_manifest(ctx, "eval");

  std::cout << ctx.cfg.name << ": evaluated " << wpath.string()
            << " (e_I=" << e1 << ", e_II=" << e2 << ")\n";
  return 0;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ExcitationDeficient& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DivergedState& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qtrack
