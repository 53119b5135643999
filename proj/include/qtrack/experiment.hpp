#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "qtrack/baseline.hpp"
#include "qtrack/config.hpp"
#include "qtrack/evaluation.hpp"
#include "qtrack/oracle.hpp"

namespace qtrack {

struct RunContext {
  ExperimentConfig cfg;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  bool stop_after_first_vi = false;
};

// Model-based reference solution shared by every subcommand.
struct OracleArtifacts {
  OracleResult oracle;
  Vec w_star;
};
OracleArtifacts compute_oracle(const ExperimentConfig& cfg);

// Subcommand bodies; each writes its outputs plus a manifest into
// ctx.out_dir and returns a process exit code.
int cmd_oracle(const RunContext& ctx);
int cmd_learn(const RunContext& ctx);
int cmd_compare(const RunContext& ctx);
int cmd_eval(const RunContext& ctx, const std::filesystem::path& weights_path);

// Maps library errors to the documented exit codes:
// 0 success, 2 excitation failure, 3 divergence, 1 anything else.
int run_guarded(const std::function<int()>& body);

}  // namespace qtrack
