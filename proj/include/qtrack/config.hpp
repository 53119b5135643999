#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qtrack/learner.hpp"
#include "qtrack/reference.hpp"
#include "qtrack/types.hpp"

namespace qtrack {

// Parsed experiment description. Matrices are row-major nested arrays in
// the JSON file; tabulated references are loaded relative to the config.
struct ExperimentConfig {
  std::string name;
  Mat A, B, Q, R;
  double gamma = 0.9;
  int N = 10;
  LearnerConfig learner;
  ReferenceSource training_ref;
  std::vector<ReferenceSource> eval_refs;
  long eval_steps = 300;
  Mat exo_F;   // baseline generator matrix
  Vec exo_r0;  // baseline generator initial state
};

ExperimentConfig load_config(const std::filesystem::path& path);

// FNV-1a over the raw config bytes; recorded in the run manifest.
std::uint64_t fnv1a_file(const std::filesystem::path& path);

}  // namespace qtrack
