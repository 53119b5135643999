#pragma once

#include "qtrack/evaluation.hpp"
#include "qtrack/learner.hpp"
#include "qtrack/lti_system.hpp"
#include "qtrack/reference.hpp"
#include "qtrack/types.hpp"

namespace qtrack {

// Comparison method: standard Q-learning on the state augmented with
// the autonomous reference generator, z = [x; r_exo; u] with a full
// symmetric quadratic (no tracking-specific structure). It is optimal
// exactly when the reference obeys the generator.
struct BaselineResult {
  Mat K;  // m x (n + 2): u = K [x; r_exo]
  Vec w;
  SparsityPattern pattern;
  std::vector<IterationRecord> iterations;
  bool converged = false;
};

// Trains on the generator's own reference (no reference noise; the
// generator is exact), exploring with the learner's Sigma. The sample
// budget mirrors the proposed method's rule on this basis size.
BaselineResult train_baseline(const PlantModel& plant, const ExoSystem& exo,
                              const CostParams& cost, int coord,
                              const LearnerConfig& cfg);

// Model-based fixed point of the augmented problem (test oracle):
// the stationary gain and the full quadratic over [x; r_exo; u].
struct BaselineOracle {
  Mat K;
  Mat H;
};
BaselineOracle baseline_oracle(const PlantModel& plant, const Mat& F,
                               const CostParams& cost, int coord);

// Closed loop on an arbitrary reference. The generator state is seeded
// with [s_0, 0]; each step it advances by F and its output component is
// overwritten with the next reference sample. Exact on the training
// reference, charitable on off-model ones.
SimResult evaluate_baseline(const Mat& K, const PlantModel& plant,
                            const CostParams& cost, const ReferenceSource& src,
                            const Mat& F, long steps, int coord);

}  // namespace qtrack
