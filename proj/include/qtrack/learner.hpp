#pragma once

#include <Eigen/QR>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qtrack/lti_system.hpp"
#include "qtrack/oracle.hpp"
#include "qtrack/qstructure.hpp"
#include "qtrack/reference.hpp"
#include "qtrack/types.hpp"

namespace qtrack {

// One transition observed under the exploratory policy. window_next is
// the shifted window with zero fill: the one-step-ahead value estimate
// assumes no preview beyond the horizon.
struct Sample {
  Vec z;  // [x; u; r_k; ...; r_{k+N}] with the applied exploratory u
  double c = 0.0;
  Vec x_next;
  ReferenceWindow window_next;
};

struct Batch {
  std::vector<Sample> samples;
};

// Assembles [x; u; r_0; ...; r_N] in the fixed block order.
Vec build_z(const Vec& x, const Vec& u, const ReferenceWindow& w,
            const ZLayout& lay);

// z* for a sample: the successor state, the greedy input replayed on the
// shifted window (nullptr gain means L = 0), and that window itself.
Vec successor_z(const Sample& s, const ZLayout& lay, const GainMatrix* gain);

struct LearnerConfig {
  double gamma = 0.9;
  int N = 10;
  double M_factor = 1.2;            // sample budget = ceil(M_factor * L)
  double e_w = 1e-6;                // 2-norm weight-change stop threshold
  double exploration_variance = 0.1;  // Sigma = exploration_variance * I
  double sigma_ref = 0.1;  // training reference noise std; run_online
                           // overrides the source's own noise_std with
                           // this (excitation of the window weights)
  std::uint64_t seed = 1;
  int max_vi_iters = 30;
  long steps = 0;                   // online run length; 0 = one sample budget
  bool noisy_cost = true;           // cost sees the same noisy r_k as the features
  bool require_convergence = false; // throw if e_w is not reached in max_vi_iters
};

// Rank-gated least squares with a fixed design matrix. Columns are
// equilibrated to unit norm before factorization (the rank condition is
// scaling-invariant; the solution is unscaled exactly).
class LsSolver {
 public:
  // Throws ExcitationDeficient when the numerical rank is below the
  // column count (diagonal threshold 1e-10 relative).
  explicit LsSolver(const Mat& design);

  Vec solve(const Vec& rhs) const;
  int rank() const { return rank_; }

 private:
  Vec scale_;
  Eigen::ColPivHouseholderQR<Mat> qr_;
  int rank_ = 0;
};

// Fixed-design temporal-difference regression over one batch: the
// feature matrix depends only on the data, so one factorization serves
// every value-iteration sweep (only the targets change).
class TdRegression {
 public:
  TdRegression(const Batch& batch, const SparsityPattern& pattern, double gamma);

  // Solves for the next weights given the current ones; gain describes
  // the greedy policy of the current weights (nullptr means L = 0).
  Vec solve(const Vec& w, const GainMatrix* gain) const;

  int rank() const { return solver_.rank(); }

 private:
  Batch batch_;
  SparsityPattern pattern_;
  double gamma_;
  Mat features_;  // one phi(z_j) per row
  LsSolver solver_;
};

// u = L [x; r_{k+1..k+N}] + xi with xi ~ N(0, Sigma) from the given stream.
Vec explore_control(const GainMatrix& L, const Vec& x, const ReferenceWindow& w,
                    const Mat& Sigma, std::mt19937_64& rng);

// Simulation cursor shared across successive batches.
struct CollectState {
  Vec x;
  long k = 0;
};

// Runs the plant for ceil(M_factor * L) steps under L + exploration,
// reading noisy windows, and returns the samples. Aborts with
// DivergedState if the state leaves the guard region.
Batch collect_batch(const PlantModel& plant, const CostParams& cost,
                    NoisyReference& ref, const GainMatrix& L,
                    const LearnerConfig& cfg, int weight_count,
                    CollectState& state, std::mt19937_64& ctrl_rng);

// One least-squares sweep: targets built from w's greedy policy.
// Throws ExcitationDeficient (rank) or NotPositiveDefinite (gain of w).
Vec policy_evaluation(const Batch& batch, const Vec& w, double gamma,
                      const SparsityPattern& pattern);

// Greedy gain of the quadratic form encoded by w.
GainMatrix policy_improvement(const Vec& w, const SparsityPattern& pattern);

struct IterationRecord {
  int i = 0;          // 1-based sweep index
  double dw = 0.0;    // ||w_i - w_{i-1}||_2
  double e_I = 0.0;   // mean normalized weight error (when an oracle is given)
  double e_II = 0.0;  // max normalized weight error
  bool has_errors = false;
  bool gain_updated = true;  // false when h_uu(w_i) was not yet PD
};

struct ValueIterateResult {
  Vec w;
  GainMatrix gain;
  bool have_gain = false;
  std::vector<IterationRecord> iterations;
  bool converged = false;
};

// Alternates policy evaluation and improvement from w = 0, L = 0 until
// the weight change drops below e_w or max_vi_iters sweeps have run
// (a normal stop reported through `converged`; set require_convergence
// to turn it into MaxIterationsExceeded).
ValueIterateResult value_iterate(const Batch& batch, const LearnerConfig& cfg,
                                 const SparsityPattern& pattern,
                                 const Vec* w_star = nullptr);

struct StepRecord {
  long k = 0;
  Vec x;
  Vec u;
  Vec r;  // in-window reference at k, as seen by the learner
  double c = 0.0;
};

struct OnlineResult {
  Vec w;
  GainMatrix gain;
  bool have_gain = false;
  std::vector<StepRecord> steps;
  std::vector<IterationRecord> iterations;  // across rounds, cumulative index
  int vi_rounds = 0;
  bool last_converged = false;
  Batch last_batch;  // the samples behind the final weight estimate
};

// Full loop: act with exploration, run value iteration on the most
// recent sample budget every time it fills, update the behavior gain.
// With stop_after_first_vi the weights freeze after the first round and
// the remaining steps run clean (no exploration or reference noise).
OnlineResult run_online(const PlantModel& plant, const CostParams& cost,
                        const ReferenceSource& training_ref,
                        const LearnerConfig& cfg,
                        bool stop_after_first_vi = false,
                        const Vec* w_star = nullptr);

}  // namespace qtrack
