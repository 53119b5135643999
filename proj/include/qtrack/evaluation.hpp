#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qtrack/learner.hpp"
#include "qtrack/lti_system.hpp"
#include "qtrack/oracle.hpp"
#include "qtrack/reference.hpp"
#include "qtrack/types.hpp"

namespace qtrack {

// RMS of the coordinate-wise difference between two state trajectories
// (learned vs model-based optimal; not against the reference).
double rms_error(const Trajectory& a, const Trajectory& b, int coord);

// RMS of coordinate `coord` against the clean reference samples.
double rms_tracking(const Trajectory& a, const std::vector<Vec>& refs, int coord);

// e_I = mean_i |w_i - w*_i| / max_j |w*_j|, e_II = max_i ... / max_j ....
// Throws ZeroOracle when max_j |w*_j| = 0.
std::pair<double, double> weight_errors(const Vec& w, const Vec& w_star);

// Root-mean-square one-step residual of the quadratic value encoded by
// w over the batch, with the greedy policy of w replayed on the
// successors (L = 0 when h_uu(w) is not yet PD).
double bellman_residual(const Vec& w, const Batch& batch, double gamma,
                        const SparsityPattern& pattern);

struct SimResult {
  Trajectory traj;
  std::vector<Vec> refs;  // clean r_k per step
};

// Closed loop under a fixed gain on clean moving-horizon windows
// (no exploration, no reference noise).
SimResult simulate_closed_loop(const PlantModel& plant, const CostParams& cost,
                               const GainMatrix& gain, const ReferenceSource& src,
                               long steps, const Vec& x0);

struct MetricsRow {
  std::string system;
  std::string method;
  std::string reference;
  double rms = 0.0;      // vs the model-based optimal trajectory
  double rms_ref = 0.0;  // vs the reference (tracking error)
  double e_I = 0.0;
  double e_II = 0.0;
};

}  // namespace qtrack
