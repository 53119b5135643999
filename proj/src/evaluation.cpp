#include "qtrack/evaluation.hpp"

#include <cmath>

#include "qtrack/errors.hpp"

namespace qtrack {

double rms_error(const Trajectory& a, const Trajectory& b, int coord) {
  if (a.states.size() != b.states.size()) {
    throw DimensionMismatch("trajectories differ in length");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    const double d = a.states[k](coord) - b.states[k](coord);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.states.size()));
}

double rms_tracking(const Trajectory& a, const std::vector<Vec>& refs, int coord) {
  if (a.inputs.size() != refs.size()) {
    throw DimensionMismatch("trajectory and reference differ in length");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const double d = a.states[k](coord) - refs[k](coord);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(refs.size()));
}

std::pair<double, double> weight_errors(const Vec& w, const Vec& w_star) {
  if (w.size() != w_star.size()) throw DimensionMismatch("weight vectors differ");
  const double scale = w_star.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw ZeroOracle("oracle weight vector is zero");
  const Vec err = (w - w_star).cwiseAbs();
  return {err.mean() / scale, err.maxCoeff() / scale};
}

double bellman_residual(const Vec& w, const Batch& batch, double gamma,
                        const SparsityPattern& pattern) {
  GainMatrix gain = GainMatrix::zero(pattern.n, pattern.m, pattern.N);
  bool have_gain = false;
  if (!w.isZero(0.0)) {
    try {
      gain = policy_improvement(w, pattern);
      have_gain = true;
    } catch (const NotPositiveDefinite&) {
    }
  }
  const ZLayout lay = pattern.layout();
  double acc = 0.0;
  const int M = static_cast<int>(batch.samples.size());
  for (int j = 0; j < M; ++j) {
    const Sample& s = batch.samples[j];
    const Vec zs = successor_z(s, lay, have_gain ? &gain : nullptr);
    const double eps =
        s.c + gamma * w.dot(phi(zs, pattern)) - w.dot(phi(s.z, pattern));
    acc += eps * eps;
  }
  return std::sqrt(acc / static_cast<double>(M));
}

SimResult simulate_closed_loop(const PlantModel& plant, const CostParams& cost,
                               const GainMatrix& gain, const ReferenceSource& src,
                               long steps, const Vec& x0) {
  SimResult out;
  Vec x = x0;
  for (long k = 0; k < steps; ++k) {
    const ReferenceWindow window = window_at(src, k, gain.N);
    const Vec u = gain.control(x, window);
    const Vec r = window.entries.front();
    out.traj.states.push_back(x);
    out.traj.inputs.push_back(u);
    out.traj.costs.push_back(one_step_cost(cost, x, u, r));
    out.refs.push_back(r);
    x = step(plant, x, u);
    check_state(x);
  }
  out.traj.states.push_back(x);
  return out;
}

}  // namespace qtrack
