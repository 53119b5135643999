#include "qtrack/baseline.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {

struct AugSample {
  Vec z;  // [x; r_exo; u]
  double c = 0.0;
  Vec x_next;
  Vec r_next;
};

Vec lift(double value, int n, int coord) {
  Vec r = Vec::Zero(n);
  r(coord) = value;
  return r;
}

Mat extract_gain(const Mat& H, int s, int m) {
  const Mat huu = 0.5 * (H.block(s, s, m, m) + H.block(s, s, m, m).transpose());
  Eigen::LLT<Mat> llt(huu);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("h_uu is not positive definite");
  }
  return -llt.solve(H.block(s, 0, m, s));
}

}  // namespace

BaselineResult train_baseline(const PlantModel& plant, const ExoSystem& exo,
                              const CostParams& cost, int coord,
                              const LearnerConfig& cfg) {
  const int n = plant.n, m = plant.m;
  const int s = n + 2;
  const int p = s + m;

  BaselineResult out;
  out.pattern = full_pattern(p);
  const int L_count = out.pattern.weight_count();
  const int M = static_cast<int>(std::ceil(cfg.M_factor * L_count));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  const double xi_std = std::sqrt(cfg.exploration_variance);

  // collect under u = K x_aug + xi, K = 0
  std::vector<AugSample> samples;
  samples.reserve(M);
  Vec x = Vec::Zero(n);
  Vec r = exo.r;
  for (int j = 0; j < M; ++j) {
    Vec u(m);
    for (int i = 0; i < m; ++i) u(i) = xi_std * dist(rng);
    AugSample smp;
    smp.z = Vec(p);
    smp.z.head(n) = x;
    smp.z.segment(n, 2) = r;
    smp.z.tail(m) = u;
    smp.c = one_step_cost(cost, x, u, lift(r(0), n, coord));
    smp.x_next = step(plant, x, u);
    check_state(smp.x_next);
    smp.r_next = exo.F * r;
    x = smp.x_next;
    r = smp.r_next;
    samples.push_back(std::move(smp));
  }

  Mat features(M, L_count);
  for (int j = 0; j < M; ++j) {
    features.row(j) = phi(samples[j].z, out.pattern).transpose();
  }
  const LsSolver solver(features);

  out.w = Vec::Zero(L_count);
  out.K = Mat::Zero(m, s);
  bool have_gain = false;
  for (int i = 1; i <= cfg.max_vi_iters; ++i) {
    Vec targets(M);
    for (int j = 0; j < M; ++j) {
      Vec zs(p);
      zs.head(n) = samples[j].x_next;
      zs.segment(n, 2) = samples[j].r_next;
      zs.tail(m) = have_gain ? Vec(out.K * zs.head(s)) : Vec::Zero(m);
      targets(j) = samples[j].c + cfg.gamma * out.w.dot(phi(zs, out.pattern));
    }
    const Vec w_next = solver.solve(targets);
    IterationRecord rec;
    rec.i = i;
    rec.dw = (w_next - out.w).norm();
    out.w = w_next;
    try {
      out.K = extract_gain(weights_to_H(out.w, out.pattern), s, m);
      have_gain = true;
    } catch (const NotPositiveDefinite&) {
      rec.gain_updated = false;
    }
    out.iterations.push_back(rec);
    if (rec.dw < cfg.e_w) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged && cfg.require_convergence) {
    throw MaxIterationsExceeded("baseline weight change did not reach e_w");
  }
  return out;
}

BaselineOracle baseline_oracle(const PlantModel& plant, const Mat& F,
                               const CostParams& cost, int coord) {
  const int n = plant.n, m = plant.m;
  const int s = n + 2;
  Mat A_aug = Mat::Zero(s, s);
  A_aug.topLeftCorner(n, n) = plant.A;
  A_aug.bottomRightCorner(2, 2) = F;
  Mat B_aug = Mat::Zero(s, m);
  B_aug.topRows(n) = plant.B;
  Mat C = Mat::Zero(n, 2);
  C(coord, 0) = 1.0;
  Mat Q_aug = Mat::Zero(s, s);
  Q_aug.topLeftCorner(n, n) = cost.Q;
  Q_aug.topRightCorner(n, 2) = -cost.Q * C;
  Q_aug.bottomLeftCorner(2, n) = -(cost.Q * C).transpose();
  Q_aug.bottomRightCorner(2, 2) = C.transpose() * cost.Q * C;

  const Mat P = riccati_value(A_aug, B_aug, Q_aug, cost.R, cost.gamma);
  Mat AB(s, s + m);
  AB.leftCols(s) = A_aug;
  AB.rightCols(m) = B_aug;
  Mat H = Mat::Zero(s + m, s + m);
  H.topLeftCorner(s, s) = Q_aug;
  H.bottomRightCorner(m, m) = cost.R;
  H += cost.gamma * AB.transpose() * P * AB;

  BaselineOracle out;
  out.H = 0.5 * (H + H.transpose());
  out.K = extract_gain(out.H, s, m);
  return out;
}

SimResult evaluate_baseline(const Mat& K, const PlantModel& plant,
                            const CostParams& cost, const ReferenceSource& src,
                            const Mat& F, long steps, int coord) {
  SimResult out;
  Vec x = Vec::Zero(plant.n);
  Vec r_hat(2);
  r_hat << sample_at(src, 0)(coord), 0.0;

  for (long k = 0; k < steps; ++k) {
    Vec x_aug(plant.n + 2);
    x_aug.head(plant.n) = x;
    x_aug.tail(2) = r_hat;
    const Vec u = K * x_aug;
    const Vec r = sample_at(src, k);
    out.traj.states.push_back(x);
    out.traj.inputs.push_back(u);
    out.traj.costs.push_back(one_step_cost(cost, x, u, r));
    out.refs.push_back(r);
    x = step(plant, x, u);
    check_state(x);
    r_hat = F * r_hat;
    r_hat(0) = sample_at(src, k + 1)(coord);
  }
  out.traj.states.push_back(x);
  return out;
}

}  // namespace qtrack
