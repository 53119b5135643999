#include "qtrack/learner.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <deque>

#include "qtrack/errors.hpp"
#include "qtrack/evaluation.hpp"

namespace qtrack {

namespace {

Mat feature_matrix(const Batch& batch, const SparsityPattern& pattern) {
  const int M = static_cast<int>(batch.samples.size());
  Mat F(M, pattern.weight_count());
  for (int j = 0; j < M; ++j) F.row(j) = phi(batch.samples[j].z, pattern).transpose();
  return F;
}

int sample_budget(double M_factor, int weight_count) {
  return static_cast<int>(std::ceil(M_factor * weight_count));
}

}  // namespace

LsSolver::LsSolver(const Mat& design) {
  scale_ = Vec::Ones(design.cols());
  for (int j = 0; j < design.cols(); ++j) {
    const double nrm = design.col(j).norm();
    if (nrm > 0.0) scale_(j) = 1.0 / nrm;
  }
  qr_.setThreshold(1e-10);
  qr_.compute(design * scale_.asDiagonal());
  rank_ = static_cast<int>(qr_.rank());
  if (rank_ < design.cols()) {
    throw ExcitationDeficient("regression rank " + std::to_string(rank_) +
                              " < " + std::to_string(design.cols()) +
                              ": data does not excite all weights");
  }
}

Vec LsSolver::solve(const Vec& rhs) const {
  return scale_.asDiagonal() * qr_.solve(rhs);
}

Vec build_z(const Vec& x, const Vec& u, const ReferenceWindow& w,
            const ZLayout& lay) {
  Vec z(lay.dim());
  z.segment(lay.x(), lay.n) = x;
  z.segment(lay.u(), lay.m) = u;
  for (int i = 0; i <= lay.N; ++i) z.segment(lay.r(i), lay.n) = w.entries[i];
  return z;
}

Vec successor_z(const Sample& s, const ZLayout& lay, const GainMatrix* gain) {
  const Vec u_next =
      gain ? gain->control(s.x_next, s.window_next) : Vec::Zero(lay.m);
  return build_z(s.x_next, u_next, s.window_next, lay);
}

TdRegression::TdRegression(const Batch& batch, const SparsityPattern& pattern,
                           double gamma)
    : batch_(batch),
      pattern_(pattern),
      gamma_(gamma),
      features_(feature_matrix(batch, pattern)),
      solver_(features_) {}

Vec TdRegression::solve(const Vec& w, const GainMatrix* gain) const {
  const int M = static_cast<int>(batch_.samples.size());
  const ZLayout lay = pattern_.layout();
  Vec targets(M);
  for (int j = 0; j < M; ++j) {
    targets(j) = batch_.samples[j].c +
                 gamma_ * w.dot(phi(successor_z(batch_.samples[j], lay, gain), pattern_));
  }
  return solver_.solve(targets);
}

Vec explore_control(const GainMatrix& L, const Vec& x, const ReferenceWindow& w,
                    const Mat& Sigma, std::mt19937_64& rng) {
  Vec u = L.control(x, w);
  if (Sigma.size() == 0 || Sigma.cwiseAbs().maxCoeff() == 0.0) return u;
  Eigen::LLT<Mat> llt(Sigma);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("exploration covariance is not positive definite");
  }
  std::normal_distribution<double> dist(0.0, 1.0);
  Vec xi(u.size());
  for (int i = 0; i < xi.size(); ++i) xi(i) = dist(rng);
  return u + llt.matrixL() * xi;
}

Batch collect_batch(const PlantModel& plant, const CostParams& cost,
                    NoisyReference& ref, const GainMatrix& L,
                    const LearnerConfig& cfg, int weight_count,
                    CollectState& state, std::mt19937_64& ctrl_rng) {
  const int M = sample_budget(cfg.M_factor, weight_count);
  const Mat Sigma = cfg.exploration_variance * Mat::Identity(plant.m, plant.m);
  Batch batch;
  batch.samples.reserve(M);
  if (state.x.size() == 0) state.x = Vec::Zero(plant.n);

  const ZLayout lay{plant.n, plant.m, cfg.N};
  for (int s = 0; s < M; ++s) {
    const long k = state.k;
    const ReferenceWindow window = ref.window(k, cfg.N);
    const Vec u = explore_control(L, state.x, window, Sigma, ctrl_rng);
    const Vec r_cost =
        cfg.noisy_cost ? window.entries.front() : sample_at(ref.source(), k);
    const double c = one_step_cost(cost, state.x, u, r_cost);

    Sample sample;
    sample.z = build_z(state.x, u, window, lay);
    sample.c = c;
    sample.x_next = step(plant, state.x, u);
    check_state(sample.x_next);
    sample.window_next = shift_zero(window);
    batch.samples.push_back(std::move(sample));

    state.x = batch.samples.back().x_next;
    state.k = k + 1;
  }
  return batch;
}

GainMatrix policy_improvement(const Vec& w, const SparsityPattern& pattern) {
  return gain_from_H(weights_to_H(w, pattern), pattern.layout());
}

Vec policy_evaluation(const Batch& batch, const Vec& w, double gamma,
                      const SparsityPattern& pattern) {
  TdRegression reg(batch, pattern, gamma);
  if (w.isZero(0.0)) return reg.solve(w, nullptr);
  const GainMatrix gain = policy_improvement(w, pattern);
  return reg.solve(w, &gain);
}

ValueIterateResult value_iterate(const Batch& batch, const LearnerConfig& cfg,
                                 const SparsityPattern& pattern,
                                 const Vec* w_star) {
  const TdRegression reg(batch, pattern, cfg.gamma);
  ValueIterateResult out;
  out.w = Vec::Zero(pattern.weight_count());
  out.gain = GainMatrix::zero(pattern.n, pattern.m, pattern.N);

  for (int i = 1; i <= cfg.max_vi_iters; ++i) {
    const Vec w_next = reg.solve(out.w, out.have_gain ? &out.gain : nullptr);
    IterationRecord rec;
    rec.i = i;
    rec.dw = (w_next - out.w).norm();
    if (w_star != nullptr) {
      const auto [e1, e2] = weight_errors(w_next, *w_star);
      rec.e_I = e1;
      rec.e_II = e2;
      rec.has_errors = true;
    }
    out.w = w_next;
    try {
      out.gain = policy_improvement(out.w, pattern);
      out.have_gain = true;
    } catch (const NotPositiveDefinite&) {
      rec.gain_updated = false;  // keep the previous gain
    }
    out.iterations.push_back(rec);
    if (rec.dw < cfg.e_w) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged && cfg.require_convergence) {
    throw MaxIterationsExceeded("weight change did not reach e_w within max_vi_iters");
  }
  return out;
}

OnlineResult run_online(const PlantModel& plant, const CostParams& cost,
                        const ReferenceSource& training_ref,
                        const LearnerConfig& cfg, bool stop_after_first_vi,
                        const Vec* w_star) {
  const SparsityPattern pattern = build_pattern(plant.n, plant.m, cfg.N, cost.Q);
  const int M = sample_budget(cfg.M_factor, pattern.weight_count());
  const long total = cfg.steps > 0 ? cfg.steps : M;
  const ZLayout lay{plant.n, plant.m, cfg.N};

  std::mt19937_64 ctrl_rng(cfg.seed);
  // Training-time reference noise is owned by the learner: without it the
  // window entries of a low-dimensional generator are linearly dependent
  // and the regression cannot excite every weight.
  ReferenceSource train_src = training_ref;
  train_src.noise_std = cfg.sigma_ref;
  NoisyReference noisy(train_src, cfg.seed ^ 0x9E3779B97F4A7C15ULL);

  OnlineResult out;
  out.w = Vec::Zero(pattern.weight_count());
  out.gain = GainMatrix::zero(plant.n, plant.m, cfg.N);
  bool learning = true;

  std::deque<Sample> buffer;
  Vec x = Vec::Zero(plant.n);
  const Mat Sigma = cfg.exploration_variance * Mat::Identity(plant.m, plant.m);
  const Mat no_noise = Mat::Zero(plant.m, plant.m);

  for (long k = 0; k < total; ++k) {
    const ReferenceWindow window =
        learning ? noisy.window(k, cfg.N) : window_at(training_ref, k, cfg.N);
    const Vec u =
        explore_control(out.gain, x, window, learning ? Sigma : no_noise, ctrl_rng);
    const Vec r_cost = (learning && cfg.noisy_cost) ? window.entries.front()
                                                    : sample_at(training_ref, k);
    const double c = one_step_cost(cost, x, u, r_cost);
    out.steps.push_back(StepRecord{k, x, u, window.entries.front(), c});

    Sample sample;
    sample.z = build_z(x, u, window, lay);
    sample.c = c;
    sample.x_next = step(plant, x, u);
    check_state(sample.x_next);
    sample.window_next = shift_zero(window);
    x = sample.x_next;

    if (learning) {
      buffer.push_back(std::move(sample));
      if (static_cast<int>(buffer.size()) > M) buffer.pop_front();
      if ((k + 1) % M == 0 && static_cast<int>(buffer.size()) == M) {
        Batch batch;
        batch.samples.assign(buffer.begin(), buffer.end());
        ValueIterateResult vi = value_iterate(batch, cfg, pattern, w_star);
        out.last_batch = batch;
        out.w = vi.w;
        if (vi.have_gain) {
          out.gain = vi.gain;
          out.have_gain = true;
        }
        const int base = static_cast<int>(out.iterations.size());
        for (IterationRecord rec : vi.iterations) {
          rec.i += base;
          out.iterations.push_back(rec);
        }
        out.vi_rounds += 1;
        out.last_converged = vi.converged;
        if (stop_after_first_vi) learning = false;
      }
    }
  }
  return out;
}

}  // namespace qtrack
