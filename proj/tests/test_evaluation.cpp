#include <doctest.h>

#include <cmath>
#include <random>

#include "qtrack/errors.hpp"
#include "qtrack/evaluation.hpp"
#include "qtrack/learner.hpp"
#include "qtrack/oracle.hpp"
#include "test_helpers.hpp"

using namespace qtrack;

namespace {

Trajectory random_traj(int T, int n, std::mt19937_64& rng) {
  Trajectory t;
  for (int k = 0; k <= T; ++k) t.states.push_back(th::random_vec(n, rng));
  for (int k = 0; k < T; ++k) {
    t.inputs.push_back(th::random_vec(1, rng));
    t.costs.push_back(0.0);
  }
  return t;
}

}  // namespace

TEST_CASE("rms_error measures coordinate-wise trajectory distance") {
  std::mt19937_64 rng(3);
  const Trajectory a = random_traj(20, 2, rng);
  CHECK(rms_error(a, a, 0) == 0.0);

  Trajectory b = a;
  for (Vec& x : b.states) x(1) += 0.75;
  CHECK(rms_error(a, b, 1) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(rms_error(a, b, 0) == 0.0);

  // Metric properties on the tracked coordinate.
  const Trajectory c = random_traj(20, 2, rng);
  CHECK(rms_error(a, c, 0) == doctest::Approx(rms_error(c, a, 0)).epsilon(1e-14));
  CHECK(rms_error(a, c, 0) <= rms_error(a, b, 0) + rms_error(b, c, 0) + 1e-14);

  Trajectory shorter = a;
  shorter.states.pop_back();
  CHECK_THROWS_AS(rms_error(a, shorter, 0), DimensionMismatch);
}

TEST_CASE("weight_errors normalizes by the largest oracle weight") {
  Vec w_star(4);
  w_star << 1.0, -4.0, 0.5, 2.0;

  const auto [same1, same2] = weight_errors(w_star, w_star);
  CHECK(same1 == 0.0);
  CHECK(same2 == 0.0);

  // At w = 0 the largest normalized deviation is exactly 1.
  const auto [z1, z2] = weight_errors(Vec::Zero(4), w_star);
  CHECK(z2 == 1.0);
  CHECK(z1 == doctest::Approx((1.0 + 4.0 + 0.5 + 2.0) / 4.0 / 4.0).epsilon(1e-15));

  CHECK_THROWS_AS(weight_errors(w_star, Vec::Zero(4)), ZeroOracle);

  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const Vec w = th::random_vec(6, rng);
    const Vec ws = th::random_vec(6, rng);
    const auto [e1, e2] = weight_errors(w, ws);
    CHECK(e1 <= e2 + 1e-15);

    const double c = 3.7;
    const auto [s1, s2] = weight_errors(c * w, c * ws);
    CHECK(s1 == doctest::Approx(e1).epsilon(1e-12));
    CHECK(s2 == doctest::Approx(e2).epsilon(1e-12));
  }
}

TEST_CASE("bellman_residual vanishes at the generating weights") {
  const SparsityPattern pattern = build_pattern(2, 1, 3, th::system1_Q());
  const ZLayout lay = pattern.layout();
  const OracleResult oracle = model_value_iteration(
      th::system1_A(), th::system1_B(), th::system1_Q(), th::scalar_R(), 0.9, 3);
  const Vec w_bar = H_to_weights(oracle.H, pattern);
  const GainMatrix gain = policy_improvement(w_bar, pattern);
  const PlantModel plant(th::system1_A(), th::system1_B());

  std::mt19937_64 rng(5);
  Batch batch;
  for (int j = 0; j < 120; ++j) {
    Sample s;
    const Vec x = th::random_vec(2, rng);
    const Vec u = th::random_vec(1, rng);
    ReferenceWindow w;
    for (int i = 0; i <= 3; ++i) w.entries.push_back(th::random_vec(2, rng));
    s.z = build_z(x, u, w, lay);
    s.x_next = step(plant, x, u);
    s.window_next = shift_zero(w);
    const Vec z_next = successor_z(s, lay, &gain);
    s.c = w_bar.dot(phi(s.z, pattern)) - 0.9 * w_bar.dot(phi(z_next, pattern));
    batch.samples.push_back(std::move(s));
  }

  const double at_fixed_point = bellman_residual(w_bar, batch, 0.9, pattern);
  CHECK(at_fixed_point < 1e-8);

  // At w = 0 both value terms vanish and the residual is the RMS cost.
  double ms_c = 0.0;
  for (const Sample& s : batch.samples) ms_c += s.c * s.c;
  ms_c /= static_cast<double>(batch.samples.size());
  CHECK(bellman_residual(Vec::Zero(pattern.weight_count()), batch, 0.9, pattern) ==
        doctest::Approx(std::sqrt(ms_c)).epsilon(1e-12));

  // The converged weights are a local minimum of the residual.
  std::mt19937_64 drng(7);
  const double scale = 1e-3 * w_bar.cwiseAbs().maxCoeff();
  for (int t = 0; t < 100; ++t) {
    const Vec delta = th::random_vec(pattern.weight_count(), drng, scale);
    CHECK(bellman_residual(w_bar + delta, batch, 0.9, pattern) > at_fixed_point);
  }
}

TEST_CASE("a learned gain reproduces the optimal closed loop pointwise") {
  const PlantModel plant(th::system1_A(), th::system1_B());
  const CostParams cost(th::system1_Q(), th::scalar_R(), 0.9);
  const OracleResult oracle = model_value_iteration(
      th::system1_A(), th::system1_B(), th::system1_Q(), th::scalar_R(), 0.9, 10);

  LearnerConfig cfg;
  cfg.N = 10;
  cfg.seed = 3;
  cfg.max_vi_iters = 40;  // run to the tight e_w = 1e-6 stop
  const OnlineResult learned =
      run_online(plant, cost, th::training_sine(2, 0), cfg);
  REQUIRE(learned.have_gain);

  ReferenceSource stepref;
  stepref.kind = RefKind::step;
  stepref.n = 2;
  stepref.coord = 0;
  stepref.value_after = 1.0;
  stepref.k_step = 40;

  const SimResult opt =
      simulate_closed_loop(plant, cost, oracle.gain, stepref, 200, Vec::Zero(2));
  const SimResult lrn =
      simulate_closed_loop(plant, cost, learned.gain, stepref, 200, Vec::Zero(2));

  REQUIRE(opt.traj.states.size() == 201);
  REQUIRE(opt.traj.inputs.size() == 200);
  REQUIRE(opt.traj.costs.size() == 200);
  REQUIRE(opt.refs.size() == 200);

  double max_dev = 0.0;
  for (std::size_t k = 0; k < opt.traj.states.size(); ++k) {
    max_dev = std::max(max_dev,
                       std::abs(opt.traj.states[k](0) - lrn.traj.states[k](0)));
  }
  CHECK(max_dev < 1e-6);
  CHECK(rms_error(lrn.traj, opt.traj, 0) < 1e-6);
}

TEST_CASE("rms_tracking measures deviation from the reference samples") {
  Trajectory t;
  std::vector<Vec> refs;
  for (int k = 0; k < 4; ++k) {
    Vec x(2);
    x << 1.0 + k, 0.0;
    t.states.push_back(x);
    t.inputs.push_back(Vec::Zero(1));
    t.costs.push_back(0.0);
    Vec r(2);
    r << static_cast<double>(k), 0.0;
    refs.push_back(r);
  }
  t.states.push_back(Vec::Zero(2));  // terminal state, beyond the refs
  // Deviation is 1 at every step.
  CHECK(rms_tracking(t, refs, 0) == doctest::Approx(1.0).epsilon(1e-15));
}
