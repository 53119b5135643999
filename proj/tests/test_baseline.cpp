#include <doctest.h>

#include "qtrack/baseline.hpp"
#include "qtrack/evaluation.hpp"
#include "qtrack/oracle.hpp"
#include "test_helpers.hpp"

using namespace qtrack;

TEST_CASE("the augmented oracle's state block is the regulation gain") {
  const PlantModel plant(th::system1_A(), th::system1_B());
  const CostParams cost(th::system1_Q(), th::scalar_R(), 0.9);
  const BaselineOracle orc = baseline_oracle(plant, th::exo_F(), cost, 0);

  REQUIRE(orc.K.rows() == 1);
  REQUIRE(orc.K.cols() == 4);
  const Mat lqr = riccati_gain(th::system1_A(), th::system1_B(),
                               th::system1_Q(), th::scalar_R(), 0.9);
  CHECK((orc.K.leftCols(2) - lqr).cwiseAbs().maxCoeff() < 1e-8);

  // With the generator at rest the control is pure state feedback.
  Vec x_aug = Vec::Zero(4);
  x_aug(0) = 1.5;
  x_aug(1) = -0.5;
  const Vec u = orc.K * x_aug;
  const Vec u_reg = lqr * x_aug.head(2);
  CHECK(std::abs(u(0) - u_reg(0)) < 1e-8 * std::max(1.0, std::abs(u_reg(0))));
}

TEST_CASE("Q-learning on the augmented state reaches the model-based gain") {
  const PlantModel plant(th::system1_A(), th::system1_B());
  const CostParams cost(th::system1_Q(), th::scalar_R(), 0.9);
  LearnerConfig cfg;
  cfg.N = 10;
  cfg.seed = 1;
  cfg.max_vi_iters = 40;

  const ExoSystem exo{th::exo_F(), th::exo_r0()};
  const BaselineResult bl = train_baseline(plant, exo, cost, 0, cfg);
  const BaselineOracle orc = baseline_oracle(plant, th::exo_F(), cost, 0);

  // Full symmetric quadratic over [x; r_exo; u]: 5 * 6 / 2 entries.
  CHECK(bl.pattern.weight_count() == 15);
  CHECK((bl.K - orc.K).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(!bl.iterations.empty());
}

TEST_CASE("the baseline tracks its own generator but degrades off-model") {
  const PlantModel plant(th::system1_A(), th::system1_B());
  const CostParams cost(th::system1_Q(), th::scalar_R(), 0.9);
  const BaselineOracle orc = baseline_oracle(plant, th::exo_F(), cost, 0);

  const SimResult sine = evaluate_baseline(orc.K, plant, cost,
                                           th::training_sine(2, 0), th::exo_F(),
                                           300, 0);
  REQUIRE(sine.traj.states.size() == 301);
  for (const Vec& x : sine.traj.states) CHECK(x.norm() < 10.0);
  const double rms_sine = rms_tracking(sine.traj, sine.refs, 0);
  CHECK(rms_sine < 0.2);

  ReferenceSource ramp;
  ramp.kind = RefKind::ramp;
  ramp.n = 2;
  ramp.coord = 0;
  ramp.slope = 0.01;
  const SimResult off = evaluate_baseline(orc.K, plant, cost, ramp, th::exo_F(),
                                          300, 0);
  CHECK(rms_tracking(off.traj, off.refs, 0) > 5.0 * rms_sine);
}
