#include <doctest.h>

#include <random>

#include "qtrack/errors.hpp"
#include "qtrack/lti_system.hpp"
#include "test_helpers.hpp"

using namespace qtrack;

TEST_CASE("step evaluates A x + B u on the second-order plant") {
  const PlantModel plant(th::system1_A(), th::system1_B());

  Vec x(2), u(1);
  x << 1.0, 0.0;
  u << 0.0;
  Vec next = step(plant, x, u);
  CHECK(next(0) == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(next(1) == doctest::Approx(-0.02).epsilon(1e-15));

  next = step(plant, Vec::Zero(2), Vec::Zero(1));
  CHECK(next.norm() == 0.0);

  u << 1.0;
  next = step(plant, Vec::Zero(2), u);
  CHECK(next(0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(next(1) == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("step is linear in (x, u)") {
  const PlantModel plant(th::system2_A(), th::system2_B());
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Vec x1 = th::random_vec(6, rng), x2 = th::random_vec(6, rng);
    const Vec u1 = th::random_vec(1, rng), u2 = th::random_vec(1, rng);
    const Vec lhs = step(plant, x1 + x2, u1 + u2);
    const Vec rhs = step(plant, x1, u1) + step(plant, x2, u2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("step rejects mismatched dimensions") {
  const PlantModel plant(th::system1_A(), th::system1_B());
  CHECK_THROWS_AS(step(plant, Vec::Zero(3), Vec::Zero(1)), DimensionMismatch);
  CHECK_THROWS_AS(step(plant, Vec::Zero(2), Vec::Zero(2)), DimensionMismatch);
}

TEST_CASE("one_step_cost evaluates the quadratic stage cost") {
  const CostParams cp(th::system1_Q(), th::scalar_R(), 0.9);

  Vec x(2), r(2), u(1);
  x << 0.3, -0.7;
  u << 0.0;
  CHECK(one_step_cost(cp, x, u, x) == 0.0);

  // x - r = [1, 5], u = 2 -> 0.5 * (100 * 1 + 4) = 52.
  r << x(0) - 1.0, x(1) - 5.0;
  u << 2.0;
  CHECK(one_step_cost(cp, x, u, r) == doctest::Approx(52.0).epsilon(1e-14));

  // Scalar case Q = R = 1: error 3, input 4 -> 0.5 * (9 + 16) = 12.5.
  const CostParams scalar(Mat::Identity(1, 1), Mat::Identity(1, 1), 0.9);
  Vec xs(1), rs(1), us(1);
  xs << 3.0;
  rs << 0.0;
  us << 4.0;
  CHECK(one_step_cost(scalar, xs, us, rs) == doctest::Approx(12.5).epsilon(1e-15));
}

TEST_CASE("one_step_cost is nonnegative for PSD Q and PD R") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const CostParams cp(th::random_psd(3, rng), th::random_pd(2, rng), 0.5);
    const Vec x = th::random_vec(3, rng, 10.0);
    const Vec r = th::random_vec(3, rng, 10.0);
    const Vec u = th::random_vec(2, rng, 10.0);
    CHECK(one_step_cost(cp, x, u, r) >= 0.0);
  }
}

TEST_CASE("discounted_cost sums gamma^i c_i") {
  Trajectory traj;
  traj.costs = {1.0, 1.0, 1.0};

  CHECK(discounted_cost(CostParams(th::system1_Q(), th::scalar_R(), 0.5),
                        Trajectory{{}, {}, {0.0, 0.0}}) == 0.0);
  CHECK(discounted_cost(CostParams(th::system1_Q(), th::scalar_R(), 0.0),
                        Trajectory{{}, {}, {3.25, 9.0, 2.0}}) == 3.25);
  CHECK(discounted_cost(CostParams(th::system1_Q(), th::scalar_R(), 0.5),
                        traj) == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("construction validates shapes, controllability, and definiteness") {
  CHECK_THROWS_AS(PlantModel(Mat::Zero(2, 3), Mat::Zero(2, 1)),
                  DimensionMismatch);
  CHECK_THROWS_AS(PlantModel(Mat::Zero(2, 2), Mat::Zero(3, 1)),
                  DimensionMismatch);

  // A = I2, B = [1, 0]^T cannot move the second coordinate.
  Mat B(2, 1);
  B << 1.0, 0.0;
  CHECK_THROWS_AS(PlantModel(Mat::Identity(2, 2), B), NotControllable);
  CHECK(is_controllable(th::system1_A(), th::system1_B()));
  CHECK(is_controllable(th::system2_A(), th::system2_B()));

  Mat Qneg = Mat::Identity(2, 2);
  Qneg(1, 1) = -1.0;
  CHECK_THROWS_AS(CostParams(Qneg, th::scalar_R(), 0.9), NotPositiveDefinite);
  CHECK_THROWS_AS(CostParams(th::system1_Q(), Mat::Zero(1, 1), 0.9),
                  NotPositiveDefinite);
  CHECK_THROWS_AS(CostParams(th::system1_Q(), th::scalar_R(), 1.0),
                  std::invalid_argument);
  CHECK_NOTHROW(CostParams(th::system1_Q(), th::scalar_R(), 0.0));
}

TEST_CASE("check_state guards against divergence") {
  CHECK_NOTHROW(check_state(Vec::Constant(2, 1e7)));
  CHECK_THROWS_AS(check_state(Vec::Constant(2, 1e8)), DivergedState);
  Vec bad(1);
  bad << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(check_state(bad), DivergedState);
}

TEST_CASE("tracked_coords finds the nonzero rows/columns of Q") {
  CHECK(tracked_coords(th::system1_Q()) == std::vector<int>{0});
  CHECK(tracked_coords(th::system2_Q()) == std::vector<int>{3});
  CHECK(tracked_coords(Mat::Zero(3, 3)).empty());
  CHECK(tracked_coords(Mat::Identity(2, 2)) == std::vector<int>({0, 1}));
}
