#include <doctest.h>

#include <cmath>
#include <random>

#include "qtrack/reference.hpp"
#include "test_helpers.hpp"

using namespace qtrack;

namespace {

ReferenceSource step_source(int n, int coord, double before, double after,
                            long k_step) {
  ReferenceSource src;
  src.kind = RefKind::step;
  src.n = n;
  src.coord = coord;
  src.value_before = before;
  src.value_after = after;
  src.k_step = k_step;
  return src;
}

}  // namespace

TEST_CASE("window_at pads a finite table with exact zeros") {
  ReferenceSource src;
  src.kind = RefKind::tabulated;
  src.n = 2;
  src.coord = 0;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 6; ++i) src.table.push_back(th::random_vec(2, rng));

  const ReferenceWindow w = window_at(src, 3, 10);
  REQUIRE(w.entries.size() == 11);
  CHECK(w.horizon() == 10);
  for (int i = 0; i < 3; ++i) {
    CHECK((w.entries[i] - src.table[3 + i]).cwiseAbs().maxCoeff() == 0.0);
  }
  for (int i = 3; i <= 10; ++i) CHECK(w.entries[i].norm() == 0.0);
}

TEST_CASE("the exo generator produces the damped-rotation sine") {
  const ReferenceSource src = th::training_sine(2, 0);
  CHECK(sample_at(src, 0)(0) == 1.0);
  CHECK(sample_at(src, 1)(0) == doctest::Approx(0.9801).epsilon(1e-15));

  const ReferenceWindow w = window_at(src, 0, 10);
  CHECK(w.entries[0](0) == 1.0);
  CHECK(w.entries[1](0) == doctest::Approx(0.9801).epsilon(1e-15));
}

TEST_CASE("a window can straddle a step change") {
  const ReferenceSource src = step_source(2, 0, -1.0, 4.0, 20);
  const ReferenceWindow w = window_at(src, 15, 10);
  for (int i = 0; i <= 4; ++i) CHECK(w.entries[i](0) == -1.0);
  for (int i = 5; i <= 10; ++i) CHECK(w.entries[i](0) == 4.0);
  for (int i = 0; i <= 10; ++i) CHECK(w.entries[i](1) == 0.0);
}

TEST_CASE("shift drops the head and appends the given entry") {
  ReferenceWindow w;
  Vec a(1), b(1), c(1), d(1);
  a << 1.0;
  b << 2.0;
  c << 3.0;
  d << 4.0;
  w.entries = {a, b, c};

  const ReferenceWindow s = shift(w, d);
  CHECK(s.entries[0](0) == 2.0);
  CHECK(s.entries[1](0) == 3.0);
  CHECK(s.entries[2](0) == 4.0);

  const ReferenceWindow z = shift_zero(w);
  CHECK(z.entries[0](0) == 2.0);
  CHECK(z.entries[1](0) == 3.0);
  CHECK(z.entries[2](0) == 0.0);

  ReferenceWindow it = w;
  for (int k = 0; k <= w.horizon(); ++k) it = shift_zero(it);
  for (const Vec& e : it.entries) CHECK(e.norm() == 0.0);
}

TEST_CASE("shifting a window with the next sample advances the cursor") {
  std::vector<ReferenceSource> sources;
  sources.push_back(th::training_sine(2, 0));
  sources.push_back(step_source(2, 0, 0.0, 1.0, 7));
  {
    ReferenceSource ramp;
    ramp.kind = RefKind::ramp;
    ramp.n = 2;
    ramp.coord = 1;
    ramp.slope = 0.25;
    ramp.offset = -1.0;
    ramp.start = 3;
    sources.push_back(ramp);
  }
  {
    ReferenceSource chirp;
    chirp.kind = RefKind::chirp;
    chirp.n = 2;
    chirp.coord = 0;
    chirp.amplitude = 2.0;
    chirp.f0 = 0.01;
    chirp.f1 = 0.2;
    chirp.duration = 40;
    sources.push_back(chirp);
  }
  {
    ReferenceSource pw;
    pw.kind = RefKind::piecewise;
    pw.n = 2;
    pw.coord = 0;
    pw.pieces = {{2, 1.5}, {9, -0.5}};
    sources.push_back(pw);
  }
  {
    ReferenceSource tab;
    tab.kind = RefKind::tabulated;
    tab.n = 2;
    tab.coord = 0;
    std::mt19937_64 rng(8);
    for (int i = 0; i < 9; ++i) tab.table.push_back(th::random_vec(2, rng));
    sources.push_back(tab);
  }

  for (const ReferenceSource& src : sources) {
    for (long k : {0L, 1L, 5L, 12L}) {
      const ReferenceWindow shifted =
          shift(window_at(src, k, 6), sample_at(src, k + 7));
      const ReferenceWindow direct = window_at(src, k + 1, 6);
      for (int i = 0; i <= 6; ++i) {
        CHECK((shifted.entries[i] - direct.entries[i]).cwiseAbs().maxCoeff() ==
              0.0);
      }
    }
  }
}

TEST_CASE("exo_step outputs the first component and advances by F") {
  const ExoSystem e0{th::exo_F(), th::exo_r0()};
  const auto [y0, e1] = exo_step(e0);
  CHECK(y0 == 1.0);
  CHECK(e1.r(0) == doctest::Approx(0.9801).epsilon(1e-15));
  CHECK(e1.r(1) == doctest::Approx(-0.1987).epsilon(1e-15));
  const auto [y1, e2] = exo_step(e1);
  CHECK(y1 == doctest::Approx(0.9801).epsilon(1e-15));

  const ExoSystem zero{th::exo_F(), Vec::Zero(2)};
  const auto [yz, ez] = exo_step(zero);
  CHECK(yz == 0.0);
  CHECK(ez.r.norm() == 0.0);

  ExoSystem e = e0;
  for (int k = 0; k < 100; ++k) {
    e = exo_step(e).second;
    CHECK(e.r.norm() > 0.9);
    CHECK(e.r.norm() < 1.1);
  }
}

TEST_CASE("reference noise is cached per time index and zero-mean") {
  ReferenceSource src = th::training_sine(2, 0);
  src.noise_std = 0.1;

  // Sliding windows must reuse the identical draw for a shared index.
  NoisyReference noisy(src, 42);
  const ReferenceWindow w0 = noisy.window(0, 10);
  const ReferenceWindow w1 = noisy.window(1, 10);
  for (int i = 0; i < 10; ++i) {
    CHECK((w0.entries[i + 1] - w1.entries[i]).cwiseAbs().maxCoeff() == 0.0);
  }

  // Noise enters the tracked coordinate only.
  for (int i = 0; i <= 10; ++i) {
    CHECK(w0.entries[i](1) == sample_at(src, i)(1));
  }

  // Monte-Carlo mean over seeds recovers the clean sample.
  const int trials = 1000;
  double mean = 0.0;
  for (int s = 0; s < trials; ++s) {
    NoisyReference nr(src, static_cast<std::uint64_t>(s));
    mean += nr.at(5)(0);
  }
  mean /= trials;
  const double clean = sample_at(src, 5)(0);
  CHECK(std::abs(mean - clean) < 3.0 * 0.1 / std::sqrt(double(trials)));
}

TEST_CASE("noise_std zero reproduces the clean source exactly") {
  ReferenceSource src = step_source(2, 0, 0.0, 2.0, 5);
  src.noise_std = 0.0;
  NoisyReference noisy(src, 99);
  for (long k = 0; k < 12; ++k) {
    CHECK((noisy.at(k) - sample_at(src, k)).cwiseAbs().maxCoeff() == 0.0);
  }
}
