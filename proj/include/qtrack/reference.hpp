#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qtrack/types.hpp"

namespace qtrack {

// Moving-horizon window (r_k, ..., r_{k+N}). Entries beyond a source's
// support are exactly zero (the post-horizon convention).
struct ReferenceWindow {
  std::vector<Vec> entries;  // N+1 vectors of dimension n

  int horizon() const { return static_cast<int>(entries.size()) - 1; }
};

enum class RefKind { exo_sine, step, ramp, chirp, piecewise, tabulated };

// Deterministic reference generator. Scalar kinds lift their signal into
// state coordinate `coord`, zeros elsewhere; `tabulated` supplies full
// vectors and has finite support.
struct ReferenceSource {
  RefKind kind = RefKind::step;
  std::string name = "reference";
  int n = 0;
  int coord = 0;
  double noise_std = 0.0;  // applied only while learning is active

  // exo_sine: r_{k+1} = F r_k, signal = first component of r_k
  Mat F;
  Vec r0;

  // step: value_before for k < k_step, value_after afterwards
  double value_before = 0.0;
  double value_after = 0.0;
  long k_step = 0;

  // ramp: offset + slope * max(0, k - start)
  double slope = 0.0;
  double offset = 0.0;
  long start = 0;

  // chirp: amplitude * sin(phase(k)), frequency swept f0 -> f1 (cycles
  // per step) over `duration` steps, constant f1 afterwards
  double amplitude = 0.0;
  double f0 = 0.0;
  double f1 = 0.0;
  long duration = 1;

  // piecewise-constant: (start index, value), sorted; 0 before the first
  std::vector<std::pair<long, double>> pieces;

  // tabulated: one vector per time step, zero beyond the table
  std::vector<Vec> table;
};

// Clean reference vector at time k (no noise).
Vec sample_at(const ReferenceSource& src, long k);

// (r_k, ..., r_{k+N}) from the clean source.
ReferenceWindow window_at(const ReferenceSource& src, long k, int N);

// Drops the leading entry and appends `next`.
ReferenceWindow shift(const ReferenceWindow& w, const Vec& next);

// shift with a zero vector: the window used for the one-step-ahead
// value estimate, which assumes no preview beyond the horizon.
ReferenceWindow shift_zero(const ReferenceWindow& w);

// Autonomous 2-state generator r_{k+1} = F r_k with scalar output [1 0] r.
struct ExoSystem {
  Mat F;
  Vec r;
};

// Output at the current state, then the advanced system.
std::pair<double, ExoSystem> exo_step(const ExoSystem& e);

// Noisy view of a source used while learning: one Gaussian draw per
// absolute time index, cached so a sliding window reuses identical
// values. Noise enters the tracked coordinate only.
class NoisyReference {
 public:
  NoisyReference(ReferenceSource src, std::uint64_t seed);

  Vec at(long k);
  ReferenceWindow window(long k, int N);
  const ReferenceSource& source() const { return src_; }

 private:
  double noise_at(long k);

  ReferenceSource src_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> dist_;
  std::vector<double> noise_;  // grown in index order for determinism
};

}  // namespace qtrack
