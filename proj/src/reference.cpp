#include "qtrack/reference.hpp"

#include <cmath>
#include <numbers>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {

double scalar_signal(const ReferenceSource& src, long k) {
  switch (src.kind) {
    case RefKind::exo_sine: {
      // advance k steps from r0; output before advancing
      Vec r = src.r0;
      for (long i = 0; i < k; ++i) r = src.F * r;
      return r(0);
    }
    case RefKind::step:
      return k < src.k_step ? src.value_before : src.value_after;
    case RefKind::ramp:
      return src.offset + src.slope * static_cast<double>(std::max(0L, k - src.start));
    case RefKind::chirp: {
      const double k_d = static_cast<double>(k);
      const double T = static_cast<double>(std::max(1L, src.duration));
      double phase;
      if (k_d <= T) {
        phase = 2.0 * std::numbers::pi * (src.f0 * k_d + 0.5 * (src.f1 - src.f0) * k_d * k_d / T);
      } else {
        const double phase_T =
            2.0 * std::numbers::pi * (src.f0 * T + 0.5 * (src.f1 - src.f0) * T);
        phase = phase_T + 2.0 * std::numbers::pi * src.f1 * (k_d - T);
      }
      return src.amplitude * std::sin(phase);
    }
    case RefKind::piecewise: {
      double v = 0.0;
      for (const auto& [start, value] : src.pieces) {
        if (k >= start) v = value;
        else break;
      }
      return v;
    }
    case RefKind::tabulated:
      throw Error("tabulated sources are vector-valued");
  }
  throw Error("unknown reference kind");
}

}  // namespace

Vec sample_at(const ReferenceSource& src, long k) {
  if (src.kind == RefKind::tabulated) {
    if (k >= 0 && k < static_cast<long>(src.table.size())) return src.table[k];
    return Vec::Zero(src.n);
  }
  Vec r = Vec::Zero(src.n);
  r(src.coord) = scalar_signal(src, k);
  return r;
}

ReferenceWindow window_at(const ReferenceSource& src, long k, int N) {
  if (k < 0 || N < 1) throw std::invalid_argument("window_at requires k >= 0, N >= 1");
  ReferenceWindow w;
  w.entries.reserve(N + 1);
  for (int i = 0; i <= N; ++i) w.entries.push_back(sample_at(src, k + i));
  return w;
}

ReferenceWindow shift(const ReferenceWindow& w, const Vec& next) {
  ReferenceWindow out;
  out.entries.assign(w.entries.begin() + 1, w.entries.end());
  out.entries.push_back(next);
  return out;
}

ReferenceWindow shift_zero(const ReferenceWindow& w) {
  return shift(w, Vec::Zero(w.entries.front().size()));
}

std::pair<double, ExoSystem> exo_step(const ExoSystem& e) {
  const double out = e.r(0);
  return {out, ExoSystem{e.F, e.F * e.r}};
}

NoisyReference::NoisyReference(ReferenceSource src, std::uint64_t seed)
    : src_(std::move(src)), rng_(seed), dist_(0.0, 1.0) {}

double NoisyReference::noise_at(long k) {
  while (static_cast<long>(noise_.size()) <= k) {
    noise_.push_back(dist_(rng_) * src_.noise_std);
  }
  return noise_[k];
}

Vec NoisyReference::at(long k) {
  Vec r = sample_at(src_, k);
  if (src_.noise_std > 0.0) r(src_.coord) += noise_at(k);
  return r;
}

ReferenceWindow NoisyReference::window(long k, int N) {
  ReferenceWindow w;
  w.entries.reserve(N + 1);
  for (int i = 0; i <= N; ++i) w.entries.push_back(at(k + i));
  return w;
}

}  // namespace qtrack
