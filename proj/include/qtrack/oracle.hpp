#pragma once

#include <vector>

#include "qtrack/qstructure.hpp"
#include "qtrack/reference.hpp"
#include "qtrack/types.hpp"

namespace qtrack {

// Feedback/feedforward map: u = L * [x; r_{k+1}; ...; r_{k+N}].
// The current reference r_k does not enter the control.
struct GainMatrix {
  Mat L;  // m x (n + N n), blocks [L_x, L_1, ..., L_N]
  int n = 0, m = 0, N = 0;

  static GainMatrix zero(int n, int m, int N) {
    return GainMatrix{Mat::Zero(m, n + static_cast<long>(N) * n), n, m, N};
  }

  Mat Lx() const { return L.leftCols(n); }
  Mat Lr(int j) const { return L.middleCols(n + (j - 1) * n, n); }  // j in 1..N

  // Applies the map using entries 1..N of the window at time k.
  Vec control(const Vec& x, const ReferenceWindow& w) const;
};

// The reference-independent quadratic core: nonzero only on the
// (x, u, r_0) corner, [[Q, 0, -Q, 0], [0, R, 0, 0], [-Q, 0, Q, 0], [0...]].
Mat build_cost_core(const Mat& Q, const Mat& R, const ZLayout& lay);

// One-step transition of the augmented vector under gain L: x propagates
// through (A, B), the reference blocks shift left with a zero fill, and
// the next input replays L on the shifted quantities (the last
// feedforward block drops out against the zero fill).
Mat build_closed_loop_map(const GainMatrix& L, const Mat& A, const Mat& B,
                          const ZLayout& lay);

// L = -h_uu^{-1} [h_ux, h_u_r1, ..., h_u_rN]; h_u_r0 is structurally
// zero and excluded. Throws NotPositiveDefinite if h_uu is not PD.
GainMatrix gain_from_H(const Mat& H, const ZLayout& lay);

struct ValueIterationTrace {
  std::vector<Mat> iterates;   // H^(0) = 0, H^(1), ..., H^(final)
  std::vector<double> deltas;  // max-norm steps between consecutive iterates
  int iterations = 0;
};

struct OracleResult {
  Mat H;
  GainMatrix gain;
  SparsityPattern pattern;
  ValueIterationTrace trace;
};

// Fixed-point iteration H <- G + gamma M(L)' H M(L) from H = 0, L = 0,
// with L refreshed from each iterate. Stops when the max-norm step
// drops below tol; throws MaxIterationsExceeded otherwise.
OracleResult model_value_iteration(const Mat& A, const Mat& B, const Mat& Q,
                                   const Mat& R, double gamma, int N,
                                   double tol = 1e-10, int max_iter = 10000);

// Independent cross-check: exact backward dynamic programming over the
// quadratic form on [x; u; r_k; ...; r_K] (analytic minimization over u,
// then substitution of the dynamics), truncated at horizon K >= N.
// Returns the leading ((N+2)n + m) block of the resulting Hessian.
Mat finite_horizon_dp(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                      double gamma, int N, int K);

// Discounted Riccati fixed point from P = 0 (regulation value Hessian).
Mat riccati_value(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                  double gamma, double tol = 1e-12, int max_iter = 100000);

// State feedback at the Riccati fixed point, with the same sign
// convention as GainMatrix::Lx(). Independent regulation-case oracle.
Mat riccati_gain(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                 double gamma, double tol = 1e-12, int max_iter = 100000);

}  // namespace qtrack
