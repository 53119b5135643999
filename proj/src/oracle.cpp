#include "qtrack/oracle.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "qtrack/errors.hpp"

namespace qtrack {

Vec GainMatrix::control(const Vec& x, const ReferenceWindow& w) const {
  Vec zr(n + static_cast<long>(N) * n);
  zr.head(n) = x;
  for (int j = 1; j <= N; ++j) zr.segment(n + (j - 1) * n, n) = w.entries[j];
  return L * zr;
}

Mat build_cost_core(const Mat& Q, const Mat& R, const ZLayout& lay) {
  Mat G = Mat::Zero(lay.dim(), lay.dim());
  const int n = lay.n, m = lay.m;
  G.block(lay.x(), lay.x(), n, n) = Q;
  G.block(lay.u(), lay.u(), m, m) = R;
  G.block(lay.x(), lay.r(0), n, n) = -Q;
  G.block(lay.r(0), lay.x(), n, n) = -Q;
  G.block(lay.r(0), lay.r(0), n, n) = Q;
  return G;
}

Mat build_closed_loop_map(const GainMatrix& L, const Mat& A, const Mat& B,
                          const ZLayout& lay) {
  const int n = lay.n, m = lay.m, N = lay.N;
  Mat M = Mat::Zero(lay.dim(), lay.dim());
  M.block(lay.x(), lay.x(), n, n) = A;
  M.block(lay.x(), lay.u(), n, m) = B;
  const Mat Lx = L.Lx();
  M.block(lay.u(), lay.x(), m, n) = Lx * A;
  M.block(lay.u(), lay.u(), m, m) = Lx * B;
  // next input replays L_j on r_{j+1}; L_N meets the zero fill and drops
  for (int j = 1; j < N; ++j) {
    M.block(lay.u(), lay.r(j + 1), m, n) = L.Lr(j);
  }
  for (int i = 0; i < N; ++i) {
    M.block(lay.r(i), lay.r(i + 1), n, n) = Mat::Identity(n, n);
  }
  return M;
}

GainMatrix gain_from_H(const Mat& H, const ZLayout& lay) {
  const int n = lay.n, m = lay.m, N = lay.N;
  const Mat huu = 0.5 * (H.block(lay.u(), lay.u(), m, m) +
                         H.block(lay.u(), lay.u(), m, m).transpose());
  Eigen::LLT<Mat> llt(huu);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("h_uu is not positive definite");
  }
  Mat rhs(m, n + static_cast<long>(N) * n);
  rhs.leftCols(n) = H.block(lay.u(), lay.x(), m, n);
  for (int j = 1; j <= N; ++j) {
    rhs.middleCols(n + (j - 1) * n, n) = H.block(lay.u(), lay.r(j), m, n);
  }
  return GainMatrix{-llt.solve(rhs), n, m, N};
}

OracleResult model_value_iteration(const Mat& A, const Mat& B, const Mat& Q,
                                   const Mat& R, double gamma, int N,
                                   double tol, int max_iter) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  const ZLayout lay{n, m, N};
  const Mat G = build_cost_core(Q, R, lay);

  OracleResult out;
  out.pattern = build_pattern(n, m, N, Q);
  Mat H = Mat::Zero(lay.dim(), lay.dim());
  GainMatrix L = GainMatrix::zero(n, m, N);
  out.trace.iterates.push_back(H);

  for (int i = 0; i < max_iter; ++i) {
    const Mat M = build_closed_loop_map(L, A, B, lay);
    Mat Hn = G + gamma * M.transpose() * H * M;
    Hn = 0.5 * (Hn + Hn.transpose()).eval();
    const double delta = (Hn - H).cwiseAbs().maxCoeff();
    H = Hn;
    out.trace.iterates.push_back(H);
    out.trace.deltas.push_back(delta);
    L = gain_from_H(H, lay);
    if (delta < tol) {
      out.trace.iterations = i + 1;
      out.H = H;
      out.gain = L;
      return out;
    }
  }
  throw MaxIterationsExceeded("value iteration did not converge");
}

Mat finite_horizon_dp(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                      double gamma, int N, int K) {
  if (K < N) throw std::invalid_argument("finite_horizon_dp requires K >= N");
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());

  // S holds the Hessian of the stage value over [x; u; r_kappa; ...; r_K].
  Mat S = Mat::Zero(2 * n + m, 2 * n + m);
  S.block(0, 0, n, n) = Q;
  S.block(n, n, m, m) = R;
  S.block(0, n + m, n, n) = -Q;
  S.block(n + m, 0, n, n) = -Q;
  S.block(n + m, n + m, n, n) = Q;

  for (int kappa = K - 1; kappa >= 0; --kappa) {
    const int d = static_cast<int>(S.rows());
    const int dr = d - n - m;  // trailing reference block

    // eliminate u analytically: Schur complement onto [x; r_{kappa+1..K}]
    const Mat Suu = 0.5 * (S.block(n, n, m, m) + S.block(n, n, m, m).transpose());
    Eigen::LLT<Mat> llt(Suu);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite("stage Hessian in u is not positive definite");
    }
    Mat Sur(m, n + dr);
    Sur.leftCols(n) = S.block(n, 0, m, n);
    Sur.rightCols(dr) = S.block(n, n + m, m, dr);
    Mat P(n + dr, n + dr);
    P.block(0, 0, n, n) = S.block(0, 0, n, n);
    P.block(0, n, n, dr) = S.block(0, n + m, n, dr);
    P.block(n, 0, dr, n) = S.block(n + m, 0, dr, n);
    P.block(n, n, dr, dr) = S.block(n + m, n + m, dr, dr);
    P -= Sur.transpose() * llt.solve(Sur);

    // substitute x' = A x + B u and insert the r_kappa slot
    const Mat Pxx = P.block(0, 0, n, n);
    const Mat PxR = P.block(0, n, n, dr);
    const Mat PRR = P.block(n, n, dr, dr);
    const int dn = n + m + n + dr;
    Mat Sn = Mat::Zero(dn, dn);
    Sn.block(0, 0, n, n) = gamma * (A.transpose() * Pxx * A);
    Sn.block(0, n, n, m) = gamma * (A.transpose() * Pxx * B);
    Sn.block(n, 0, m, n) = gamma * (B.transpose() * Pxx * A);
    Sn.block(n, n, m, m) = gamma * (B.transpose() * Pxx * B);
    Sn.block(0, n + m + n, n, dr) = gamma * (A.transpose() * PxR);
    Sn.block(n, n + m + n, m, dr) = gamma * (B.transpose() * PxR);
    Sn.block(n + m + n, 0, dr, n) = Sn.block(0, n + m + n, n, dr).transpose();
    Sn.block(n + m + n, n, dr, m) = Sn.block(n, n + m + n, m, dr).transpose();
    Sn.block(n + m + n, n + m + n, dr, dr) = gamma * PRR;

    // stage cost on (x, u, r_kappa)
    Sn.block(0, 0, n, n) += Q;
    Sn.block(n, n, m, m) += R;
    Sn.block(0, n + m, n, n) -= Q;
    Sn.block(n + m, 0, n, n) -= Q;
    Sn.block(n + m, n + m, n, n) += Q;

    S = 0.5 * (Sn + Sn.transpose());
  }

  const int p = ZLayout{n, m, N}.dim();
  return S.topLeftCorner(p, p);
}

Mat riccati_value(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                  double gamma, double tol, int max_iter) {
  const int n = static_cast<int>(A.rows());
  Mat P = Mat::Zero(n, n);
  for (int i = 0; i < max_iter; ++i) {
    const Mat S = R + gamma * B.transpose() * P * B;
    Eigen::LLT<Mat> llt(0.5 * (S + S.transpose()).eval());
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite("Riccati input Hessian is not positive definite");
    }
    Mat Pn = Q + gamma * A.transpose() * P * A -
             gamma * gamma * A.transpose() * P * B *
                 llt.solve(B.transpose() * P * A);
    Pn = 0.5 * (Pn + Pn.transpose()).eval();
    if (!Pn.allFinite()) throw MaxIterationsExceeded("Riccati iteration diverged");
    const double delta = (Pn - P).cwiseAbs().maxCoeff();
    P = Pn;
    if (delta < tol) return P;
  }
  throw MaxIterationsExceeded("Riccati iteration did not converge");
}

Mat riccati_gain(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                 double gamma, double tol, int max_iter) {
  const Mat P = riccati_value(A, B, Q, R, gamma, tol, max_iter);
  const Mat S = R + gamma * B.transpose() * P * B;
  return -gamma * S.llt().solve(B.transpose() * P * A);
}

}  // namespace qtrack
