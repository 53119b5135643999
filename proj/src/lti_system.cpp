#include "qtrack/lti_system.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {

void require_symmetric(const Mat& S, const char* name) {
  if (S.rows() != S.cols()) {
    throw DimensionMismatch(std::string(name) + " must be square");
  }
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DimensionMismatch(std::string(name) + " must be symmetric");
  }
}

}  // namespace

bool is_controllable(const Mat& A, const Mat& B) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Mat ctrb(n, n * m);
  Mat AkB = B;
  for (int k = 0; k < n; ++k) {
    ctrb.middleCols(k * m, m) = AkB;
    AkB = A * AkB;
  }
  Eigen::JacobiSVD<Mat> svd(ctrb);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return false;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  }
  return rank == n;
}

PlantModel::PlantModel(Mat A_in, Mat B_in)
    : A(std::move(A_in)), B(std::move(B_in)) {
  if (A.rows() != A.cols()) throw DimensionMismatch("A must be square");
  if (B.rows() != A.rows()) throw DimensionMismatch("B must have n rows");
  if (B.cols() < 1) throw DimensionMismatch("B must have at least one column");
  n = static_cast<int>(A.rows());
  m = static_cast<int>(B.cols());
  if (!is_controllable(A, B)) {
    throw NotControllable("(A, B) fails the controllability rank test");
  }
}

CostParams::CostParams(Mat Q_in, Mat R_in, double gamma_in)
    : Q(std::move(Q_in)), R(std::move(R_in)), gamma(gamma_in) {
  require_symmetric(Q, "Q");
  require_symmetric(R, "R");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1)");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eq(Q);
  const double qscale = std::max(1.0, eq.eigenvalues().cwiseAbs().maxCoeff());
  if (eq.eigenvalues().minCoeff() < -kPsdTol * qscale) {
    throw NotPositiveDefinite("Q must be positive semidefinite");
  }
  Eigen::SelfAdjointEigenSolver<Mat> er(R);
  const double rscale = std::max(1.0, er.eigenvalues().cwiseAbs().maxCoeff());
  if (er.eigenvalues().minCoeff() <= kPsdTol * rscale) {
    throw NotPositiveDefinite("R must be positive definite");
  }
}

Vec step(const PlantModel& model, const Vec& x, const Vec& u) {
  if (x.size() != model.n) throw DimensionMismatch("state dimension");
  if (u.size() != model.m) throw DimensionMismatch("input dimension");
  return model.A * x + model.B * u;
}

double one_step_cost(const CostParams& cp, const Vec& x, const Vec& u,
                     const Vec& r) {
  if (x.size() != cp.Q.rows() || r.size() != cp.Q.rows()) {
    throw DimensionMismatch("state/reference dimension");
  }
  if (u.size() != cp.R.rows()) throw DimensionMismatch("input dimension");
  const Vec e = x - r;
  return 0.5 * (e.dot(cp.Q * e) + u.dot(cp.R * u));
}

double discounted_cost(const CostParams& cp, const Trajectory& traj) {
  double sum = 0.0;
  double g = 1.0;
  for (double c : traj.costs) {
    sum += g * c;
    g *= cp.gamma;
  }
  return sum;
}

void check_state(const Vec& x) {
  if (!x.allFinite() || x.norm() > kDivergenceNorm) {
    throw DivergedState("state norm exceeded divergence guard");
  }
}

std::vector<int> tracked_coords(const Mat& Q) {
  std::vector<int> out;
  for (int l = 0; l < Q.rows(); ++l) {
    if (!Q.row(l).isZero(0.0) || !Q.col(l).isZero(0.0)) out.push_back(l);
  }
  return out;
}

}  // namespace qtrack
