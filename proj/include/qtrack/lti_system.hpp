#pragma once

#include <vector>

#include "qtrack/types.hpp"

namespace qtrack {

// Discrete-time plant x_{k+1} = A x_k + B u_k. Ground truth for
// simulation; the learner only ever touches it through step().
struct PlantModel {
  Mat A;
  Mat B;
  int n;
  int m;

  // Validates shapes and rejects uncontrollable pairs.
  PlantModel(Mat A_in, Mat B_in);
};

// Quadratic stage-cost parameters: Q PSD, R PD, discount in [0, 1).
struct CostParams {
  Mat Q;
  Mat R;
  double gamma;

  CostParams(Mat Q_in, Mat R_in, double gamma_in);
};

struct Trajectory {
  std::vector<Vec> states;     // length T+1
  std::vector<Vec> inputs;     // length T
  std::vector<double> costs;   // length T
};

// Norm bound above which simulations abort with DivergedState.
inline constexpr double kDivergenceNorm = 1e8;

// Relative eigenvalue threshold for the PSD/PD gates.
inline constexpr double kPsdTol = 1e-10;

Vec step(const PlantModel& model, const Vec& x, const Vec& u);

// 0.5 * ((x - r)' Q (x - r) + u' R u)
double one_step_cost(const CostParams& cp, const Vec& x, const Vec& u,
                     const Vec& r);

// sum_i gamma^i costs[i] over the logged horizon.
double discounted_cost(const CostParams& cp, const Trajectory& traj);

// SVD rank of [B, AB, ..., A^{n-1}B] with cutoff 1e-10 * sigma_max.
bool is_controllable(const Mat& A, const Mat& B);

// Throws DivergedState when ||x|| > kDivergenceNorm.
void check_state(const Vec& x);

// Indices of coordinates with a nonzero row or column in Q (the tracked
// coordinates; references live only on these).
std::vector<int> tracked_coords(const Mat& Q);

}  // namespace qtrack
