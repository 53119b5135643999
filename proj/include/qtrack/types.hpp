#pragma once

#include <Eigen/Dense>

namespace qtrack {

typedef Eigen::MatrixXd Mat;
typedef Eigen::VectorXd Vec;

// Block layout of the augmented vector z = [x; u; r_0; ...; r_N].
// All H / G / M matrices in this library are indexed through it.
struct ZLayout {
  int n = 0;  // state dimension
  int m = 0;  // input dimension
  int N = 0;  // reference horizon

  int dim() const { return (N + 2) * n + m; }
  int x() const { return 0; }
  int u() const { return n; }
  int r(int i) const { return n + m + i * n; }  // i in 0..N
};

}  // namespace qtrack
