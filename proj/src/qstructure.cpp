#include "qtrack/qstructure.hpp"

#include <cmath>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {

// Block id along the z layout: 0 = x, 1 = u, 2 + t = r_t.
struct BlockPos {
  int block;
  int offset;
};

BlockPos block_of(int idx, int n, int m) {
  if (idx < n) return {0, idx};
  if (idx < n + m) return {1, idx - n};
  const int t = (idx - n - m) / n;
  return {2 + t, (idx - n - m) % n};
}

}  // namespace

long count_weights_naive(int n, int m, int N) {
  const long p = static_cast<long>(N + 2) * n + m;
  return p * (p + 1) / 2;
}

long count_weights_full(int n, int m, int N) {
  const long nl = n, ml = m, Nl = N;
  return count_weights_naive(n, m, N) - (nl * nl * (2 * Nl - 1) + ml * nl);
}

long count_weights_sparse(int n, int m, int N, int q) {
  if (q < 0 || q > n) throw std::invalid_argument("q must lie in [0, n]");
  const long s = n - q, ml = m, nl = n, Nl = N;
  const long two_L = s * (s + 1) * (Nl + 2)            // (n-q)(n-q+1)(N/2 + 1) * 2
                     + nl * (nl + 1)                   // n(n+1)/2 * 2
                     + 2 * (ml + Nl * s) * (ml + nl)   // (m + N(n-q))(m+n) * 2
                     + (Nl - 2) * (Nl - 1) * s * s;    // (N-2)(N-1)(n-q)^2 / 2 * 2
  if (two_L % 2 != 0) throw NonIntegralCount("sparse weight count is not integral");
  return two_L / 2;
}

SparsityPattern build_pattern(int n, int m, int N, const Mat& Q) {
  if (Q.rows() != n || Q.cols() != n) throw DimensionMismatch("Q must be n x n");
  std::vector<bool> zero_rc(n, false);
  int q = 0;
  for (int l = 0; l < n; ++l) {
    if (Q.row(l).isZero(0.0) && Q.col(l).isZero(0.0)) {
      zero_rc[l] = true;
      ++q;
    }
  }

  SparsityPattern pat;
  pat.n = n;
  pat.m = m;
  pat.N = N;
  pat.q = q;
  pat.dim = ZLayout{n, m, N}.dim();

  for (int i = 0; i < pat.dim; ++i) {
    const BlockPos bi = block_of(i, n, m);
    for (int j = i; j < pat.dim; ++j) {
      const BlockPos bj = block_of(j, n, m);
      const bool i_x = bi.block == 0, i_u = bi.block == 1;
      const bool j_r = bj.block >= 2;
      const int tj = bj.block - 2;

      if (i_u && j_r && tj == 0) continue;                       // h_u_r0 = 0
      if (bi.block == 2 && j_r && tj >= 1) continue;             // h_r0_rj = 0, j >= 1
      if (bi.block == 3 && j_r && tj >= 2) continue;             // h_r1_rj = 0, j >= 2

      if (i_x && j_r) {
        if (zero_rc[bj.offset]) continue;                        // zero column of Q
        if (tj == 0 && zero_rc[bi.offset]) continue;             // h_x_r0 is a copy of -Q
      }
      if (i_u && j_r && zero_rc[bj.offset]) continue;
      if (bi.block >= 2 && j_r && (zero_rc[bi.offset] || zero_rc[bj.offset])) continue;

      pat.free_entries.emplace_back(i, j);
    }
  }
  return pat;
}

SparsityPattern full_pattern(int dim) {
  SparsityPattern pat;
  pat.dim = dim;
  pat.n = dim;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) pat.free_entries.emplace_back(i, j);
  }
  return pat;
}

Vec phi(const Vec& z, const SparsityPattern& pattern) {
  if (z.size() != pattern.dim) throw DimensionMismatch("z does not match pattern");
  Vec f(pattern.weight_count());
  for (int l = 0; l < pattern.weight_count(); ++l) {
    const auto [i, j] = pattern.free_entries[l];
    f(l) = (i == j) ? 0.5 * z(i) * z(i) : z(i) * z(j);
  }
  return f;
}

Mat weights_to_H(const Vec& w, const SparsityPattern& pattern) {
  if (w.size() != pattern.weight_count()) {
    throw DimensionMismatch("w does not match pattern");
  }
  Mat H = Mat::Zero(pattern.dim, pattern.dim);
  for (int l = 0; l < pattern.weight_count(); ++l) {
    const auto [i, j] = pattern.free_entries[l];
    H(i, j) = w(l);
    H(j, i) = w(l);
  }
  return H;
}

Vec H_to_weights(const Mat& H, const SparsityPattern& pattern) {
  if (H.rows() != pattern.dim || H.cols() != pattern.dim) {
    throw DimensionMismatch("H does not match pattern");
  }
  const double tol = kStructTolRel * H.cwiseAbs().maxCoeff();
  Mat mask = Mat::Zero(pattern.dim, pattern.dim);
  Vec w(pattern.weight_count());
  for (int l = 0; l < pattern.weight_count(); ++l) {
    const auto [i, j] = pattern.free_entries[l];
    if (std::abs(H(i, j) - H(j, i)) > tol) {
      throw StructureViolation("H is not symmetric on a free entry");
    }
    w(l) = H(i, j);
    mask(i, j) = 1.0;
    mask(j, i) = 1.0;
  }
  for (int i = 0; i < pattern.dim; ++i) {
    for (int j = 0; j < pattern.dim; ++j) {
      if (mask(i, j) == 0.0 && std::abs(H(i, j)) > tol) {
        throw StructureViolation("structural-zero entry of H is non-negligible");
      }
    }
  }
  return w;
}

}  // namespace qtrack
