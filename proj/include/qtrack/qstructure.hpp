#pragma once

#include <utility>
#include <vector>

#include "qtrack/types.hpp"

namespace qtrack {

// The non-redundant entries of a structured symmetric H, enumerated
// row-major over the upper triangle (the enumeration order is part of
// the public contract: weight logs must be comparable across runs).
struct SparsityPattern {
  int dim = 0;                 // size of H
  int n = 0, m = 0, N = 0;     // block layout (n = dim, m = N = 0 for full patterns)
  int q = 0;                   // zero rows/columns of Q
  std::vector<std::pair<int, int>> free_entries;  // (i, j) with i <= j

  int weight_count() const { return static_cast<int>(free_entries.size()); }
  ZLayout layout() const { return ZLayout{n, m, N}; }
};

struct StructuredH {
  Mat H;
  SparsityPattern pattern;
};

// Upper-triangle count excluding only the reference-independent zero
// blocks of the tracking structure.
long count_weights_full(int n, int m, int N);

// Closed-form count with q zero rows/columns of Q. Throws
// NonIntegralCount if the expression does not evaluate to an integer.
long count_weights_sparse(int n, int m, int N, int q);

// Unstructured upper-triangle count p(p+1)/2 with p = (N+2)n + m.
long count_weights_naive(int n, int m, int N);

// Enumerates the free entries for the tracking layout: structural zero
// blocks are skipped, and every zero row/column l of Q removes
//   - column l of the (x, r_i) blocks, i = 0..N,
//   - row l of the (x, r_0) block (that block is a copy of -Q),
//   - column l of the (u, r_i) blocks, i = 1..N,
//   - row and column l of every (r_i, r_j) block.
SparsityPattern build_pattern(int n, int m, int N, const Mat& Q);

// All upper-triangle entries free (used by the comparison baseline).
SparsityPattern full_pattern(int dim);

// Quadratic features ordered as pattern.free_entries:
// z_i * z_j for i != j, 0.5 * z_i^2 for i = j. Satisfies
// w . phi(z) == 0.5 * z' * weights_to_H(w) * z.
Vec phi(const Vec& z, const SparsityPattern& pattern);

// Structural-zero tolerance for H_to_weights, relative to max|H|.
inline constexpr double kStructTolRel = 1e-8;

Mat weights_to_H(const Vec& w, const SparsityPattern& pattern);

// Inverse of weights_to_H on the structured subspace. Throws
// StructureViolation if a structural-zero entry or a symmetry defect
// exceeds kStructTolRel * max|H|.
Vec H_to_weights(const Mat& H, const SparsityPattern& pattern);

}  // namespace qtrack
