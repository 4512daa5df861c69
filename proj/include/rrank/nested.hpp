#pragma once

#include <optional>
#include <vector>

#include "rrank/matrix.hpp"

namespace rrank::nested {

// Every one at (i, j) has ones at all (i', j') with i' <= i and j' <= j.
bool is_directly_nested(const BinaryMatrix& B);

struct NestedCheck {
  bool nested = false;
  Permutation rows;  // B.permuted(rows, cols) is directly nested when nested
  Permutation cols;
};

// Stable sort of rows and columns by decreasing sum, then the direct test.
NestedCheck is_nested(const BinaryMatrix& B);

// Non-negative rank-one factors; round_{1/2}(l r^T) is the candidate matrix.
struct RankOne {
  RealVector l;
  RealVector r;

  BinaryMatrix rounded() const;
  Factorization factorization() const;  // tau = 1/2
};

// Sort by sums, set l_i = (row sum of i), and r = 1/(2q - 1) for the column
// at sorted position q (1-based). Exact on nested inputs; on other inputs it
// yields the nested matrix whose row i holds ones in the row_sum(i) columns
// with the largest sums.
RankOne sum_sorted_rank1(const BinaryMatrix& B);

// Requires is_nested(B); throws InvalidInput otherwise.
RankOne nested_rank1_construct(const BinaryMatrix& B);

struct Rrank1Decision {
  bool yes = false;
  std::optional<Factorization> witness;  // tau = 1/2, signed factors
  Index components = 0;                  // connected components of the one-entries
};

// Rounding rank one at threshold 1/2: at most two connected components of the
// bipartite one-entry graph, each nested. Throws InvalidInput on B = 0.
Rrank1Decision rrank1_decide(const BinaryMatrix& B);

struct NestedSolution : RankOne {
  BinaryMatrix C;                  // round_{1/2}(l r^T), nested
  std::size_t error = 0;           // hamming_error(B, C)
  int iterations = 0;              // sweeps performed
  std::vector<std::size_t> trace;  // error before the first sweep, then after each
  bool degenerate = false;         // some update saw an all-zero opposite factor
};

// Alternating exhaustive search over the breakpoints of each l_i (then each
// r_j). Stops when a sweep does not reduce the error or after max_sweeps.
NestedSolution nexhaust(const BinaryMatrix& B, RankOne seed, int max_sweeps, Exec exec = Exec::serial);
NestedSolution nexhaust(const BinaryMatrix& B, int max_sweeps, Exec exec = Exec::serial);

// Rank-one SVD with absolute-valued factors |u| sqrt(s), |v| sqrt(s).
// Throws InvalidInput on B = 0.
NestedSolution svd_nested(const BinaryMatrix& B);

}  // namespace rrank::nested
