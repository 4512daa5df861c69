#pragma once

#include <cstdint>
#include <vector>

#include "rrank/bounds.hpp"
#include "rrank/matrix.hpp"

// Upper bound from a row ordering with few bit flips per column: every
// column becomes the sign pattern of a polynomial with one root per flip.
namespace rrank::perm {

struct PermConfig {
  std::uint64_t seed = 0;
  int order_restarts = 4;    // random starting rows for the greedy chaining
  Exec exec = Exec::serial;  // per-column polynomial construction
};

void validate(const PermConfig& cfg);

struct Flips {
  std::vector<Index> per_column;
  Index max = 0;
  Index total = 0;
};

// Flips of column j: positions p with B(perm[p], j) != B(perm[p+1], j).
Flips column_flips(const BinaryMatrix& B, const Permutation& perm);

// Greedy nearest-neighbour chaining under Hamming distance from several
// starting rows, plus the identity and the row-sum order; the ordering with
// the fewest (max, total) flips wins.
Permutation order_rows(const BinaryMatrix& B, const PermConfig& cfg);

// Threshold-0 factorization of inner dimension (max flips)+1 whose product
// has the sign pattern of 2B-1 with no zero entry. Row i is evaluated at the
// Chebyshev node of its position in perm, and L holds T_0..T_d at that node,
// so R holds Chebyshev coefficients. Throws NumericalError if the
// coefficients leave the double range or the signs cannot be reproduced.
Factorization polynomial_factorization(const BinaryMatrix& B, const Permutation& perm,
                                       Exec exec = Exec::serial);

// (max flips)+1 at tau = 0, one more at any other threshold.
RankEstimate estimate_rank(const BinaryMatrix& B, double tau, const PermConfig& cfg);

}  // namespace rrank::perm
