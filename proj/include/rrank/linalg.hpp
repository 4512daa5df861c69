#pragma once

#include "rrank/matrix.hpp"

namespace rrank {

// Thin SVD A = U diag(s) V^T with s sorted non-increasing.
struct Svd {
  RealMatrix U;
  RealVector s;
  RealMatrix V;
};

Svd thin_svd(const RealMatrix& A);
Svd thin_svd(const BinaryMatrix& B);

// Number of singular values above rel_tol * s(0).
Index numerical_rank(const RealVector& s, double rel_tol);

// Witness factors of the rank-k truncation: L = U_k diag(s_k), R = V_k.
Factorization truncated_factors(const Svd& svd, Index k, double tau);

}  // namespace rrank
