#include "rrank/linalg.hpp"

#include <Eigen/SVD>

#include "rrank/error.hpp"

namespace rrank {

Svd thin_svd(const RealMatrix& A) {
  require_finite(A, "matrix");
  Eigen::BDCSVD<RealMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Svd thin_svd(const BinaryMatrix& B) { return thin_svd(B.to_real()); }

Index numerical_rank(const RealVector& s, double rel_tol) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  const double cutoff = rel_tol * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return r;
}

Factorization truncated_factors(const Svd& svd, Index k, double tau) {
  if (k < 1 || k > svd.s.size()) throw InvalidInput("truncation rank out of range");
  Factorization F;
  F.L = svd.U.leftCols(k) * svd.s.head(k).asDiagonal();
  F.R = svd.V.leftCols(k);
  F.tau = tau;
  return F;
}

}  // namespace rrank
