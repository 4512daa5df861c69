#pragma once

#include <cstddef>

#include "rrank/exec.hpp"
#include "rrank/matrix.hpp"

// Dense product/rounding kernels shared by every estimator.
//
// Entry (i, j) of L R^T is always accumulated left to right over the inner
// dimension, in both the serial and the OpenMP path, so that a witness
// verified here verifies identically everywhere else (CLI, file round trip,
// parallel runs).
namespace rrank::kernels {

inline double dot_rows(const RealMatrix& L, Index i, const RealMatrix& R, Index j) {
  double sum = 0.0;
  const Index k = L.cols();
  for (Index t = 0; t < k; ++t) sum += L(i, t) * R(j, t);
  return sum;
}

RealMatrix product(const RealMatrix& L, const RealMatrix& R, Exec exec);
BinaryMatrix round_product(const RealMatrix& L, const RealMatrix& R, double tau, Exec exec);
std::size_t rounding_mismatches(const BinaryMatrix& target, const RealMatrix& L,
                                const RealMatrix& R, double tau, Exec exec);
BinaryMatrix round_matrix(const RealMatrix& A, double tau, Exec exec);
std::size_t hamming(const BinaryMatrix& a, const BinaryMatrix& b, Exec exec);

}  // namespace rrank::kernels
