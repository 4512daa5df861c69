#include "rrank/kernels.hpp"

#include <atomic>

#include "rrank/error.hpp"

namespace rrank::kernels {

RealMatrix product(const RealMatrix& L, const RealMatrix& R, Exec exec) {
  RealMatrix A(L.rows(), R.rows());
  parallel_for(exec, L.rows(), [&](Index i) {
    for (Index j = 0; j < R.rows(); ++j) A(i, j) = dot_rows(L, i, R, j);
  });
  return A;
}

BinaryMatrix round_product(const RealMatrix& L, const RealMatrix& R, double tau, Exec exec) {
  BinaryMatrix B(L.rows(), R.rows());
  parallel_for(exec, L.rows(), [&](Index i) {
    for (Index j = 0; j < R.rows(); ++j) B.set(i, j, dot_rows(L, i, R, j) >= tau);
  });
  return B;
}

std::size_t rounding_mismatches(const BinaryMatrix& target, const RealMatrix& L,
                                const RealMatrix& R, double tau, Exec exec) {
  if (target.rows() != L.rows() || target.cols() != R.rows()) {
    throw ShapeMismatch("factor shapes do not match the target matrix");
  }
  std::vector<std::size_t> per_row(static_cast<std::size_t>(L.rows()), 0);
  parallel_for(exec, L.rows(), [&](Index i) {
    std::size_t count = 0;
    for (Index j = 0; j < R.rows(); ++j) count += (dot_rows(L, i, R, j) >= tau) != target(i, j);
    per_row[static_cast<std::size_t>(i)] = count;
  });
  std::size_t total = 0;
  for (auto c : per_row) total += c;
  return total;
}

BinaryMatrix round_matrix(const RealMatrix& A, double tau, Exec exec) {
  BinaryMatrix B(A.rows(), A.cols());
  parallel_for(exec, A.rows(), [&](Index i) {
    for (Index j = 0; j < A.cols(); ++j) B.set(i, j, A(i, j) >= tau);
  });
  return B;
}

std::size_t hamming(const BinaryMatrix& a, const BinaryMatrix& b, Exec exec) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch("hamming error needs matrices of equal shape");
  }
  std::vector<std::size_t> per_row(static_cast<std::size_t>(a.rows()), 0);
  parallel_for(exec, a.rows(), [&](Index i) {
    const auto* ra = a.row_data(i);
    const auto* rb = b.row_data(i);
    std::size_t count = 0;
    for (Index j = 0; j < a.cols(); ++j) count += ra[j] != rb[j];
    per_row[static_cast<std::size_t>(i)] = count;
  });
  std::size_t total = 0;
  for (auto c : per_row) total += c;
  return total;
}

}  // namespace rrank::kernels
