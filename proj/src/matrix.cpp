#include "rrank/matrix.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "rrank/error.hpp"
#include "rrank/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rrank {

void set_thread_limit(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int thread_limit() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

BinaryMatrix::BinaryMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) {
    throw InvalidInput("binary matrix dimensions must be positive, got " +
                       std::to_string(rows) + "x" + std::to_string(cols));
  }
  data_.assign(static_cast<std::size_t>(rows * cols), 0);
}

BinaryMatrix BinaryMatrix::zeros(Index rows, Index cols) { return BinaryMatrix(rows, cols); }

BinaryMatrix BinaryMatrix::ones(Index rows, Index cols) {
  BinaryMatrix B(rows, cols);
  std::fill(B.data_.begin(), B.data_.end(), 1);
  return B;
}

BinaryMatrix BinaryMatrix::identity(Index n) {
  BinaryMatrix B(n, n);
  for (Index i = 0; i < n; ++i) B.set(i, i, true);
  return B;
}

BinaryMatrix BinaryMatrix::upper_triangle(Index n) {
  BinaryMatrix B(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) B.set(i, j, true);
  return B;
}

BinaryMatrix BinaryMatrix::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  const Index m = static_cast<Index>(rows.size());
  const Index n = m == 0 ? 0 : static_cast<Index>(rows.begin()->size());
  BinaryMatrix B(m, n);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != n) throw ShapeMismatch("ragged rows in from_rows");
    Index j = 0;
    for (int v : row) {
      if (v != 0 && v != 1) throw InvalidInput("binary entries must be 0 or 1");
      B.set(i, j++, v == 1);
    }
    ++i;
  }
  return B;
}

BinaryMatrix BinaryMatrix::from_real(const RealMatrix& values) {
  BinaryMatrix B(values.rows(), values.cols());
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      if (v != 0.0 && v != 1.0) throw InvalidInput("entry is not exactly 0 or 1");
      B.set(i, j, v == 1.0);
    }
  }
  return B;
}

Index BinaryMatrix::nnz() const noexcept {
  return std::accumulate(data_.begin(), data_.end(), Index{0});
}

Index BinaryMatrix::row_sum(Index i) const noexcept {
  const auto* row = row_data(i);
  return std::accumulate(row, row + cols_, Index{0});
}

Index BinaryMatrix::col_sum(Index j) const noexcept {
  Index sum = 0;
  for (Index i = 0; i < rows_; ++i) sum += (*this)(i, j);
  return sum;
}

std::vector<Index> BinaryMatrix::row_sums() const {
  std::vector<Index> sums(static_cast<std::size_t>(rows_));
  for (Index i = 0; i < rows_; ++i) sums[static_cast<std::size_t>(i)] = row_sum(i);
  return sums;
}

std::vector<Index> BinaryMatrix::col_sums() const {
  std::vector<Index> sums(static_cast<std::size_t>(cols_), 0);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) sums[static_cast<std::size_t>(j)] += (*this)(i, j);
  return sums;
}

BinaryMatrix BinaryMatrix::transposed() const {
  BinaryMatrix T(cols_, rows_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) T.set(j, i, (*this)(i, j));
  return T;
}

BinaryMatrix BinaryMatrix::permuted(const Permutation& rows, const Permutation& cols) const {
  if (static_cast<Index>(rows.size()) != rows_ || static_cast<Index>(cols.size()) != cols_) {
    throw ShapeMismatch("permutation length does not match matrix shape");
  }
  BinaryMatrix P(rows_, cols_);
  for (Index p = 0; p < rows_; ++p)
    for (Index q = 0; q < cols_; ++q)
      P.set(p, q, (*this)(rows[static_cast<std::size_t>(p)], cols[static_cast<std::size_t>(q)]));
  return P;
}

BinaryMatrix BinaryMatrix::complement() const {
  BinaryMatrix C = *this;
  for (auto& v : C.data_) v = v ? 0 : 1;
  return C;
}

RealMatrix BinaryMatrix::to_real() const {
  RealMatrix A(rows_, cols_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) A(i, j) = (*this)(i, j) ? 1.0 : 0.0;
  return A;
}

SparseBinaryMatrix SparseBinaryMatrix::from_dense(const BinaryMatrix& dense) {
  SparseBinaryMatrix S{dense.rows(), dense.cols(), {}};
  for (Index i = 0; i < dense.rows(); ++i)
    for (Index j = 0; j < dense.cols(); ++j)
      if (dense(i, j)) S.ones.emplace_back(i, j);
  return S;
}

BinaryMatrix SparseBinaryMatrix::to_dense(Index max_entries) const {
  if (rows <= 0 || cols <= 0) throw InvalidInput("sparse matrix dimensions must be positive");
  if (rows > max_entries / cols) {
    throw InvalidInput("matrix with " + std::to_string(rows) + "x" + std::to_string(cols) +
                       " cells exceeds the dense size limit of " + std::to_string(max_entries));
  }
  BinaryMatrix B(rows, cols);
  for (const auto& [i, j] : ones) {
    if (i < 0 || i >= rows || j < 0 || j >= cols) throw InvalidInput("sparse entry out of range");
    if (B(i, j)) throw InvalidInput("duplicate sparse entry");
    B.set(i, j, true);
  }
  return B;
}

void Factorization::validate() const {
  if (L.cols() < 1) throw InvalidInput("factorization inner dimension must be at least 1");
  if (L.cols() != R.cols()) {
    throw ShapeMismatch("factorization inner dimensions differ: L has " +
                        std::to_string(L.cols()) + ", R has " + std::to_string(R.cols()));
  }
  if (!std::isfinite(tau)) throw InvalidInput("rounding threshold must be finite");
  require_finite(L, "L");
  require_finite(R, "R");
}

RealMatrix Factorization::reconstruct(Exec exec) const {
  validate();
  return kernels::product(L, R, exec);
}

BinaryMatrix Factorization::rounded(Exec exec) const {
  validate();
  return kernels::round_product(L, R, tau, exec);
}

std::size_t Factorization::mismatches(const BinaryMatrix& target, Exec exec) const {
  validate();
  if (target.rows() != rows() || target.cols() != cols()) {
    throw ShapeMismatch("factorization shape does not match target matrix");
  }
  return kernels::rounding_mismatches(target, L, R, tau, exec);
}

void require_finite(const RealMatrix& A, const char* what) {
  if (!A.allFinite()) throw InvalidInput(std::string(what) + " contains non-finite entries");
}

BinaryMatrix round_threshold(const RealMatrix& A, double tau) {
  require_finite(A, "matrix");
  if (!std::isfinite(tau)) throw InvalidInput("rounding threshold must be finite");
  return kernels::round_matrix(A, tau, Exec::serial);
}

SignMatrix to_sign(const BinaryMatrix& B) {
  SignMatrix S(B.rows(), B.cols());
  for (Index i = 0; i < B.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j) S(i, j) = B(i, j) ? 1 : -1;
  return S;
}

bool is_mixed_by_columns(const BinaryMatrix& B) {
  for (Index s : B.col_sums())
    if (s == 0 || s == B.rows()) return false;
  return true;
}

bool is_mixed_by_rows(const BinaryMatrix& B) {
  for (Index s : B.row_sums())
    if (s == 0 || s == B.cols()) return false;
  return true;
}

bool is_mixed(const BinaryMatrix& B) { return is_mixed_by_columns(B) || is_mixed_by_rows(B); }

std::size_t hamming_error(const BinaryMatrix& B, const BinaryMatrix& C) {
  return kernels::hamming(B, C, Exec::serial);
}

double relative_error(const BinaryMatrix& B, const BinaryMatrix& C) {
  const Index nnz = B.nnz();
  if (nnz == 0) throw InvalidInput("relative error is undefined for an all-zero matrix");
  return static_cast<double>(hamming_error(B, C)) / static_cast<double>(nnz);
}

Permutation identity_permutation(Index n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  return p;
}

Permutation inverse(const Permutation& perm) {
  Permutation inv(perm.size());
  for (std::size_t p = 0; p < perm.size(); ++p) inv[static_cast<std::size_t>(perm[p])] = static_cast<Index>(p);
  return inv;
}

}  // namespace rrank
