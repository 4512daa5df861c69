#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "rrank/exec.hpp"

namespace rrank {

using Index = Eigen::Index;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SignMatrix = Eigen::Matrix<signed char, Eigen::Dynamic, Eigen::Dynamic>;

// perm[p] is the original index placed at position p.
using Permutation = std::vector<Index>;

// All randomness goes through one explicitly passed 64-bit generator.
using Rng = std::mt19937_64;

// Dense m x n matrix over {0,1}, row-major.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(Index rows, Index cols);

  static BinaryMatrix zeros(Index rows, Index cols);
  static BinaryMatrix ones(Index rows, Index cols);
  static BinaryMatrix identity(Index n);
  // Ones on and above the main diagonal.
  static BinaryMatrix upper_triangle(Index n);
  static BinaryMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);
  // Every entry must be exactly 0.0 or 1.0.
  static BinaryMatrix from_real(const RealMatrix& values);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index size() const noexcept { return rows_ * cols_; }
  bool empty() const noexcept { return size() == 0; }

  bool operator()(Index i, Index j) const noexcept {
    return data_[static_cast<std::size_t>(i * cols_ + j)] != 0;
  }
  void set(Index i, Index j, bool value) noexcept {
    data_[static_cast<std::size_t>(i * cols_ + j)] = value ? 1 : 0;
  }
  void flip(Index i, Index j) noexcept {
    auto& cell = data_[static_cast<std::size_t>(i * cols_ + j)];
    cell = cell ? 0 : 1;
  }
  const std::uint8_t* row_data(Index i) const noexcept {
    return data_.data() + i * cols_;
  }

  Index nnz() const noexcept;
  Index row_sum(Index i) const noexcept;
  Index col_sum(Index j) const noexcept;
  std::vector<Index> row_sums() const;
  std::vector<Index> col_sums() const;

  BinaryMatrix transposed() const;
  // result(p, q) = (*this)(rows[p], cols[q]).
  BinaryMatrix permuted(const Permutation& rows, const Permutation& cols) const;
  BinaryMatrix complement() const;
  RealMatrix to_real() const;

  friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<std::uint8_t> data_;
};

// Coordinate list of the one-entries (0-based).
struct SparseBinaryMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<std::pair<Index, Index>> ones;

  static SparseBinaryMatrix from_dense(const BinaryMatrix& dense);
  // Refuses to allocate more than max_entries cells.
  BinaryMatrix to_dense(Index max_entries = kDefaultDenseLimit) const;

  static constexpr Index kDefaultDenseLimit = 100'000'000;
};

// A rounding-rank decomposition candidate: round_tau(L R^T).
struct Factorization {
  RealMatrix L;  // m x k
  RealMatrix R;  // n x k
  double tau = 0.5;

  Index rows() const noexcept { return L.rows(); }
  Index cols() const noexcept { return R.rows(); }
  Index rank() const noexcept { return L.cols(); }

  // Throws InvalidInput on mismatched inner dimensions, k < 1, or non-finite
  // entries.
  void validate() const;
  RealMatrix reconstruct(Exec exec = Exec::serial) const;
  BinaryMatrix rounded(Exec exec = Exec::serial) const;
  // Number of entries where round_tau(L R^T) differs from target.
  std::size_t mismatches(const BinaryMatrix& target, Exec exec = Exec::serial) const;
  bool rounds_to(const BinaryMatrix& target, Exec exec = Exec::serial) const {
    return mismatches(target, exec) == 0;
  }
};

// A binary matrix together with the factorization it was rounded from.
struct Decomposition {
  BinaryMatrix C;
  Factorization F;
  std::size_t error = 0;  // hamming_error(B, C)
};

// output(i,j) = 1 iff A(i,j) >= tau. Throws InvalidInput on non-finite entries.
BinaryMatrix round_threshold(const RealMatrix& A, double tau);
SignMatrix to_sign(const BinaryMatrix& B);

bool is_mixed_by_columns(const BinaryMatrix& B);
bool is_mixed_by_rows(const BinaryMatrix& B);
// Either orientation qualifies.
bool is_mixed(const BinaryMatrix& B);

std::size_t hamming_error(const BinaryMatrix& B, const BinaryMatrix& C);
// hamming_error / nnz(B); throws InvalidInput when B has no ones.
double relative_error(const BinaryMatrix& B, const BinaryMatrix& C);

void require_finite(const RealMatrix& A, const char* what);
Permutation identity_permutation(Index n);
Permutation inverse(const Permutation& perm);

}  // namespace rrank
