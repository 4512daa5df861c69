#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rrank/matrix.hpp"

// Text formats.
//
//   dense:         "m n", then m lines of n tokens in {0,1}
//   sparse:        "m n nnz", then nnz lines "i j" (1-based) marking ones
//   factorization: "m n k tau", then m lines of k reals (L), n lines of k reals (R)
//
// Reals are written in shortest round-trip form, so read(write(x)) == x bit
// for bit.
namespace rrank::io {

enum class MatrixFormat { automatic, dense, sparse };

MatrixFormat parse_format(const std::string& name);

BinaryMatrix read_matrix(std::istream& in, MatrixFormat format = MatrixFormat::automatic,
                         Index max_entries = SparseBinaryMatrix::kDefaultDenseLimit);
BinaryMatrix read_matrix(const std::filesystem::path& path,
                         MatrixFormat format = MatrixFormat::automatic,
                         Index max_entries = SparseBinaryMatrix::kDefaultDenseLimit);
SparseBinaryMatrix read_sparse(std::istream& in);

void write_matrix(std::ostream& out, const BinaryMatrix& B, MatrixFormat format = MatrixFormat::dense);
void write_matrix(const std::filesystem::path& path, const BinaryMatrix& B,
                  MatrixFormat format = MatrixFormat::dense);

Factorization read_factorization(std::istream& in);
Factorization read_factorization(const std::filesystem::path& path);
void write_factorization(std::ostream& out, const Factorization& F);
void write_factorization(const std::filesystem::path& path, const Factorization& F);

std::string format_real(double value);

}  // namespace rrank::io
