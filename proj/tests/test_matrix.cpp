#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "rrank/error.hpp"
#include "rrank/io.hpp"
#include "rrank/kernels.hpp"
#include "rrank/matrix.hpp"
#include "support.hpp"

using namespace rrank;

TEST_CASE("rounding is inclusive at the threshold") {
  RealMatrix A(1, 2);
  A << 0.5, 0.49;
  CHECK(round_threshold(A, 0.5) == BinaryMatrix::from_rows({{1, 0}}));
}

TEST_CASE("rounding rejects non-finite entries") {
  RealMatrix A = RealMatrix::Zero(2, 2);
  A(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(round_threshold(A, 0.5), InvalidInput);
  A(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(round_threshold(A, 0.5), InvalidInput);
}

TEST_CASE("rounding a binary matrix at one half is the identity") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BinaryMatrix B = testing::random_binary(7, 9, 0.4, seed);
    CHECK(round_threshold(B.to_real(), 0.5) == B);
    CHECK(round_threshold(round_threshold(B.to_real(), 0.5).to_real(), 0.5) == B);
  }
}

TEST_CASE("shifting the matrix shifts the threshold") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    // Dyadic entries keep A - tau exact.
    RealMatrix A = (testing::random_real(6, 5, seed) * 8.0).array().round() / 8.0;
    const double tau = 0.25 * static_cast<double>(seed % 5);
    const RealMatrix shifted = A.array() - tau;
    CHECK(round_threshold(A, tau) == round_threshold(shifted, 0.0));
  }
}

TEST_CASE("sign matrix") {
  const SignMatrix s = to_sign(BinaryMatrix::from_rows({{0, 1}}));
  CHECK(s(0, 0) == -1);
  CHECK(s(0, 1) == 1);
  CHECK((to_sign(BinaryMatrix::ones(2, 2)).array() == 1).all());
  const SignMatrix i2 = to_sign(BinaryMatrix::identity(2));
  CHECK(i2(0, 0) == 1);
  CHECK(i2(0, 1) == -1);
  CHECK(i2(1, 0) == -1);
  CHECK(i2(1, 1) == 1);
}

TEST_CASE("mixed matrices") {
  CHECK(is_mixed(BinaryMatrix::identity(3)));
  CHECK_FALSE(is_mixed(BinaryMatrix::ones(2, 2)));
  const BinaryMatrix B = BinaryMatrix::from_rows({{1, 0}, {1, 1}});
  CHECK_FALSE(is_mixed_by_columns(B));
  CHECK_FALSE(is_mixed_by_rows(B));
  CHECK_FALSE(is_mixed(B));
  const BinaryMatrix rows_only = BinaryMatrix::from_rows({{1, 0}, {1, 0}});
  CHECK(is_mixed_by_rows(rows_only));
  CHECK_FALSE(is_mixed_by_columns(rows_only));
  CHECK(is_mixed(rows_only));
}

TEST_CASE("hamming and relative error") {
  const BinaryMatrix I2 = BinaryMatrix::identity(2);
  CHECK(hamming_error(I2, I2) == 0);
  CHECK(hamming_error(I2, BinaryMatrix::ones(2, 2)) == 2);
  CHECK(hamming_error(BinaryMatrix::zeros(3, 3), BinaryMatrix::identity(3)) == 3);
  CHECK(relative_error(I2, I2) == 0.0);
  CHECK(relative_error(I2, BinaryMatrix::zeros(2, 2)) == 1.0);
  CHECK(relative_error(BinaryMatrix::identity(3), BinaryMatrix::ones(3, 3)) == 2.0);
  CHECK_THROWS_AS(relative_error(BinaryMatrix::zeros(2, 2), I2), InvalidInput);
  CHECK_THROWS_AS(hamming_error(I2, BinaryMatrix::identity(3)), ShapeMismatch);
}

TEST_CASE("hamming error is a metric") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = testing::random_binary(5, 6, 0.5, 3 * seed);
    const auto b = testing::random_binary(5, 6, 0.5, 3 * seed + 1);
    const auto c = testing::random_binary(5, 6, 0.5, 3 * seed + 2);
    CHECK(hamming_error(a, b) == hamming_error(b, a));
    CHECK(hamming_error(a, c) <= hamming_error(a, b) + hamming_error(b, c));
    CHECK((hamming_error(a, b) == 0) == (a == b));
  }
}

TEST_CASE("matrices need positive dimensions") {
  CHECK_THROWS_AS(BinaryMatrix(0, 3), InvalidInput);
  CHECK_THROWS_AS(BinaryMatrix(2, 0), InvalidInput);
  RealMatrix bad(1, 1);
  bad << 0.5;
  CHECK_THROWS_AS(BinaryMatrix::from_real(bad), InvalidInput);
}

TEST_CASE("sparse and dense storage agree") {
  const BinaryMatrix B = testing::random_binary(8, 5, 0.3, 11);
  const SparseBinaryMatrix S = SparseBinaryMatrix::from_dense(B);
  CHECK(S.ones.size() == static_cast<std::size_t>(B.nnz()));
  CHECK(S.to_dense() == B);
  CHECK_THROWS_AS(S.to_dense(10), InvalidInput);
  SparseBinaryMatrix dup{2, 2, {{0, 0}, {0, 0}}};
  CHECK_THROWS_AS(dup.to_dense(), InvalidInput);
  SparseBinaryMatrix out_of_range{2, 2, {{2, 0}}};
  CHECK_THROWS_AS(out_of_range.to_dense(), InvalidInput);
}

TEST_CASE("permutations") {
  const BinaryMatrix B = testing::random_binary(4, 5, 0.5, 3);
  const Permutation rows{2, 0, 3, 1};
  const Permutation cols{4, 3, 2, 1, 0};
  const BinaryMatrix P = B.permuted(rows, cols);
  CHECK(P(0, 0) == B(2, 4));
  CHECK(P.permuted(inverse(rows), inverse(cols)) == B);
}

TEST_CASE("dense file round trip") {
  const BinaryMatrix I3 = BinaryMatrix::identity(3);
  std::stringstream ss;
  io::write_matrix(ss, I3);
  CHECK(ss.str() == "3 3\n1 0 0\n0 1 0\n0 0 1\n");
  CHECK(io::read_matrix(ss) == I3);
}

TEST_CASE("sparse file round trip and empty sparse file") {
  const BinaryMatrix B = testing::random_binary(6, 7, 0.3, 5);
  std::stringstream ss;
  io::write_matrix(ss, B, io::MatrixFormat::sparse);
  CHECK(io::read_matrix(ss) == B);
  std::stringstream empty("4 3 0\n");
  CHECK(io::read_matrix(empty) == BinaryMatrix::zeros(4, 3));
}

TEST_CASE("parse errors name the line") {
  std::stringstream bad("2 2\n1 0\n0 2\n");
  try {
    io::read_matrix(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::stringstream dup("2 2 2\n1 1\n1 1\n");
  CHECK_THROWS_AS(io::read_matrix(dup), ParseError);
  std::stringstream short_row("2 3\n1 0 1\n1 0\n");
  CHECK_THROWS_AS(io::read_matrix(short_row), ParseError);
  std::stringstream trailing("1 1\n1\n0\n");
  CHECK_THROWS_AS(io::read_matrix(trailing), ParseError);
  std::stringstream zero_index("2 2 1\n0 1\n");
  CHECK_THROWS_AS(io::read_matrix(zero_index), ParseError);
}

TEST_CASE("factorization round trip is bit exact") {
  Factorization F = testing::random_factorization(5, 4, 3, 0.3, 17);
  F.L(0, 0) = 1e-310;  // subnormal
  F.L(1, 1) = -0.0;
  F.R(2, 2) = 1.0 / 3.0;
  F.tau = 0.1;
  std::stringstream ss;
  io::write_factorization(ss, F);
  const Factorization G = io::read_factorization(ss);
  CHECK(G.tau == F.tau);
  REQUIRE(G.L.rows() == F.L.rows());
  REQUIRE(G.R.cols() == F.R.cols());
  for (Index i = 0; i < F.L.size(); ++i) CHECK(std::signbit(G.L.data()[i]) == std::signbit(F.L.data()[i]));
  CHECK((G.L.array() == F.L.array()).all());
  CHECK((G.R.array() == F.R.array()).all());
}

TEST_CASE("factorization validation") {
  Factorization F{RealMatrix::Ones(3, 2), RealMatrix::Ones(4, 3), 0.5};
  CHECK_THROWS_AS(F.validate(), InvalidInput);
  Factorization G{RealMatrix::Ones(3, 2), RealMatrix::Ones(4, 2), 0.5};
  CHECK_NOTHROW(G.validate());
  G.R(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(G.validate(), InvalidInput);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  set_thread_limit(4);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Factorization F = testing::random_factorization(37, 23, 6, 0.2, seed);
    const RealMatrix a = kernels::product(F.L, F.R, Exec::serial);
    const RealMatrix b = kernels::product(F.L, F.R, Exec::parallel);
    CHECK((a.array() == b.array()).all());
    const BinaryMatrix target = testing::random_binary(37, 23, 0.5, seed);
    CHECK(kernels::rounding_mismatches(target, F.L, F.R, 0.2, Exec::serial) ==
          kernels::rounding_mismatches(target, F.L, F.R, 0.2, Exec::parallel));
    CHECK(kernels::round_product(F.L, F.R, 0.2, Exec::serial) == kernels::round_product(F.L, F.R, 0.2, Exec::parallel));
    CHECK(kernels::hamming(target, F.rounded(), Exec::serial) == kernels::hamming(target, F.rounded(), Exec::parallel));
    CHECK(kernels::round_matrix(a, 0.2, Exec::parallel) == round_threshold(a, 0.2));
  }
  set_thread_limit(1);
}

TEST_CASE("rounding is stable under perturbations below the gap") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Factorization F = testing::random_factorization(8, 7, 3, 0.5, seed);
    const RealMatrix X = F.reconstruct();
    const double gap = (X.array() - F.tau).abs().minCoeff();
    REQUIRE(gap > 0.0);
    const RealMatrix noise = testing::random_real(8, 7, seed + 100).cwiseMax(-1.0).cwiseMin(1.0) * (0.49 * gap);
    CHECK(round_threshold(X + noise, F.tau) == F.rounded());
  }
}

TEST_CASE("reconstruct multiplies the factors") {
  const Factorization F = testing::random_factorization(4, 3, 2, 0.0, 9);
  const RealMatrix expected = F.L * F.R.transpose();
  CHECK((F.reconstruct() - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(F.reconstruct().rows() == 4);
  CHECK(F.reconstruct().cols() == 3);
}
