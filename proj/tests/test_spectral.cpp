#include <doctest.h>

#include <Eigen/SVD>

#include "rrank/error.hpp"
#include "rrank/spectral.hpp"
#include "support.hpp"

using namespace rrank;

namespace {

// Rounding errors of the rank-l truncation for l = 1..k, by a second SVD.
std::vector<std::size_t> truncation_errors(const BinaryMatrix& B, Index k, double tau) {
  Eigen::JacobiSVD<RealMatrix> svd(B.to_real(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  std::vector<std::size_t> out;
  for (Index l = 1; l <= k; ++l) {
    const RealMatrix A = svd.matrixU().leftCols(l) * svd.singularValues().head(l).asDiagonal() *
                         svd.matrixV().leftCols(l).transpose();
    out.push_back(hamming_error(B, round_threshold(A, tau)));
  }
  return out;
}

BinaryMatrix outer(const std::vector<int>& a, const std::vector<int>& b) {
  BinaryMatrix B(static_cast<Index>(a.size()), static_cast<Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      B.set(static_cast<Index>(i), static_cast<Index>(j), a[i] && b[j]);
  return B;
}

}  // namespace

TEST_CASE("svd estimate on rank-one binary matrices is one") {
  const BinaryMatrix B = outer({1, 0, 1, 1, 0}, {0, 1, 1, 0, 1, 1});
  const RankEstimate est = spectral::svd_estimate_rank(B, 0.5);
  CHECK(est.method == "svd");
  CHECK(est.value == 1);
  CHECK(est.witness->rounds_to(B));
  CHECK(spectral::svd_estimate_rank(BinaryMatrix::ones(7, 3), 0.5).value == 1);
}

TEST_CASE("svd estimates are sound") {
  for (Index n : {3, 10, 30}) {
    const RankEstimate est = spectral::svd_estimate_rank(BinaryMatrix::identity(n), 0.5);
    CHECK(est.value <= n);
    CHECK(est.witness->rounds_to(BinaryMatrix::identity(n)));
  }
  const BinaryMatrix U = BinaryMatrix::upper_triangle(100);
  const RankEstimate up = spectral::svd_estimate_rank(U, 0.5);
  CHECK(up.value >= 1);
  CHECK(up.witness->rank() == up.value);
  CHECK(up.witness->rounds_to(U));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BinaryMatrix B = testing::random_binary(5 + seed % 20, 4 + seed % 15, 0.3, seed);
    for (double tau : {0.5, 1.0, 0.0, -0.5}) {
      const RankEstimate est = spectral::svd_estimate_rank(B, tau);
      CHECK(est.witness->tau == tau);
      CHECK(est.witness->rounds_to(B));
    }
  }
}

TEST_CASE("svd min-error follows an independent truncation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BinaryMatrix B = testing::random_binary(12 + seed % 7, 10 + seed % 5, 0.45, seed);
    const Index k = std::min(B.rows(), B.cols());
    const spectral::SvdMinError r = spectral::svd_min_error(B, k, 0.5);
    CHECK(r.errors == truncation_errors(B, k, 0.5));
    CHECK(r.errors.back() == 0);
    CHECK(r.error == 0);
    for (std::size_t l = 1; l < r.best_errors.size(); ++l) CHECK(r.best_errors[l] <= r.best_errors[l - 1]);
    CHECK(r.best_errors[static_cast<std::size_t>(r.best_rank - 1)] == r.errors[static_cast<std::size_t>(r.best_rank - 1)]);
  }
}

TEST_CASE("svd min-error picks the best truncation") {
  const BinaryMatrix B = testing::random_binary(20, 20, 0.5, 5);
  const spectral::SvdMinError r = spectral::svd_min_error(B, 6, 0.5);
  const std::size_t best = *std::min_element(r.errors.begin(), r.errors.end());
  CHECK(r.error == best);
  CHECK(r.error == hamming_error(B, r.C));
  CHECK(r.F.rank() == r.best_rank);
  CHECK(r.errors[static_cast<std::size_t>(r.best_rank - 1)] == best);
  for (Index l = 1; l < r.best_rank; ++l) CHECK(r.errors[static_cast<std::size_t>(l - 1)] > best);
  CHECK(spectral::svd_min_error(BinaryMatrix::ones(4, 5), 1, 0.5).error == 0);
  CHECK_THROWS_AS(spectral::svd_min_error(B, 0, 0.5), InvalidInput);
  CHECK_THROWS_AS(spectral::svd_min_error(B, 21, 0.5), InvalidInput);
}

TEST_CASE("truncated svd residual is the tail of the spectrum") {
  const BinaryMatrix B = testing::random_binary(15, 11, 0.4, 9);
  Eigen::JacobiSVD<RealMatrix> svd(B.to_real());
  const RealVector s = svd.singularValues();
  double previous = std::numeric_limits<double>::infinity();
  for (Index k = 1; k <= 11; ++k) {
    const spectral::TruncSvd t = spectral::trunc_svd_baseline(B, k);
    const double tail = s.tail(s.size() - k).squaredNorm();
    CHECK(t.abs_residual == doctest::Approx(tail).epsilon(1e-9).scale(1.0));
    CHECK(t.residual == doctest::Approx(tail / static_cast<double>(B.nnz())).epsilon(1e-9).scale(1.0));
    CHECK(t.residual <= previous + 1e-12);
    previous = t.residual;
  }
  CHECK(spectral::trunc_svd_baseline(B, 11).residual < 1e-20);
  const BinaryMatrix rank2 = outer({1, 1, 0, 0}, {1, 0, 1});
  CHECK(spectral::trunc_svd_baseline(rank2, 1).residual < 1e-24);
  CHECK(spectral::trunc_svd_baseline(BinaryMatrix::zeros(3, 3), 2).residual == 0.0);
  CHECK_THROWS_AS(spectral::trunc_svd_baseline(B, 0), InvalidInput);
}

TEST_CASE("nuclear estimates") {
  SUBCASE("all ones") {
    spectral::NuclearDiagnostics diag;
    const RankEstimate est = spectral::nuclear_estimate_rank(BinaryMatrix::ones(6, 8), 0.5, {}, &diag);
    CHECK(est.ok);
    CHECK(est.value == 1);
    CHECK(est.witness->rounds_to(BinaryMatrix::ones(6, 8)));
    CHECK(diag.converged);
    CHECK(diag.iterations >= 1);
  }
  SUBCASE("single zero") {
    const RankEstimate est = spectral::nuclear_estimate_rank(BinaryMatrix::zeros(1, 1), 0.5, {});
    CHECK(est.ok);
    CHECK(est.value == 1);
    CHECK(est.witness->rounds_to(BinaryMatrix::zeros(1, 1)));
  }
  SUBCASE("identity") {
    const RankEstimate est = spectral::nuclear_estimate_rank(BinaryMatrix::identity(3), 0.5, {});
    CHECK(est.ok);
    CHECK(est.value >= 2);
    CHECK(est.value <= 3);
    CHECK(est.witness->rounds_to(BinaryMatrix::identity(3)));
  }
  SUBCASE("random matrices are sound or flagged") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const BinaryMatrix B = testing::random_binary(10, 12, 0.3 + 0.05 * static_cast<double>(seed), seed);
      const RankEstimate est = spectral::nuclear_estimate_rank(B, 0.5, {});
      if (est.ok) {
        CHECK(est.witness->rank() == est.value);
        CHECK(est.witness->rounds_to(B));
      } else {
        CHECK_FALSE(est.witness.has_value());
      }
    }
  }
  SUBCASE("iteration limit is reported") {
    spectral::NuclearConfig cfg;
    cfg.admm_iters = 1;
    spectral::NuclearDiagnostics diag;
    const RankEstimate est = spectral::nuclear_estimate_rank(testing::random_binary(8, 8, 0.5, 1), 0.5, cfg, &diag);
    CHECK_FALSE(diag.converged);
    CHECK(diag.iterations == 1);
    CHECK_FALSE(est.warnings.empty());
  }
  SUBCASE("validation") {
    spectral::NuclearConfig cfg;
    cfg.eps = 0.0;
    CHECK_THROWS_AS(spectral::validate(cfg), InvalidInput);
    cfg = {};
    cfg.rho = -1.0;
    CHECK_THROWS_AS(spectral::validate(cfg), InvalidInput);
    cfg = {};
    cfg.admm_iters = 0;
    CHECK_THROWS_AS(spectral::validate(cfg), InvalidInput);
  }
}
