#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rrank/error.hpp"
#include "rrank/perm.hpp"
#include "support.hpp"

using namespace rrank;

namespace {

Index count_flips(const BinaryMatrix& B, const Permutation& perm, Index j) {
  Index flips = 0;
  for (std::size_t p = 0; p + 1 < perm.size(); ++p) flips += B(perm[p], j) != B(perm[p + 1], j);
  return flips;
}

bool is_permutation_of(const Permutation& p, Index n) {
  Permutation sorted = p;
  std::sort(sorted.begin(), sorted.end());
  return sorted == identity_permutation(n);
}

}  // namespace

TEST_CASE("column flip counts") {
  const BinaryMatrix I3 = BinaryMatrix::identity(3);
  const perm::Flips f = perm::column_flips(I3, identity_permutation(3));
  CHECK(f.per_column == std::vector<Index>{1, 2, 1});
  CHECK(f.max == 2);
  CHECK(f.total == 4);
  const BinaryMatrix alternating = BinaryMatrix::from_rows({{1, 1}, {0, 1}, {1, 1}, {0, 1}, {1, 1}});
  const perm::Flips g = perm::column_flips(alternating, identity_permutation(5));
  CHECK(g.per_column == std::vector<Index>{4, 0});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BinaryMatrix B = testing::random_binary(9, 7, 0.5, seed);
    Permutation p = identity_permutation(9);
    std::shuffle(p.begin(), p.end(), Rng(seed));
    const perm::Flips h = perm::column_flips(B, p);
    Index total = 0;
    for (Index j = 0; j < 7; ++j) {
      CHECK(h.per_column[static_cast<std::size_t>(j)] == count_flips(B, p, j));
      total += count_flips(B, p, j);
    }
    CHECK(h.total == total);
    CHECK(h.max == *std::max_element(h.per_column.begin(), h.per_column.end()));
  }
  CHECK_THROWS_AS(perm::column_flips(I3, Permutation{0, 0, 1}), InvalidInput);
  CHECK_THROWS_AS(perm::column_flips(I3, Permutation{0, 1}), InvalidInput);
}

TEST_CASE("row ordering") {
  SUBCASE("single row") {
    CHECK(perm::order_rows(BinaryMatrix::ones(1, 4), {}) == Permutation{0});
  }
  SUBCASE("sorted nested matrix has at most one flip per column") {
    const BinaryMatrix B = testing::staircase({6, 5, 5, 3, 1, 0}, 6);
    const Permutation p = perm::order_rows(B, {});
    CHECK(perm::column_flips(B, p).max <= 1);
  }
  SUBCASE("duplicate rows end adjacent") {
    const BinaryMatrix base = testing::random_binary(5, 12, 0.5, 3);
    BinaryMatrix B(10, 12);
    for (Index i = 0; i < 10; ++i)
      for (Index j = 0; j < 12; ++j) B.set(i, j, base((i * 3) % 5, j));
    const Permutation p = perm::order_rows(B, {});
    CHECK(is_permutation_of(p, 10));
    for (Index i = 0; i < 10; ++i) {
      const auto at = std::find(p.begin(), p.end(), i) - p.begin();
      bool adjacent_twin = false;
      for (auto q : {at - 1, at + 1}) {
        if (q < 0 || q >= 10) continue;
        bool same = true;
        for (Index j = 0; j < 12; ++j) same = same && B(i, j) == B(p[static_cast<std::size_t>(q)], j);
        adjacent_twin = adjacent_twin || same;
      }
      CHECK(adjacent_twin);
    }
  }
  SUBCASE("never worse than the identity order") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const BinaryMatrix B = testing::random_binary(15, 10, 0.3, seed);
      perm::PermConfig cfg;
      cfg.seed = seed;
      const Permutation p = perm::order_rows(B, cfg);
      CHECK(is_permutation_of(p, 15));
      CHECK(perm::column_flips(B, p).max <= perm::column_flips(B, identity_permutation(15)).max);
      CHECK(p == perm::order_rows(B, cfg));
      const BinaryMatrix P = B.permuted(p, identity_permutation(10));
      CHECK(P.permuted(inverse(p), identity_permutation(10)) == B);
    }
  }
}

TEST_CASE("polynomial factorization") {
  SUBCASE("constant columns") {
    const BinaryMatrix B = BinaryMatrix::from_rows({{1, 0}, {1, 0}, {1, 0}});
    const Factorization F = perm::polynomial_factorization(B, identity_permutation(3));
    CHECK(F.rank() == 1);
    CHECK(F.tau == 0.0);
    CHECK(F.R(0, 0) == 1.0);
    CHECK(F.R(1, 0) == -1.0);
    CHECK(F.rounds_to(B));
  }
  SUBCASE("single flip is a line through the gap") {
    const BinaryMatrix B = BinaryMatrix::from_rows({{0}, {0}, {1}, {1}});
    const Factorization F = perm::polynomial_factorization(B, identity_permutation(4));
    REQUIRE(F.rank() == 2);
    const double root = -F.R(0, 0) / F.R(0, 1);
    CHECK(root > F.L(1, 1));
    CHECK(root < F.L(2, 1));
    CHECK(F.rounds_to(B));
  }
  SUBCASE("identity needs three dimensions") {
    const BinaryMatrix I3 = BinaryMatrix::identity(3);
    const Factorization F = perm::polynomial_factorization(I3, identity_permutation(3));
    CHECK(F.rank() == 3);
    CHECK(F.rounds_to(I3));
  }
  SUBCASE("strict signs on random inputs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const BinaryMatrix B = testing::random_binary(3 + seed % 20, 2 + seed % 11, 0.5, seed);
      Permutation p = identity_permutation(B.rows());
      std::shuffle(p.begin(), p.end(), Rng(seed));
      const Factorization F = perm::polynomial_factorization(B, p);
      CHECK(F.rank() == perm::column_flips(B, p).max + 1);
      const RealMatrix X = F.reconstruct();
      const SignMatrix S = to_sign(B);
      for (Index i = 0; i < B.rows(); ++i)
        for (Index j = 0; j < B.cols(); ++j) CHECK((X(i, j) > 0.0 ? 1 : -1) == S(i, j));
      CHECK((X.array() != 0.0).all());
    }
  }
  SUBCASE("serial and parallel agree") {
    const BinaryMatrix B = testing::random_binary(30, 40, 0.5, 9);
    const Permutation p = identity_permutation(30);
    set_thread_limit(4);
    const Factorization a = perm::polynomial_factorization(B, p, Exec::serial);
    const Factorization b = perm::polynomial_factorization(B, p, Exec::parallel);
    set_thread_limit(0);
    CHECK((a.R.array() == b.R.array()).all());
  }
}

TEST_CASE("perm rank estimates") {
  SUBCASE("all ones") {
    const RankEstimate est = perm::estimate_rank(BinaryMatrix::ones(4, 5), 0.0, {});
    CHECK(est.value == 1);
    CHECK(est.witness->rounds_to(BinaryMatrix::ones(4, 5)));
  }
  SUBCASE("shuffled nested matrix gives two at threshold zero") {
    const BinaryMatrix S = testing::staircase({7, 5, 4, 4, 2, 1, 0}, 8);
    Permutation rows = identity_permutation(7);
    Permutation cols = identity_permutation(8);
    std::shuffle(rows.begin(), rows.end(), Rng(1));
    std::shuffle(cols.begin(), cols.end(), Rng(2));
    const BinaryMatrix B = S.permuted(rows, cols);
    const RankEstimate est = perm::estimate_rank(B, 0.0, {});
    CHECK(est.value == 2);
    CHECK(est.witness->rounds_to(B));
  }
  SUBCASE("bound is max flips plus one, plus one more off zero") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const BinaryMatrix B = testing::random_binary(12, 9 + seed % 5, 0.5, seed);
      perm::PermConfig cfg;
      cfg.seed = seed;
      const Index flips = perm::column_flips(B, perm::order_rows(B, cfg)).max;
      const RankEstimate zero = perm::estimate_rank(B, 0.0, cfg);
      CHECK(zero.value == flips + 1);
      CHECK(zero.witness->rounds_to(B));
      for (double tau : {0.5, -2.0, 1e6}) {
        const RankEstimate shifted = perm::estimate_rank(B, tau, cfg);
        CHECK(shifted.value == flips + 2);
        CHECK(shifted.witness->tau == tau);
        CHECK(shifted.witness->rounds_to(B));
      }
    }
  }
  SUBCASE("rectangular inputs") {
    const BinaryMatrix B = testing::random_binary(3, 25, 0.5, 4);
    CHECK(perm::estimate_rank(B, 0.5, {}).witness->rounds_to(B));
    const BinaryMatrix T = testing::random_binary(25, 3, 0.5, 4);
    CHECK(perm::estimate_rank(T, 0.5, {}).witness->rounds_to(T));
  }
  SUBCASE("validation") {
    perm::PermConfig cfg;
    cfg.order_restarts = -1;
    CHECK_THROWS_AS(perm::validate(cfg), InvalidInput);
  }
}
