#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rrank/lp.hpp"

using namespace rrank::lp;

TEST_CASE("contradictory bounds are infeasible") {
  LpProblem p(1);
  p.add({1.0}, Relation::greater_equal, 1.0);
  p.add({1.0}, Relation::less_equal, 0.0);
  CHECK(solve(p).status == LpStatus::infeasible);
}

TEST_CASE("minimum on a half line") {
  LpProblem p(1);
  p.objective = {1.0};
  p.add({1.0}, Relation::greater_equal, 3.0);
  const LpSolution s = solve(p);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s.objective == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("one dimensional separation problem") {
  const double tau = 0.5;
  const double eps = 1e-9;
  LpProblem p(1);
  p.add({1.0}, Relation::greater_equal, tau + eps);
  p.add({-1.0}, Relation::less_equal, tau - eps);
  const LpSolution s = solve(p);
  REQUIRE(s.feasible());
  CHECK(s.x[0] * 1.0 >= tau + eps - 1e-9);
  CHECK(s.x[0] * -1.0 <= tau - eps + 1e-9);
}

TEST_CASE("unbounded objective") {
  LpProblem p(1);
  p.objective = {-1.0};
  p.lower_bounds = {0.0};
  CHECK(solve(p).status == LpStatus::unbounded);
}

TEST_CASE("equality constraints and bounds") {
  // min x + 2y s.t. x + y = 4, x <= 3, y >= 0.5, x >= 0
  LpProblem p(2);
  p.objective = {1.0, 2.0};
  p.lower_bounds = {0.0, 0.5};
  p.add({1.0, 1.0}, Relation::equal, 4.0);
  p.add({1.0, 0.0}, Relation::less_equal, 3.0);
  const LpSolution s = solve(p);
  REQUIRE(s.feasible());
  CHECK(s.x[0] == doctest::Approx(3.0));
  CHECK(s.x[1] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("iteration limit is its own status") {
  LpProblem p(6);
  for (std::size_t i = 0; i < 6; ++i) {
    std::vector<double> a(6, 1.0);
    a[i] = 2.0;
    p.add(a, Relation::greater_equal, 1.0 + static_cast<double>(i));
  }
  p.objective = std::vector<double>(6, 1.0);
  p.lower_bounds = std::vector<double>(6, 0.0);
  CHECK(solve(p, 1).status == LpStatus::iteration_limit);
  CHECK(solve(p).status == LpStatus::optimal);
}

namespace {

// Minimum of c.x over a bounded polygon by enumerating vertices.
double vertex_minimum(const LpProblem& p) {
  double best = std::numeric_limits<double>::infinity();
  const auto& rows = p.constraints;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      const double a0 = rows[a].coeffs[0], a1 = rows[a].coeffs[1];
      const double b0 = rows[b].coeffs[0], b1 = rows[b].coeffs[1];
      const double det = a0 * b1 - a1 * b0;
      if (std::abs(det) < 1e-12) continue;
      const double x = (rows[a].rhs * b1 - a1 * rows[b].rhs) / det;
      const double y = (a0 * rows[b].rhs - rows[a].rhs * b0) / det;
      const double xs[2] = {x, y};
      if (max_violation(p, xs) > 1e-9) continue;
      best = std::min(best, p.objective[0] * x + p.objective[1] * y);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("random two dimensional programs match vertex enumeration") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    LpProblem p(2);
    p.objective = {u(rng), u(rng)};
    // A box keeps the problem bounded; random cuts may empty it.
    p.add({1.0, 0.0}, Relation::less_equal, 2.0);
    p.add({1.0, 0.0}, Relation::greater_equal, -2.0);
    p.add({0.0, 1.0}, Relation::less_equal, 2.0);
    p.add({0.0, 1.0}, Relation::greater_equal, -2.0);
    for (int c = 0; c < 4; ++c) p.add({u(rng), u(rng)}, u(rng) < 0 ? Relation::less_equal : Relation::greater_equal, u(rng));
    const LpSolution s = solve(p);
    const double oracle = vertex_minimum(p);
    if (std::isinf(oracle)) {
      CHECK(s.status == LpStatus::infeasible);
      continue;
    }
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(max_violation(p, s.x) <= 1e-9);
    CHECK(s.objective == doctest::Approx(oracle).epsilon(1e-7));
    ++solved;
  }
  CHECK(solved > 50);
}

TEST_CASE("feasible points satisfy every constraint") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 8);
    std::vector<double> x0(d);
    for (auto& v : x0) v = g(rng);
    LpProblem p(d);
    for (int r = 0; r < 30; ++r) {
      std::vector<double> a(d);
      double ax = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        a[t] = g(rng);
        ax += a[t] * x0[t];
      }
      if (r % 2) {
        p.add(a, Relation::less_equal, ax + 0.01);
      } else {
        p.add(a, Relation::greater_equal, ax - 0.01);
      }
    }
    const LpSolution s = solve(p);
    REQUIRE(s.feasible());
    CHECK(max_violation(p, s.x) <= 1e-9);
  }
}

TEST_CASE("duplicating a constraint never changes the status") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    LpProblem p(3);
    for (int c = 0; c < 6; ++c) p.add({u(rng), u(rng), u(rng)}, c % 2 ? Relation::less_equal : Relation::greater_equal, u(rng));
    LpProblem q = p;
    q.constraints.push_back(p.constraints[static_cast<std::size_t>(trial % 6)]);
    CHECK(solve(p).status == solve(q).status);
  }
}

TEST_CASE("solve is deterministic") {
  LpProblem p(3);
  p.objective = {1.0, -1.0, 0.5};
  p.lower_bounds = {0.0, 0.0, 0.0};
  p.add({1.0, 1.0, 1.0}, Relation::less_equal, 10.0);
  p.add({1.0, -2.0, 0.0}, Relation::greater_equal, -4.0);
  const LpSolution a = solve(p);
  const LpSolution b = solve(p);
  CHECK(a.status == b.status);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}
