#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

// Dense two-phase primal simplex (Bland's rule). Built for many small
// problems: a few hundred variables, a few hundred rows.
namespace rrank::lp {

enum class Relation { greater_equal, less_equal, equal };

struct Constraint {
  std::vector<double> coeffs;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

inline constexpr double kFree = -std::numeric_limits<double>::infinity();

struct LpProblem {
  explicit LpProblem(std::size_t num_vars)
      : objective(num_vars, 0.0), lower_bounds(num_vars, kFree) {}

  std::size_t num_vars() const noexcept { return objective.size(); }
  void add(std::vector<double> coeffs, Relation relation, double rhs) {
    constraints.push_back({std::move(coeffs), relation, rhs});
  }

  // Minimized; all zeros for a pure feasibility problem.
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  // Each entry is kFree or a finite lower bound.
  std::vector<double> lower_bounds;
};

enum class LpStatus {
  optimal,          // feasible, and optimal for the objective
  infeasible,
  unbounded,
  iteration_limit,
  numerical_error,  // the final point failed the feasibility re-check
};

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;

  bool feasible() const noexcept { return status == LpStatus::optimal; }
};

struct LpOptions {
  std::size_t max_iters = 100'000;
  double pivot_tol = 1e-10;
  // Constraint residual allowed on the returned point, scaled by max(1, |rhs|).
  double feas_tol = 1e-9;
};

LpSolution solve(const LpProblem& problem, const LpOptions& options = {});
inline LpSolution solve(const LpProblem& problem, std::size_t max_iters) {
  LpOptions options;
  options.max_iters = max_iters;
  return solve(problem, options);
}

// Largest scaled violation of any constraint or bound at x (0 when feasible).
double max_violation(const LpProblem& problem, std::span<const double> x);

}  // namespace rrank::lp
