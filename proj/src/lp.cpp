#include "rrank/lp.hpp"

#include <algorithm>
#include <cmath>

#include "rrank/error.hpp"

namespace rrank::lp {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration-limit";
    case LpStatus::numerical_error: return "numerical-error";
  }
  return "unknown";
}

double max_violation(const LpProblem& problem, std::span<const double> x) {
  double worst = 0.0;
  for (const auto& c : problem.constraints) {
    double lhs = 0.0;
    for (std::size_t v = 0; v < c.coeffs.size(); ++v) lhs += c.coeffs[v] * x[v];
    const double scale = std::max(1.0, std::abs(c.rhs));
    double violation = 0.0;
    switch (c.relation) {
      case Relation::greater_equal: violation = c.rhs - lhs; break;
      case Relation::less_equal: violation = lhs - c.rhs; break;
      case Relation::equal: violation = std::abs(lhs - c.rhs); break;
    }
    worst = std::max(worst, violation / scale);
  }
  for (std::size_t v = 0; v < problem.num_vars(); ++v) {
    const double lb = problem.lower_bounds[v];
    if (std::isfinite(lb)) worst = std::max(worst, (lb - x[v]) / std::max(1.0, std::abs(lb)));
  }
  return worst;
}

namespace {

// Standard-form tableau: rows of [A | b], basis[i] is the column basic in
// row i. Columns are laid out as structural, then slack/surplus, then
// artificial.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, cols_); }
  double rhs(std::size_t i) const { return at(i, cols_); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::vector<std::size_t>& basis() noexcept { return basis_; }

  void pivot(std::size_t r, std::size_t c, std::vector<double>& cost_row) {
    double* prow = &at(r, 0);
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j <= cols_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double* row = &at(i, 0);
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    const double f = cost_row[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= cols_; ++j) cost_row[j] -= f * prow[j];
      cost_row[c] = 0.0;
    }
    basis_[r] = c;
  }

  void remove_row(std::size_t r) {
    const std::size_t width = cols_ + 1;
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * width),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { optimal, unbounded, iteration_limit };

// Minimizes the objective encoded in cost_row (reduced costs, last entry is
// minus the objective value) using Bland's rule. Columns with
// allowed[j] == false never enter.
PhaseResult run_simplex(Tableau& t, std::vector<double>& cost_row, const std::vector<bool>& allowed,
                        const LpOptions& options, std::size_t& iterations) {
  for (;;) {
    std::size_t enter = t.cols();
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (allowed[j] && cost_row[j] < -options.pivot_tol) {
        enter = j;
        break;
      }
    }
    if (enter == t.cols()) return PhaseResult::optimal;
    if (iterations >= options.max_iters) return PhaseResult::iteration_limit;

    std::size_t leave = t.rows();
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, enter);
      if (a <= options.pivot_tol) continue;
      const double ratio = t.rhs(i) / a;
      if (leave == t.rows() || ratio < best_ratio ||
          (ratio == best_ratio && t.basis()[i] < t.basis()[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == t.rows()) return PhaseResult::unbounded;
    t.pivot(leave, enter, cost_row);
    ++iterations;
  }
}

}  // namespace

LpSolution solve(const LpProblem& problem, const LpOptions& options) {
  const std::size_t nvars = problem.num_vars();
  if (problem.lower_bounds.size() != nvars) throw InvalidInput("lower bound vector has wrong length");
  for (double lb : problem.lower_bounds) {
    if (std::isnan(lb) || lb == std::numeric_limits<double>::infinity()) {
      throw InvalidInput("lower bounds must be finite or free");
    }
  }
  for (double c : problem.objective)
    if (!std::isfinite(c)) throw InvalidInput("objective must be finite");

  // Structural columns: shifted variables x = lb + y get one column, free
  // variables x = y+ - y- get two.
  std::vector<std::size_t> first_col(nvars);
  std::vector<bool> is_free(nvars);
  std::size_t nstruct = 0;
  for (std::size_t v = 0; v < nvars; ++v) {
    first_col[v] = nstruct;
    is_free[v] = !std::isfinite(problem.lower_bounds[v]);
    nstruct += is_free[v] ? 2 : 1;
  }

  struct Row {
    std::vector<double> coeffs;  // over structural columns
    Relation relation;
    double rhs;
  };
  std::vector<Row> rows;
  rows.reserve(problem.constraints.size());
  for (const auto& c : problem.constraints) {
    if (c.coeffs.size() != nvars) throw InvalidInput("constraint has wrong number of coefficients");
    if (!std::isfinite(c.rhs)) throw InvalidInput("constraint right-hand side must be finite");
    Row row{std::vector<double>(nstruct, 0.0), c.relation, c.rhs};
    double largest = 0.0;
    for (std::size_t v = 0; v < nvars; ++v) {
      const double a = c.coeffs[v];
      if (!std::isfinite(a)) throw InvalidInput("constraint coefficients must be finite");
      largest = std::max(largest, std::abs(a));
      if (is_free[v]) {
        row.coeffs[first_col[v]] = a;
        row.coeffs[first_col[v] + 1] = -a;
      } else {
        row.coeffs[first_col[v]] = a;
        row.rhs -= a * problem.lower_bounds[v];
      }
    }
    if (largest < options.pivot_tol) {
      // Degenerate row: 0 (relation) rhs either holds or not.
      const bool holds = (c.relation == Relation::greater_equal && row.rhs <= options.feas_tol) ||
                         (c.relation == Relation::less_equal && row.rhs >= -options.feas_tol) ||
                         (c.relation == Relation::equal && std::abs(row.rhs) <= options.feas_tol);
      if (!holds) return {LpStatus::infeasible, {}, 0.0, 0};
      continue;
    }
    if (row.rhs < 0.0) {
      for (auto& a : row.coeffs) a = -a;
      row.rhs = -row.rhs;
      if (row.relation == Relation::greater_equal) {
        row.relation = Relation::less_equal;
      } else if (row.relation == Relation::less_equal) {
        row.relation = Relation::greater_equal;
      }
    }
    rows.push_back(std::move(row));
  }

  std::size_t nslack = 0;
  std::size_t nart = 0;
  for (const auto& row : rows) {
    if (row.relation != Relation::equal) ++nslack;
    if (row.relation != Relation::less_equal) ++nart;
  }
  const std::size_t ncols = nstruct + nslack + nart;
  const std::size_t art_begin = nstruct + nslack;
  Tableau t(rows.size(), ncols);
  {
    std::size_t slack = nstruct;
    std::size_t art = art_begin;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < nstruct; ++j) t.at(i, j) = rows[i].coeffs[j];
      t.rhs(i) = rows[i].rhs;
      switch (rows[i].relation) {
        case Relation::less_equal:
          t.at(i, slack) = 1.0;
          t.basis()[i] = slack++;
          break;
        case Relation::greater_equal:
          t.at(i, slack++) = -1.0;
          t.at(i, art) = 1.0;
          t.basis()[i] = art++;
          break;
        case Relation::equal:
          t.at(i, art) = 1.0;
          t.basis()[i] = art++;
          break;
      }
    }
  }

  LpSolution result;
  std::vector<bool> allowed(ncols, true);

  // Phase 1: minimize the sum of artificials.
  if (nart > 0) {
    std::vector<double> cost(ncols + 1, 0.0);
    for (std::size_t j = art_begin; j < ncols; ++j) cost[j] = 1.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (t.basis()[i] < art_begin) continue;
      for (std::size_t j = 0; j <= ncols; ++j) cost[j] -= t.at(i, j);
    }
    const auto phase = run_simplex(t, cost, allowed, options, result.iterations);
    if (phase == PhaseResult::iteration_limit) {
      result.status = LpStatus::iteration_limit;
      return result;
    }
    double rhs_scale = 1.0;
    for (const auto& row : rows) rhs_scale = std::max(rhs_scale, std::abs(row.rhs));
    if (-cost[ncols] > options.feas_tol * rhs_scale) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    for (std::size_t i = 0; i < t.rows();) {
      if (t.basis()[i] < art_begin) {
        ++i;
        continue;
      }
      std::size_t col = art_begin;
      for (std::size_t j = 0; j < art_begin; ++j) {
        if (std::abs(t.at(i, j)) > options.pivot_tol) {
          col = j;
          break;
        }
      }
      if (col == art_begin) {
        t.remove_row(i);  // redundant
      } else {
        t.pivot(i, col, cost);
        ++i;
      }
    }
    for (std::size_t j = art_begin; j < ncols; ++j) allowed[j] = false;
  }

  // Phase 2.
  std::vector<double> cost(ncols + 1, 0.0);
  for (std::size_t v = 0; v < nvars; ++v) {
    cost[first_col[v]] = problem.objective[v];
    if (is_free[v]) cost[first_col[v] + 1] = -problem.objective[v];
  }
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double cb = cost[t.basis()[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= ncols; ++j) cost[j] -= cb * t.at(i, j);
    cost[t.basis()[i]] = 0.0;
  }
  const auto phase = run_simplex(t, cost, allowed, options, result.iterations);
  if (phase == PhaseResult::iteration_limit) {
    result.status = LpStatus::iteration_limit;
    return result;
  }
  if (phase == PhaseResult::unbounded) {
    result.status = LpStatus::unbounded;
    return result;
  }

  std::vector<double> y(ncols, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) y[t.basis()[i]] = t.rhs(i);
  result.x.assign(nvars, 0.0);
  result.objective = 0.0;
  for (std::size_t v = 0; v < nvars; ++v) {
    const double value = is_free[v] ? y[first_col[v]] - y[first_col[v] + 1]
                                    : problem.lower_bounds[v] + y[first_col[v]];
    result.x[v] = value;
    result.objective += problem.objective[v] * value;
  }
  result.status = max_violation(problem, result.x) <= options.feas_tol ? LpStatus::optimal
                                                                          : LpStatus::numerical_error;
  return result;
}

}  // namespace rrank::lp
