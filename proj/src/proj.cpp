#include "rrank/proj.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>

#include "rrank/error.hpp"
#include "rrank/lp.hpp"

namespace rrank::proj {

void validate(const ProjConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (cfg.d_max < 0) throw InvalidInput("d_max must be at least 1 (or 0 for min(m,n))");
  if (cfg.repetitions < 1) throw InvalidInput("repetitions must be at least 1");
}

RealMatrix achlioptas_project(const BinaryMatrix& B, Index d, Rng& rng) {
  if (d < 1) throw InvalidInput("projection dimension must be at least 1");
  const double scale = std::sqrt(3.0 / static_cast<double>(d));
  std::uniform_int_distribution<int> die(0, 5);
  RealMatrix A(B.cols(), d);
  for (Index j = 0; j < B.cols(); ++j) {
    for (Index t = 0; t < d; ++t) {
      const int roll = die(rng);
      A(j, t) = roll == 0 ? scale : roll == 1 ? -scale : 0.0;
    }
  }
  RealMatrix L = RealMatrix::Zero(B.rows(), d);
  for (Index i = 0; i < B.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j)
      if (B(i, j)) L.row(i) += A.row(j);
  return L;
}

RealMatrix achlioptas_project(const BinaryMatrix& B, Index d, std::uint64_t seed) {
  Rng rng(seed);
  return achlioptas_project(B, d, rng);
}

namespace {

lp::LpProblem column_feasibility_lp(const BinaryMatrix& B, const RealMatrix& L, Index j, double tau,
                                    double eps) {
  const Index d = L.cols();
  lp::LpProblem problem(static_cast<std::size_t>(d));
  for (Index i = 0; i < B.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(d));
    for (Index t = 0; t < d; ++t) row[static_cast<std::size_t>(t)] = L(i, t);
    if (B(i, j)) {
      problem.add(std::move(row), lp::Relation::greater_equal, tau + eps);
    } else {
      problem.add(std::move(row), lp::Relation::less_equal, tau - eps);
    }
  }
  return problem;
}

lp::LpProblem column_slack_lp(const BinaryMatrix& B, const RealMatrix& L, Index j, double tau,
                              double eps) {
  const Index m = B.rows();
  const Index d = L.cols();
  const auto nvars = static_cast<std::size_t>(d + m);
  lp::LpProblem problem(nvars);
  for (Index i = 0; i < m; ++i) {
    problem.objective[static_cast<std::size_t>(d + i)] = 1.0;
    problem.lower_bounds[static_cast<std::size_t>(d + i)] = 0.0;
  }
  for (Index i = 0; i < m; ++i) {
    std::vector<double> row(nvars, 0.0);
    for (Index t = 0; t < d; ++t) row[static_cast<std::size_t>(t)] = L(i, t);
    if (B(i, j)) {
      row[static_cast<std::size_t>(d + i)] = 1.0;
      problem.add(std::move(row), lp::Relation::greater_equal, tau + eps);
    } else {
      row[static_cast<std::size_t>(d + i)] = -1.0;
      problem.add(std::move(row), lp::Relation::less_equal, tau - eps);
    }
  }
  return problem;
}

}  // namespace

Trial separate_columns(const BinaryMatrix& B, const RealMatrix& L, double tau, const ProjConfig& cfg) {
  validate(cfg);
  if (L.rows() != B.rows()) throw ShapeMismatch("projected points must have one row per matrix row");
  const Index n = B.cols();
  const Index d = L.cols();
  RealMatrix R = RealMatrix::Zero(n, d);
  // Columns skipped after an early stop keep std::nullopt.
  std::vector<std::optional<lp::LpStatus>> status(static_cast<std::size_t>(n));
  std::atomic<bool> stop{false};
  lp::LpOptions options;
  options.max_iters = cfg.lp_max_iters;

  parallel_for(cfg.exec, n, [&](Index j) {
    if (stop.load(std::memory_order_relaxed)) return;
    const auto solution = lp::solve(column_feasibility_lp(B, L, j, tau, cfg.epsilon), options);
    status[static_cast<std::size_t>(j)] = solution.status;
    if (!solution.feasible()) {
      stop.store(true, std::memory_order_relaxed);
      return;
    }
    for (Index t = 0; t < d; ++t) R(j, t) = solution.x[static_cast<std::size_t>(t)];
  });

  Trial trial;
  for (Index j = 0; j < n; ++j) {
    const auto& s = status[static_cast<std::size_t>(j)];
    if (!s || *s == lp::LpStatus::optimal) continue;
    if (*s == lp::LpStatus::iteration_limit || *s == lp::LpStatus::numerical_error) {
      trial.lp_limit_hit = true;
    }
    if (trial.failed_column < 0) trial.failed_column = j;
  }
  if (stop.load()) return trial;

  Factorization F{L, std::move(R), tau};
  if (!F.rounds_to(B, cfg.exec)) return trial;  // LP round-off broke exact rounding
  trial.yes = true;
  trial.witness = std::move(F);
  return trial;
}

Trial try_dimension(const BinaryMatrix& B, Index d, double tau, const ProjConfig& cfg, Rng& rng) {
  return separate_columns(B, achlioptas_project(B, d, rng), tau, cfg);
}

RankEstimate estimate_rank(const BinaryMatrix& B, double tau, const ProjConfig& cfg) {
  validate(cfg);
  Stopwatch clock;
  Rng rng(cfg.seed);
  const Index full = std::min(B.rows(), B.cols());
  const Index d_max = cfg.d_max > 0 ? std::min(cfg.d_max, full) : full;

  RankEstimate est;
  est.method = "proj";
  est.kind = BoundKind::upper;
  est.tau = tau;

  auto attempt = [&](Index d) -> std::optional<Factorization> {
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      Trial trial = try_dimension(B, d, tau, cfg, rng);
      if (trial.lp_limit_hit) est.warnings.push_back("LP iteration limit at d=" + std::to_string(d));
      est.log.push_back({d, trial.yes ? "yes" : "unknown"});
      if (trial.yes) return std::move(trial.witness);
    }
    return std::nullopt;
  };

  std::optional<Factorization> best;
  Index best_d = 0;
  if (cfg.mode == SearchMode::linear_scan) {
    for (Index d = 1; d <= d_max && !best; ++d) {
      if ((best = attempt(d))) best_d = d;
    }
  } else {
    Index lo = 0;  // largest d known to answer unknown
    for (Index d = 1; d <= d_max; d = std::min(d_max, 2 * d)) {
      if ((best = attempt(d))) {
        best_d = d;
        break;
      }
      lo = d;
      if (d == d_max) break;
    }
    while (best && best_d - lo > 1) {
      const Index mid = lo + (best_d - lo) / 2;
      if (auto w = attempt(mid)) {
        best = std::move(w);
        best_d = mid;
      } else {
        lo = mid;
      }
    }
  }

  if (best) {
    est.value = best_d;
    est.witness = std::move(best);
  } else {
    est.value = full;
    est.witness = bounds::trivial_witness(B, tau);
    est.log.push_back({full, "fallback"});
  }
  est.elapsed_s = clock.seconds();
  return est;
}

MinErrorResult min_error_decomposition(const BinaryMatrix& B, Index k, double tau, const ProjConfig& cfg) {
  validate(cfg);
  if (k < 1) throw InvalidInput("rank k must be at least 1");
  Rng rng(cfg.seed);
  const RealMatrix L = achlioptas_project(B, k, rng);
  const Index n = B.cols();
  RealMatrix R = RealMatrix::Zero(n, k);
  std::vector<char> failed(static_cast<std::size_t>(n), 0);
  lp::LpOptions options;
  options.max_iters = cfg.lp_max_iters;

  parallel_for(cfg.exec, n, [&](Index j) {
    const auto solution = lp::solve(column_slack_lp(B, L, j, tau, cfg.epsilon), options);
    if (!solution.feasible()) {
      failed[static_cast<std::size_t>(j)] = 1;
      return;
    }
    for (Index t = 0; t < k; ++t) R(j, t) = solution.x[static_cast<std::size_t>(t)];
  });

  MinErrorResult result;
  for (Index j = 0; j < n; ++j)
    if (failed[static_cast<std::size_t>(j)]) result.fallback_columns.push_back(j);
  result.F = Factorization{L, std::move(R), tau};
  result.C = result.F.rounded(cfg.exec);
  result.error = hamming_error(B, result.C);
  return result;
}

}  // namespace rrank::proj
