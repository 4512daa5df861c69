#include "rrank/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rrank/error.hpp"
#include "rrank/kernels.hpp"
#include "rrank/linalg.hpp"

namespace rrank::spectral {
namespace {

// Adds the rank-one term s_k u_k v_k^T to the running truncation. Entry
// (i,j) accumulates in the same order as kernels::dot_rows on the truncated
// factors, so rounding here agrees with witness verification.
void add_component(RealMatrix& A, const Svd& svd, Index k) {
  const double s = svd.s(k);
  for (Index j = 0; j < A.cols(); ++j) {
    const double v = svd.V(j, k);
    for (Index i = 0; i < A.rows(); ++i) A(i, j) += (svd.U(i, k) * s) * v;
  }
}

std::size_t rounding_errors(const RealMatrix& A, const BinaryMatrix& B, double tau) {
  std::size_t errors = 0;
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) errors += (A(i, j) >= tau) != B(i, j);
  return errors;
}

}  // namespace

RankEstimate svd_estimate_rank(const BinaryMatrix& B, double tau) {
  Stopwatch clock;
  const Svd svd = thin_svd(B);
  RankEstimate est;
  est.method = "svd";
  est.kind = BoundKind::upper;
  est.tau = tau;

  RealMatrix A = RealMatrix::Zero(B.rows(), B.cols());
  const Index kmax = svd.s.size();
  for (Index k = 1; k <= kmax; ++k) {
    add_component(A, svd, k - 1);
    const std::size_t errors = rounding_errors(A, B, tau);
    est.log.push_back({k, std::to_string(errors) + " errors"});
    if (errors == 0) {
      Factorization F = truncated_factors(svd, k, tau);
      if (F.rounds_to(B)) {
        est.value = k;
        est.witness = std::move(F);
        est.elapsed_s = clock.seconds();
        return est;
      }
    }
  }
  est.value = std::min(B.rows(), B.cols());
  est.witness = bounds::trivial_witness(B, tau);
  est.log.push_back({est.value, "fallback"});
  est.elapsed_s = clock.seconds();
  return est;
}

SvdMinError svd_min_error(const BinaryMatrix& B, Index k, double tau) {
  const Index full = std::min(B.rows(), B.cols());
  if (k < 1 || k > full) {
    throw InvalidInput("rank k must lie in [1, " + std::to_string(full) + "]");
  }
  const Svd svd = thin_svd(B);
  SvdMinError result;
  RealMatrix A = RealMatrix::Zero(B.rows(), B.cols());
  std::size_t best = 0;
  for (Index l = 1; l <= k; ++l) {
    add_component(A, svd, l - 1);
    const std::size_t errors = rounding_errors(A, B, tau);
    result.errors.push_back(errors);
    if (l == 1 || errors < best) {
      best = errors;
      result.best_rank = l;
    }
    result.best_errors.push_back(best);
  }
  result.F = truncated_factors(svd, result.best_rank, tau);
  result.C = result.F.rounded();
  result.error = hamming_error(B, result.C);
  return result;
}

TruncSvd trunc_svd_baseline(const BinaryMatrix& B, Index k) {
  const Index full = std::min(B.rows(), B.cols());
  if (k < 1 || k > full) {
    throw InvalidInput("rank k must lie in [1, " + std::to_string(full) + "]");
  }
  const Svd svd = thin_svd(B);
  TruncSvd out;
  out.approx = svd.U.leftCols(k) * svd.s.head(k).asDiagonal() * svd.V.leftCols(k).transpose();
  out.abs_residual = (B.to_real() - out.approx).squaredNorm();
  const auto nnz = static_cast<double>(B.nnz());
  out.residual = nnz > 0.0 ? out.abs_residual / nnz : 0.0;
  return out;
}

void validate(const NuclearConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw InvalidInput("nuclear eps must be positive");
  if (cfg.admm_iters < 1) throw InvalidInput("ADMM iterations must be positive");
  if (!(cfg.rho > 0.0)) throw InvalidInput("ADMM penalty must be positive");
  if (!(cfg.tol > 0.0)) throw InvalidInput("ADMM tolerance must be positive");
}

RankEstimate nuclear_estimate_rank(const BinaryMatrix& B, double tau, const NuclearConfig& cfg,
                                   NuclearDiagnostics* diagnostics) {
  validate(cfg);
  Stopwatch clock;
  const Index m = B.rows();
  const Index n = B.cols();

  // Entry-wise box constraints.
  RealMatrix lower(m, n);
  RealMatrix upper(m, n);
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      lower(i, j) = B(i, j) ? tau + cfg.eps : -inf;
      upper(i, j) = B(i, j) ? inf : tau - cfg.eps;
    }
  }
  auto project = [&](const RealMatrix& Y) { return Y.cwiseMax(lower).cwiseMin(upper); };

  RealMatrix Z = project(RealMatrix::Constant(m, n, tau));
  RealMatrix U = RealMatrix::Zero(m, n);
  RealMatrix X = Z;
  const double shrink = 1.0 / cfg.rho;
  NuclearDiagnostics diag;
  for (int it = 1; it <= cfg.admm_iters; ++it) {
    Svd svd = thin_svd(RealMatrix(Z - U));
    for (Index t = 0; t < svd.s.size(); ++t) svd.s(t) = std::max(0.0, svd.s(t) - shrink);
    X = svd.U * svd.s.asDiagonal() * svd.V.transpose();
    const RealMatrix Z_prev = Z;
    Z = project(X + U);
    U += X - Z;

    diag.iterations = it;
    diag.primal_residual = (X - Z).norm();
    diag.dual_residual = cfg.rho * (Z - Z_prev).norm();
    const double primal_scale = std::max({X.norm(), Z.norm(), 1.0});
    const double dual_scale = std::max(cfg.rho * U.norm(), 1.0);
    if (diag.primal_residual <= cfg.tol * primal_scale && diag.dual_residual <= cfg.tol * dual_scale) {
      diag.converged = true;
      break;
    }
  }

  RankEstimate est;
  est.method = "nuclear";
  est.kind = BoundKind::upper;
  est.tau = tau;
  if (!diag.converged) est.warnings.push_back("ADMM stopped at the iteration limit");

  // Smallest truncation of a solver iterate that still rounds to B.
  auto truncate = [&](const RealMatrix& Y, const char* label) {
    const Svd solution = thin_svd(Y);
    const Index full = numerical_rank(solution.s, cfg.rank_tol);
    RealMatrix A = RealMatrix::Zero(m, n);
    if (full == 0) {
      // A zero iterate still certifies rank one when the zero matrix rounds to B.
      Factorization F{RealMatrix::Zero(m, 1), RealMatrix::Zero(n, 1), tau};
      if (F.rounds_to(B)) {
        est.value = 1;
        est.witness = std::move(F);
        est.log.push_back({1, std::string(label) + " is zero and rounds exactly"});
        return full;
      }
    }
    for (Index r = 1; r <= full; ++r) {
      add_component(A, solution, r - 1);
      if (rounding_errors(A, B, tau) != 0) continue;
      Factorization F = truncated_factors(solution, r, tau);
      if (!F.rounds_to(B)) continue;
      est.value = r;
      est.witness = std::move(F);
      est.log.push_back({r, std::string(label) + " truncation rounds exactly"});
      return full;
    }
    est.log.push_back({full, std::string(label) + " does not round to the input"});
    return full;
  };

  diag.solver_rank = truncate(X, "X");
  if (!est.witness) {
    // Z is feasible by construction; near convergence it agrees with X.
    truncate(Z, "Z");
    if (est.witness) est.warnings.push_back("X iterate infeasible; bound taken from the projected iterate");
  }
  if (diagnostics) *diagnostics = diag;
  if (!est.witness) {
    est.ok = false;
    est.value = 0;
  }
  est.elapsed_s = clock.seconds();
  return est;
}

}  // namespace rrank::spectral
