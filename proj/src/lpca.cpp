#include "rrank/lpca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "rrank/error.hpp"
#include "rrank/linalg.hpp"

namespace rrank::lpca {
namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double entry_loglik(bool b, double z) { return -softplus(b ? -z : z); }

// One row subproblem: the rows of `other` are the fixed features, `labels`
// yields B along the row (or column) being updated.
template <typename Labels>
double row_objective(const RealVector& x, const RealMatrix& other, Labels labels, double tau) {
  double total = 0.0;
  for (Index j = 0; j < other.rows(); ++j) total += entry_loglik(labels(j), other.row(j).dot(x) - tau);
  return total;
}

template <typename Labels>
void newton_update(RealMatrix& self, Index i, const RealMatrix& other, Labels labels, double tau,
                   const LpcaConfig& cfg) {
  const Index k = self.cols();
  RealVector x = self.row(i).transpose();
  RealVector g = RealVector::Zero(k);
  RealMatrix W = RealMatrix::Zero(k, k);
  double current = 0.0;
  for (Index j = 0; j < other.rows(); ++j) {
    const auto feature = other.row(j).transpose();
    const double z = feature.dot(x) - tau;
    const bool b = labels(j);
    const double p = sigmoid(z);
    current += entry_loglik(b, z);
    g.noalias() += ((b ? 1.0 : 0.0) - p) * feature;
    W.selfadjointView<Eigen::Lower>().rankUpdate(feature, p * (1.0 - p));
  }
  if (g.squaredNorm() == 0.0) return;
  W = W.selfadjointView<Eigen::Lower>();
  const double scale = std::max(W.diagonal().maxCoeff(), 1e-12);
  W.diagonal().array() += cfg.damping * scale + 1e-12;
  RealVector step = W.ldlt().solve(g);
  if (!step.allFinite()) step = g;
  const double norm = step.norm();
  if (norm > cfg.max_step) step *= cfg.max_step / norm;
  const double slope = g.dot(step);
  if (!(slope > 0.0)) return;

  double t = 1.0;
  for (int attempt = 0; attempt < 40; ++attempt, t *= 0.5) {
    const RealVector candidate = x + t * step;
    const double value = row_objective(candidate, other, labels, tau);
    if (std::isfinite(value) && value >= current + 1e-4 * t * slope) {
      self.row(i) = candidate.transpose();
      return;
    }
  }
}

void sweep(const BinaryMatrix& B, RealMatrix& L, RealMatrix& R, double tau, const LpcaConfig& cfg) {
  parallel_for(cfg.exec, B.rows(), [&](Index i) {
    newton_update(L, i, R, [&](Index j) { return B(i, j); }, tau, cfg);
  });
  parallel_for(cfg.exec, B.cols(), [&](Index j) {
    newton_update(R, j, L, [&](Index i) { return B(i, j); }, tau, cfg);
  });
}

// Replaces (L, R) by (Q_L U sqrt(S), Q_R V sqrt(S)) where R_L R_R^T = U S V^T,
// which leaves L R^T unchanged and keeps both factors on the same scale.
void rebalance(RealMatrix& L, RealMatrix& R) {
  const Index k = L.cols();
  if (L.rows() < k || R.rows() < k) return;
  Eigen::HouseholderQR<RealMatrix> ql(L);
  Eigen::HouseholderQR<RealMatrix> qr(R);
  const RealMatrix TL = ql.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const RealMatrix TR = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Svd core = thin_svd(RealMatrix(TL * TR.transpose()));
  const RealVector root = core.s.cwiseSqrt();
  const RealMatrix QL = ql.householderQ() * RealMatrix::Identity(L.rows(), k);
  const RealMatrix QR = qr.householderQ() * RealMatrix::Identity(R.rows(), k);
  L = QL * core.U * root.asDiagonal();
  R = QR * core.V * root.asDiagonal();
}

void random_factors(RealMatrix& L, RealMatrix& R, Index from_col, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  for (Index c = from_col; c < L.cols(); ++c) {
    for (Index i = 0; i < L.rows(); ++i) L(i, c) = normal(rng);
    for (Index j = 0; j < R.rows(); ++j) R(j, c) = normal(rng);
  }
}

// Balanced factors of the truncated SVD of tau + 2(2B - 1).
void svd_factors(const BinaryMatrix& B, double tau, RealMatrix& L, RealMatrix& R, Index& filled) {
  RealMatrix target(B.rows(), B.cols());
  for (Index i = 0; i < B.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j) target(i, j) = tau + (B(i, j) ? 2.0 : -2.0);
  const Svd svd = thin_svd(target);
  filled = std::min<Index>(L.cols(), svd.s.size());
  for (Index c = 0; c < filled; ++c) {
    const double root = std::sqrt(svd.s(c));
    L.col(c) = svd.U.col(c) * root;
    R.col(c) = svd.V.col(c) * root;
  }
}

}  // namespace

void validate(const LpcaConfig& cfg) {
  if (cfg.max_iters < 1) throw InvalidInput("lpca max_iters must be positive");
  if (cfg.restarts < 1) throw InvalidInput("lpca restarts must be positive");
  if (!(cfg.tol > 0.0)) throw InvalidInput("lpca tolerance must be positive");
  if (!(cfg.init_scale > 0.0)) throw InvalidInput("lpca init scale must be positive");
  if (!(cfg.damping >= 0.0)) throw InvalidInput("lpca damping must be non-negative");
  if (!(cfg.max_step > 0.0)) throw InvalidInput("lpca max step must be positive");
  if (cfg.patience < 1) throw InvalidInput("lpca patience must be positive");
}

double log_likelihood(const BinaryMatrix& B, const RealMatrix& L, const RealMatrix& R, double tau) {
  if (L.rows() != B.rows() || R.rows() != B.cols() || L.cols() != R.cols()) {
    throw ShapeMismatch("factor shapes do not match the matrix");
  }
  const RealMatrix theta = L * R.transpose();
  double total = 0.0;
  for (Index i = 0; i < B.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j) total += entry_loglik(B(i, j), theta(i, j) - tau);
  return total;
}

Gradient gradient(const BinaryMatrix& B, const RealMatrix& L, const RealMatrix& R, double tau) {
  if (L.rows() != B.rows() || R.rows() != B.cols() || L.cols() != R.cols()) {
    throw ShapeMismatch("factor shapes do not match the matrix");
  }
  RealMatrix residual = L * R.transpose();
  for (Index i = 0; i < B.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j)
      residual(i, j) = (B(i, j) ? 1.0 : 0.0) - sigmoid(residual(i, j) - tau);
  return {residual * R, residual.transpose() * L};
}

FitResult fit(const BinaryMatrix& B, Index k, double tau, const LpcaConfig& cfg, FitStop stop_rule) {
  validate(cfg);
  if (k < 1) throw InvalidInput("rank k must be at least 1");
  if (!std::isfinite(tau)) throw InvalidInput("threshold must be finite");

  const bool stop_when_exact = stop_rule != FitStop::converged;
  const bool use_patience = stop_rule == FitStop::exact_or_stalled;
  Rng rng(cfg.seed);
  std::optional<FitResult> best;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    RealMatrix L = RealMatrix::Zero(B.rows(), k);
    RealMatrix R = RealMatrix::Zero(B.cols(), k);
    Index filled = 0;
    if (restart == 0 && cfg.svd_warm_start) svd_factors(B, tau, L, R, filled);
    random_factors(L, R, filled, cfg.init_scale, rng);

    FitResult run;
    run.restart = restart;
    double previous = log_likelihood(B, L, R, tau);
    bool diverged = !std::isfinite(previous);
    Factorization F{L, R, tau};
    std::size_t fewest = diverged ? 0 : F.mismatches(B);
    int stalled = 0;
    run.exact = !diverged && fewest == 0;
    for (int it = 1; it <= cfg.max_iters && !diverged && !(stop_when_exact && run.exact); ++it) {
      sweep(B, L, R, tau, cfg);
      rebalance(L, R);
      const double current = log_likelihood(B, L, R, tau);
      if (!std::isfinite(current) || !L.allFinite() || !R.allFinite()) {
        diverged = true;
        break;
      }
      run.trace.push_back(current);
      run.iterations = it;
      F.L = L;
      F.R = R;
      const std::size_t mismatches = F.mismatches(B);
      run.exact = mismatches == 0;
      if (mismatches < fewest) {
        fewest = mismatches;
        stalled = 0;
      } else if (use_patience && ++stalled >= cfg.patience) {
        previous = current;
        break;
      }
      const bool small_change = std::abs(current - previous) <= cfg.tol * std::max(std::abs(previous), 1.0);
      previous = current;
      if (small_change) {
        run.converged = true;
        break;
      }
    }
    if (diverged) continue;
    run.F = std::move(F);
    run.loglik = previous;
    const bool stop = stop_when_exact && run.exact;
    if (!best || run.loglik > best->loglik || (stop && !best->exact)) best = std::move(run);
    if (stop) break;
  }
  if (!best) throw NumericalError("logistic PCA diverged in every restart");
  return *best;
}

RankEstimate estimate_rank(const BinaryMatrix& B, double tau, const LpcaConfig& cfg) {
  validate(cfg);
  Stopwatch clock;
  RankEstimate est;
  est.method = "lpca";
  est.kind = BoundKind::upper;
  est.tau = tau;
  const Index full = std::min(B.rows(), B.cols());
  for (Index k = 1; k <= full; ++k) {
    FitResult result;
    try {
      result = fit(B, k, tau, cfg, FitStop::exact_or_stalled);
    } catch (const NumericalError& e) {
      est.log.push_back({k, "diverged"});
      est.warnings.push_back("k=" + std::to_string(k) + ": " + e.what());
      continue;
    }
    const std::size_t errors = result.F.mismatches(B);
    est.log.push_back({k, errors == 0 ? "exact" : std::to_string(errors) + " errors"});
    if (errors == 0) {
      est.value = k;
      est.witness = std::move(result.F);
      est.elapsed_s = clock.seconds();
      return est;
    }
  }
  est.value = full;
  est.witness = bounds::trivial_witness(B, tau);
  est.log.push_back({full, "fallback"});
  est.elapsed_s = clock.seconds();
  return est;
}

Decomposition min_error(const BinaryMatrix& B, Index k, double tau, const LpcaConfig& cfg) {
  FitResult result = fit(B, k, tau, cfg, FitStop::exact);
  Decomposition out;
  out.C = result.F.rounded();
  out.error = hamming_error(B, out.C);
  out.F = std::move(result.F);
  return out;
}

}  // namespace rrank::lpca
