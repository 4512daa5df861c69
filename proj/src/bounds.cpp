#include "rrank/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "rrank/error.hpp"
#include "rrank/kernels.hpp"
#include "rrank/linalg.hpp"

namespace rrank {

std::string to_string(BoundKind kind) { return kind == BoundKind::upper ? "upper" : "lower"; }

namespace bounds {

RankEstimate spectral_lower_bound(const BinaryMatrix& B) {
  if (B.empty()) throw InvalidInput("spectral lower bound needs a nonempty matrix");
  Stopwatch clock;
  const Svd svd = thin_svd(to_sign(B).cast<double>());
  const Index r = numerical_rank(svd.s, 1e-10);
  const double target = static_cast<double>(B.rows()) * static_cast<double>(B.cols());

  RankEstimate est;
  est.method = "lowerbound";
  est.kind = BoundKind::lower;
  est.tau = 0.0;
  double energy = 0.0;
  Index bound = r;
  for (Index d = 1; d <= r; ++d) {
    energy += svd.s(d - 1) * svd.s(d - 1);
    const bool holds = static_cast<double>(d + 1) * energy >= target;
    est.log.push_back({d, holds ? "holds" : "violated"});
    if (holds) {
      bound = d;
      break;
    }
  }
  // Sum of all squared singular values of a sign matrix is exactly m n, so
  // d = r always satisfies the inequality; guard against round-off anyway.
  est.value = std::max<Index>(bound, 1);
  est.elapsed_s = clock.seconds();
  return est;
}

Factorization shift_threshold(const Factorization& F, double tau_new) {
  F.validate();
  if (!std::isfinite(tau_new)) throw InvalidInput("threshold must be finite");
  const double c = tau_new - F.tau;
  const Index k = F.rank();
  Factorization out;
  out.L.resize(F.rows(), k + 1);
  out.R.resize(F.cols(), k + 1);
  out.L.leftCols(k) = F.L;
  out.L.col(k).setConstant(c);
  out.R.leftCols(k) = F.R;
  out.R.col(k).setOnes();
  out.tau = tau_new;
  return out;
}

Factorization scale_threshold(const Factorization& F, double tau_new) {
  F.validate();
  if (F.tau == 0.0 || tau_new == 0.0 || !std::isfinite(tau_new)) {
    throw InvalidInput("threshold scaling needs nonzero finite thresholds");
  }
  if ((F.tau > 0.0) != (tau_new > 0.0)) {
    throw InvalidInput("threshold scaling needs thresholds of the same sign");
  }
  Factorization out = F;
  out.R *= tau_new / F.tau;
  out.tau = tau_new;
  return out;
}

namespace {

// Scales L by (1 + eta) so that every entry at or above 1/2 moves strictly
// above it while entries below stay below. Rounding and rank are unchanged.
Factorization separate_ties(const Factorization& F) {
  const RealMatrix A = F.reconstruct();
  double below = 0.0;  // largest positive entry strictly below 1/2
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      if (A(i, j) < 0.5 && A(i, j) > below) below = A(i, j);
  const double eta = below > 0.0 ? std::min(1.0, 0.5 * (0.5 / below - 1.0)) : 1.0;
  Factorization out = F;
  out.L *= 1.0 + eta;
  return out;
}

}  // namespace

Factorization nonnegative_lift(const Factorization& input) {
  input.validate();
  if (input.tau != 0.5) throw InvalidInput("non-negative lift expects a threshold-1/2 factorization");
  const Factorization F = separate_ties(input);
  const Index m = F.rows();
  const Index n = F.cols();
  const Index k = F.rank();

  Factorization out;
  out.tau = 0.5;
  out.R.resize(n, k + 2);
  for (Index j = 0; j < n; ++j) {
    // r' = (r, -1/2, 1/2 - sum r), then scaled into [-1/2, 1/2] and shifted by 1/2.
    RealVector r(k + 2);
    r.head(k) = F.R.row(j).transpose();
    r(k) = -0.5;
    r(k + 1) = 0.5 - F.R.row(j).sum();
    const double d = r.cwiseAbs().maxCoeff();  // >= 1/2
    for (Index t = 0; t < k + 2; ++t) out.R(j, t) = 0.5 + r(t) / (2.0 * d);
  }
  out.L.resize(m, k + 2);
  for (Index i = 0; i < m; ++i) {
    const double c = std::max(1.0, F.L.row(i).cwiseAbs().maxCoeff());
    RealVector l(k + 2);
    for (Index t = 0; t < k; ++t) l(t) = c + F.L(i, t);
    l(k) = c + 1.0;
    l(k + 1) = c;
    const double norm1 = l.sum();  // every entry is non-negative, l(k) >= 2
    if (!(norm1 > 0.0)) throw NumericalError("degenerate normalization in non-negative lift");
    // After L1 normalization the offset term of <r''', l''> equals exactly
    // 1/2, so no further rescaling is needed.
    for (Index t = 0; t < k + 2; ++t) out.L(i, t) = std::max(0.0, l(t) / norm1);
  }
  out.validate();
  return out;
}

Factorization identity_rank2_witness(Index n) {
  if (n < 1) throw InvalidInput("identity size must be positive");
  if (n > 500) throw InvalidInput("identity witness entries overflow beyond n = 500");
  Factorization F;
  F.tau = 0.5;
  F.L.resize(n, 2);
  F.R.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    F.L(i, 0) = std::ldexp(1.0, static_cast<int>(-i));
    F.L(i, 1) = -0.5 * std::ldexp(1.0, static_cast<int>(-2 * i));
    F.R(i, 0) = std::ldexp(1.0, static_cast<int>(i));
    F.R(i, 1) = std::ldexp(1.0, static_cast<int>(2 * i));
  }
  return F;
}

Factorization trivial_witness(const BinaryMatrix& B, double tau) {
  if (!std::isfinite(tau)) throw InvalidInput("threshold must be finite");
  RealMatrix X(B.rows(), B.cols());
  for (Index i = 0; i < B.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j) X(i, j) = tau + (B(i, j) ? 1.0 : -1.0);
  Factorization F;
  F.tau = tau;
  if (B.rows() <= B.cols()) {
    F.L = RealMatrix::Identity(B.rows(), B.rows());
    F.R = X.transpose();
  } else {
    F.L = X;
    F.R = RealMatrix::Identity(B.cols(), B.cols());
  }
  return F;
}

}  // namespace bounds
}  // namespace rrank
