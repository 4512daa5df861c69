#pragma once

#include <cstdint>
#include <vector>

#include "rrank/bounds.hpp"
#include "rrank/matrix.hpp"

// Logistic PCA: B_ij ~ Bernoulli(f(theta_ij - tau)) with theta = L R^T and f
// the logistic function, fitted by alternating damped Newton steps on the
// rows of L and R.
namespace rrank::lpca {

struct LpcaConfig {
  int max_iters = 500;         // alternating sweeps per restart
  double tol = 1e-6;           // relative log-likelihood change that stops a restart
  int restarts = 3;
  double init_scale = 0.1;     // std. deviation of the random initial factors
  std::uint64_t seed = 0;
  bool svd_warm_start = true;  // restart 0 starts from a truncated SVD
  double damping = 1e-6;       // ridge added to each Newton system, relative to its diagonal
  double max_step = 10.0;      // Euclidean cap on a single Newton step
  int patience = 25;           // rank scan: sweeps without fewer mismatches before giving up
  Exec exec = Exec::serial;    // row updates within a sweep
};

void validate(const LpcaConfig& cfg);

// Sum_ij B_ij log f(z_ij) + (1 - B_ij) log(1 - f(z_ij)), z = L R^T - tau,
// evaluated as -softplus(-(2B-1) z) so it never takes log(0).
double log_likelihood(const BinaryMatrix& B, const RealMatrix& L, const RealMatrix& R, double tau);

struct Gradient {
  RealMatrix dL;
  RealMatrix dR;
};

Gradient gradient(const BinaryMatrix& B, const RealMatrix& L, const RealMatrix& R, double tau);

// When a restart ends: at likelihood convergence (or the sweep limit), also
// as soon as the rounding is exact, or additionally when the mismatch count
// has not improved for cfg.patience sweeps.
enum class FitStop { converged, exact, exact_or_stalled };

struct FitResult {
  Factorization F;
  double loglik = 0.0;
  std::vector<double> trace;  // log-likelihood after each sweep of the returned restart
  int iterations = 0;
  int restart = 0;            // index of the returned restart
  bool converged = false;
  bool exact = false;         // round_tau(L R^T) == B
};

// Best of cfg.restarts local optima by log-likelihood. Unless stop is
// FitStop::converged, the first restart whose rounding reproduces B is
// returned at once. Throws NumericalError when every restart diverges.
FitResult fit(const BinaryMatrix& B, Index k, double tau, const LpcaConfig& cfg,
              FitStop stop = FitStop::converged);

// k = 1, 2, ... until a fit rounds exactly to B; trivial witness at min(m,n)
// otherwise.
RankEstimate estimate_rank(const BinaryMatrix& B, double tau, const LpcaConfig& cfg);

Decomposition min_error(const BinaryMatrix& B, Index k, double tau, const LpcaConfig& cfg);

}  // namespace rrank::lpca
