#pragma once

#include <cstddef>
#include <vector>

#include "rrank/bounds.hpp"
#include "rrank/matrix.hpp"

namespace rrank::spectral {

// Smallest k whose rounded rank-k truncated SVD equals B. When no
// truncation rounds exactly (possible only for tau outside (0, 1]) the
// trivial rank-min(m,n) witness is returned.
RankEstimate svd_estimate_rank(const BinaryMatrix& B, double tau);

struct SvdMinError : Decomposition {
  Index best_rank = 0;
  // errors[l-1]: mismatches of the rounded rank-l truncation.
  std::vector<std::size_t> errors;
  // best_errors[l-1] = min over l' <= l of errors; the answer for budget l.
  std::vector<std::size_t> best_errors;
};

// Rounds the rank-l truncations for l = 1..k and keeps the best (smallest l
// on ties).
SvdMinError svd_min_error(const BinaryMatrix& B, Index k, double tau);

struct TruncSvd {
  RealMatrix approx;
  double abs_residual = 0.0;  // ||B - approx||_F^2
  double residual = 0.0;      // relative to ||B||_F^2 (= nnz); 0 for B = 0
};

// Plain rank-k truncated SVD, no rounding.
TruncSvd trunc_svd_baseline(const BinaryMatrix& B, Index k);

struct NuclearConfig {
  double eps = 1e-3;      // margin realizing the strict inequality
  int admm_iters = 500;
  double rho = 1.0;
  double tol = 1e-6;      // relative primal/dual residual tolerance
  double rank_tol = 1e-8; // singular values below rank_tol * s_1 count as zero
};

void validate(const NuclearConfig& cfg);

struct NuclearDiagnostics {
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  Index solver_rank = 0;  // numerical rank of the ADMM iterate before truncation
};

// Minimizes ||X||_* subject to X_ij >= tau + eps where B_ij = 1 and
// X_ij <= tau - eps where B_ij = 0, by ADMM on X = Z (singular value
// thresholding on X, box projection on Z). The bound is the smallest r whose
// rank-r truncation of X still rounds to B. If X does not round to B within
// the iteration budget the projected iterate Z is tried instead; if neither
// rounds the estimate has ok = false and no witness.
RankEstimate nuclear_estimate_rank(const BinaryMatrix& B, double tau, const NuclearConfig& cfg,
                                   NuclearDiagnostics* diagnostics = nullptr);

}  // namespace rrank::spectral
