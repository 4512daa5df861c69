#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rrank/bounds.hpp"
#include "rrank/matrix.hpp"

// Random-projection estimator: project the rows of B to R^d and look for one
// separating affine hyperplane per column with a small LP.
namespace rrank::proj {

enum class SearchMode { linear_scan, doubling_bisect };

struct ProjConfig {
  double epsilon = 1e-9;       // strict-separation margin
  Index d_max = 0;             // 0 means min(m, n)
  SearchMode mode = SearchMode::linear_scan;
  int repetitions = 1;         // independent projections tried per d
  std::uint64_t seed = 0;
  std::size_t lp_max_iters = 100'000;
  Exec exec = Exec::serial;    // per-column LPs
};

void validate(const ProjConfig& cfg);

// L = B A with A an n x d sparse Johnson-Lindenstrauss matrix: entries
// sqrt(3/d) * {+1, 0, -1} with probabilities {1/6, 2/3, 1/6}.
RealMatrix achlioptas_project(const BinaryMatrix& B, Index d, Rng& rng);
RealMatrix achlioptas_project(const BinaryMatrix& B, Index d, std::uint64_t seed);

struct Trial {
  bool yes = false;
  std::optional<Factorization> witness;  // set iff yes, verified
  bool lp_limit_hit = false;             // some column LP stopped early
  Index failed_column = -1;
};

// Column-by-column separability of the given points L (m x d).
Trial separate_columns(const BinaryMatrix& B, const RealMatrix& L, double tau, const ProjConfig& cfg);

// One Monte Carlo decision for rrank_tau(B) <= d: yes (with witness) or unknown.
Trial try_dimension(const BinaryMatrix& B, Index d, double tau, const ProjConfig& cfg, Rng& rng);

RankEstimate estimate_rank(const BinaryMatrix& B, double tau, const ProjConfig& cfg);

struct MinErrorResult : Decomposition {
  std::vector<Index> fallback_columns;  // columns whose LP failed; R row set to 0
};

// Soft-margin variant at fixed dimension k: per column, minimize the L1 norm
// of non-negative slacks.
MinErrorResult min_error_decomposition(const BinaryMatrix& B, Index k, double tau, const ProjConfig& cfg);

}  // namespace rrank::proj
