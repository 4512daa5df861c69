#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "rrank/matrix.hpp"

namespace rrank {

enum class BoundKind { upper, lower };

std::string to_string(BoundKind kind);

struct RankStep {
  Index k = 0;
  std::string outcome;
};

// Result of any rank estimator. An upper bound always carries a witness that
// rounds exactly to the input; a lower bound never does.
struct RankEstimate {
  std::string method;
  BoundKind kind = BoundKind::upper;
  Index value = 0;
  double tau = 0.5;  // threshold the bound refers to
  std::optional<Factorization> witness;
  double elapsed_s = 0.0;
  std::vector<RankStep> log;
  bool ok = true;  // false: the method produced no bound
  std::vector<std::string> warnings;
};

// Wall-clock helper for the estimators.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

namespace bounds {

// Lower bound on the threshold-0 rounding rank from the singular values of
// the sign matrix: the smallest d with (d+1) * sum_{i<=d} s_i^2 >= m n.
// The result has tau = 0; at any other threshold value-1 is a valid bound.
RankEstimate spectral_lower_bound(const BinaryMatrix& B);

// Appends the column c*1 to L and 1 to R (c = tau_new - F.tau), so the
// rounding at tau_new matches the rounding of F at F.tau. Rank grows by one.
Factorization shift_threshold(const Factorization& F, double tau_new);

// Rescales R by tau_new / F.tau. Both thresholds must be nonzero and of the
// same sign.
Factorization scale_threshold(const Factorization& F, double tau_new);

// Non-negative factorization of inner dimension k+2 with the same rounding
// at threshold 1/2. F.tau must be 0.5.
Factorization nonnegative_lift(const Factorization& F);

// Rank-2 factorization with round_{1/2}(L R^T) = I_n: the diagonal of the
// product is exactly 1/2 and every off-diagonal entry is below it.
Factorization identity_rank2_witness(Index n);

// Rank min(m,n) witness valid at any threshold: the matrix tau + (2B - 1)
// factored through an identity on the shorter side.
Factorization trivial_witness(const BinaryMatrix& B, double tau);

}  // namespace bounds
}  // namespace rrank
