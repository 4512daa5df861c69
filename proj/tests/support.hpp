#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "rrank/matrix.hpp"

namespace testing {

using rrank::BinaryMatrix;
using rrank::Index;

inline BinaryMatrix random_binary(Index m, Index n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(density);
  BinaryMatrix B(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) B.set(i, j, bit(rng));
  return B;
}

inline rrank::RealMatrix random_real(Index m, Index n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  rrank::RealMatrix A(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = normal(rng);
  return A;
}

inline rrank::Factorization random_factorization(Index m, Index n, Index k, double tau, std::uint64_t seed) {
  return rrank::Factorization{random_real(m, k, seed), random_real(n, k, seed + 7919), tau};
}

// Matrix number `code` of shape m x n, entry (i, j) from bit i*n + j.
inline BinaryMatrix from_code(Index m, Index n, std::uint64_t code) {
  BinaryMatrix B(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) B.set(i, j, (code >> (i * n + j)) & 1U);
  return B;
}

// Straight from the definition: every one has ones above and to the left.
inline bool directly_nested_by_definition(const BinaryMatrix& B) {
  for (Index i = 0; i < B.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j)
      if (B(i, j))
        for (Index a = 0; a <= i; ++a)
          for (Index b = 0; b <= j; ++b)
            if (!B(a, b)) return false;
  return true;
}

template <typename Visit>
void for_each_permutation(Index n, Visit visit) {
  std::vector<Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  do {
    if (visit(p)) return;
  } while (std::next_permutation(p.begin(), p.end()));
}

inline bool nested_by_brute_force(const BinaryMatrix& B) {
  bool found = false;
  for_each_permutation(B.rows(), [&](const std::vector<Index>& rows) {
    for_each_permutation(B.cols(), [&](const std::vector<Index>& cols) {
      found = directly_nested_by_definition(B.permuted(rows, cols));
      return found;
    });
    return found;
  });
  return found;
}

// Rounding rank one at 1/2: some row and column order shows B as
// diag(B1, B2) with B1, B2 directly nested (either may be empty).
inline bool block_nested_by_brute_force(const BinaryMatrix& B) {
  const Index m = B.rows();
  const Index n = B.cols();
  bool found = false;
  for_each_permutation(m, [&](const std::vector<Index>& rows) {
    for_each_permutation(n, [&](const std::vector<Index>& cols) {
      const BinaryMatrix P = B.permuted(rows, cols);
      for (Index a = 0; a <= m && !found; ++a) {
        for (Index b = 0; b <= n && !found; ++b) {
          bool ok = true;
          for (Index i = 0; i < m && ok; ++i)
            for (Index j = 0; j < n && ok; ++j) {
              const bool top = i < a;
              const bool left = j < b;
              if (top != left && P(i, j)) ok = false;
            }
          if (!ok) continue;
          auto block_ok = [&](Index r0, Index r1, Index c0, Index c1) {
            for (Index i = r0; i < r1; ++i)
              for (Index j = c0; j < c1; ++j)
                if (P(i, j))
                  for (Index x = r0; x <= i; ++x)
                    for (Index y = c0; y <= j; ++y)
                      if (!P(x, y)) return false;
            return true;
          };
          found = block_ok(0, a, 0, b) && block_ok(a, m, b, n);
        }
      }
      return found;
    });
    return found;
  });
  return found;
}

inline BinaryMatrix staircase(const std::vector<Index>& prefix, Index n) {
  BinaryMatrix B(static_cast<Index>(prefix.size()), n);
  for (std::size_t i = 0; i < prefix.size(); ++i)
    for (Index j = 0; j < prefix[i]; ++j) B.set(static_cast<Index>(i), j, true);
  return B;
}

}  // namespace testing
