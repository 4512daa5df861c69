#pragma once

#include <cstdint>
#include <string>

#include "rrank/matrix.hpp"

namespace rrank::datagen {

enum class Distribution { uniform, normal };

std::string to_string(Distribution d);
Distribution parse_distribution(const std::string& name);

struct GenSpec {
  Index m = 100;
  Index n = 100;
  Index k = 10;
  Distribution distribution = Distribution::uniform;
  double mu = 0.5;     // expected entry of L R^T
  double noise = 0.0;  // flips relative to nnz of the noise-free matrix
  double tau = 0.5;
  std::uint64_t seed = 0;
};

void validate(const GenSpec& spec);

struct Generated {
  BinaryMatrix B;        // after noise
  BinaryMatrix clean;    // round_tau(L R^T)
  Factorization planted; // rounds exactly to clean
  std::size_t flips = 0;
};

// Entries of L and R i.i.d. with mean q = sqrt(mu / k): uniform on
// [q - 1/2, q + 1/2] or normal with unit variance.
Generated generate(const GenSpec& spec);

// Flips round(p * nnz(B)) distinct cells chosen uniformly among all m n
// cells (ties round up). Throws InvalidInput if that exceeds m n.
BinaryMatrix add_noise(const BinaryMatrix& B, double p, Rng& rng);
BinaryMatrix add_noise(const BinaryMatrix& B, double p, std::uint64_t seed);
std::size_t noise_flip_count(const BinaryMatrix& B, double p);

// Randomly permuted staircase: row i holds floor(n u^a) ones with u uniform
// and a = 1/density - 1, so the expected density is `density`.
BinaryMatrix generate_nested(Index m, Index n, double density, std::uint64_t seed);

}  // namespace rrank::datagen
