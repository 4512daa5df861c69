#include "rrank/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "rrank/error.hpp"

namespace rrank::datagen {

std::string to_string(Distribution d) { return d == Distribution::uniform ? "uniform" : "normal"; }

Distribution parse_distribution(const std::string& name) {
  if (name == "uniform") return Distribution::uniform;
  if (name == "normal") return Distribution::normal;
  throw InvalidInput("unknown distribution '" + name + "'");
}

void validate(const GenSpec& spec) {
  if (spec.m < 1 || spec.n < 1) throw InvalidInput("matrix dimensions must be positive");
  if (spec.k < 1) throw InvalidInput("planted rank must be at least 1");
  if (!(spec.mu > 0.0) || !std::isfinite(spec.mu)) throw InvalidInput("mu must be positive");
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) throw InvalidInput("noise level must be non-negative");
  if (!std::isfinite(spec.tau)) throw InvalidInput("threshold must be finite");
}

Generated generate(const GenSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const double q = std::sqrt(spec.mu / static_cast<double>(spec.k));
  auto fill = [&](RealMatrix& M) {
    if (spec.distribution == Distribution::uniform) {
      std::uniform_real_distribution<double> draw(q - 0.5, q + 0.5);
      for (Index i = 0; i < M.rows(); ++i)
        for (Index c = 0; c < M.cols(); ++c) M(i, c) = draw(rng);
    } else {
      std::normal_distribution<double> draw(q, 1.0);
      for (Index i = 0; i < M.rows(); ++i)
        for (Index c = 0; c < M.cols(); ++c) M(i, c) = draw(rng);
    }
  };
  Generated out;
  out.planted.tau = spec.tau;
  out.planted.L.resize(spec.m, spec.k);
  out.planted.R.resize(spec.n, spec.k);
  fill(out.planted.L);
  fill(out.planted.R);
  out.clean = out.planted.rounded();
  out.B = spec.noise > 0.0 ? add_noise(out.clean, spec.noise, rng) : out.clean;
  out.flips = hamming_error(out.clean, out.B);
  return out;
}

std::size_t noise_flip_count(const BinaryMatrix& B, double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidInput("noise level must be non-negative");
  const double flips = std::floor(p * static_cast<double>(B.nnz()) + 0.5);
  if (flips > static_cast<double>(B.size())) {
    throw InvalidInput("noise level asks for more flips than the matrix has cells");
  }
  return static_cast<std::size_t>(flips);
}

BinaryMatrix add_noise(const BinaryMatrix& B, double p, Rng& rng) {
  const auto flips = static_cast<Index>(noise_flip_count(B, p));
  const Index cells = B.size();
  // Floyd's sampling of `flips` distinct cells.
  std::unordered_set<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(flips));
  for (Index j = cells - flips; j < cells; ++j) {
    const Index t = std::uniform_int_distribution<Index>(0, j)(rng);
    chosen.insert(chosen.count(t) ? j : t);
  }
  BinaryMatrix out = B;
  for (Index cell : chosen) out.flip(cell / B.cols(), cell % B.cols());
  return out;
}

BinaryMatrix add_noise(const BinaryMatrix& B, double p, std::uint64_t seed) {
  Rng rng(seed);
  return add_noise(B, p, rng);
}

BinaryMatrix generate_nested(Index m, Index n, double density, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidInput("matrix dimensions must be positive");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidInput("density must lie in (0, 1]");
  Rng rng(seed);
  const double a = 1.0 / density - 1.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BinaryMatrix staircase(m, n);
  for (Index i = 0; i < m; ++i) {
    const auto ones = std::min<Index>(n, static_cast<Index>(std::floor(static_cast<double>(n) * std::pow(unit(rng), a))));
    for (Index j = 0; j < ones; ++j) staircase.set(i, j, true);
  }
  Permutation rows = identity_permutation(m);
  Permutation cols = identity_permutation(n);
  std::shuffle(rows.begin(), rows.end(), rng);
  std::shuffle(cols.begin(), cols.end(), rng);
  return staircase.permuted(rows, cols);
}

}  // namespace rrank::datagen
