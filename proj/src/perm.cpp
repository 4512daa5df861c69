#include "rrank/perm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rrank/error.hpp"
#include "rrank/kernels.hpp"

namespace rrank::perm {
namespace {

void check_permutation(const Permutation& perm, Index m) {
  if (static_cast<Index>(perm.size()) != m) throw InvalidInput("permutation length does not match rows");
  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  for (Index p : perm) {
    if (p < 0 || p >= m || seen[static_cast<std::size_t>(p)]) throw InvalidInput("not a permutation");
    seen[static_cast<std::size_t>(p)] = 1;
  }
}

Index hamming_rows(const BinaryMatrix& B, Index a, Index b) {
  const std::uint8_t* x = B.row_data(a);
  const std::uint8_t* y = B.row_data(b);
  Index d = 0;
  for (Index j = 0; j < B.cols(); ++j) d += x[j] != y[j];
  return d;
}

Permutation greedy_chain(const BinaryMatrix& B, Index start) {
  const Index m = B.rows();
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  Permutation order;
  order.reserve(static_cast<std::size_t>(m));
  Index current = start;
  for (;;) {
    order.push_back(current);
    used[static_cast<std::size_t>(current)] = 1;
    if (static_cast<Index>(order.size()) == m) break;
    Index next = -1;
    Index best = 0;
    for (Index i = 0; i < m; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const Index d = hamming_rows(B, current, i);
      if (next < 0 || d < best) {
        next = i;
        best = d;
      }
    }
    current = next;
  }
  return order;
}

double chebyshev_node(Index p, Index m) {
  if (m == 1) return 0.0;
  return -std::cos(std::numbers::pi * (2.0 * static_cast<double>(p) + 1.0) / (2.0 * static_cast<double>(m)));
}

// Spends unused degrees in pairs of roots placed inside one gap between
// adjacent nodes, which leaves every sign at the nodes unchanged. Each pair
// goes to the middle of the longest stretch of gaps without a root, which
// keeps the roots spread like those of a Chebyshev polynomial and limits the
// dynamic range of the polynomial over [-1, 1].
void add_balancing_pairs(std::vector<Index> gaps, std::vector<double>& roots, Index d,
                         const std::vector<double>& nodes) {
  const auto m = static_cast<Index>(nodes.size());
  Index spare = d - static_cast<Index>(gaps.size());
  while (spare >= 2) {
    std::sort(gaps.begin(), gaps.end());
    Index best_lo = -1;
    Index best_len = 0;
    Index previous = -1;
    for (std::size_t q = 0; q <= gaps.size(); ++q) {
      const Index next = q < gaps.size() ? gaps[q] : m - 1;
      if (next - previous > best_len) {
        best_len = next - previous;
        best_lo = previous;
      }
      previous = next;
    }
    if (best_len < 2) break;
    const Index g = best_lo + best_len / 2;
    const double a = nodes[static_cast<std::size_t>(g)];
    const double b = nodes[static_cast<std::size_t>(g + 1)];
    roots.push_back(a + (b - a) / 3.0);
    roots.push_back(a + 2.0 * (b - a) / 3.0);
    gaps.push_back(g);
    spare -= 2;
  }
}

// Chebyshev coefficients of sign0 * prod_r (r - t) from its values at the
// d+1 Chebyshev points of the first kind. The product form is evaluated in
// log scale, so every sample is accurate to a few ulps and the discrete
// cosine transform keeps the coefficient error at the level of the largest
// sample. Multiplying out the linear factors one by one instead loses the
// small values near clustered roots.
std::vector<double> chebyshev_coefficients(double sign0, const std::vector<double>& roots, Index d,
                                           const RealMatrix& cosines) {
  const auto points = static_cast<std::size_t>(d + 1);
  std::vector<double> log_abs(points, 0.0);
  std::vector<double> sign(points, sign0);
  for (std::size_t k = 0; k < points; ++k) {
    const double s = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(points));
    for (double r : roots) {
      const double f = r - s;
      if (f == 0.0) {
        log_abs[k] = -std::numeric_limits<double>::infinity();
        break;
      }
      log_abs[k] += std::log(std::abs(f));
      if (f < 0.0) sign[k] = -sign[k];
    }
  }
  const double top = *std::max_element(log_abs.begin(), log_abs.end());
  std::vector<double> value(points);
  for (std::size_t k = 0; k < points; ++k) value[k] = sign[k] * std::exp(log_abs[k] - top);

  std::vector<double> coef(points, 0.0);
  const double scale = 2.0 / static_cast<double>(points);
  for (Index j = 0; j <= d; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < points; ++k) sum += value[k] * cosines(j, static_cast<Index>(k));
    coef[static_cast<std::size_t>(j)] = (j == 0 ? 0.5 : 1.0) * scale * sum;
  }
  return coef;
}

}  // namespace

void validate(const PermConfig& cfg) {
  if (cfg.order_restarts < 0) throw InvalidInput("order restarts must be non-negative");
}

Flips column_flips(const BinaryMatrix& B, const Permutation& perm) {
  check_permutation(perm, B.rows());
  Flips f;
  f.per_column.assign(static_cast<std::size_t>(B.cols()), 0);
  for (std::size_t p = 0; p + 1 < perm.size(); ++p) {
    const std::uint8_t* x = B.row_data(perm[p]);
    const std::uint8_t* y = B.row_data(perm[p + 1]);
    for (Index j = 0; j < B.cols(); ++j) f.per_column[static_cast<std::size_t>(j)] += x[j] != y[j];
  }
  for (Index c : f.per_column) {
    f.max = std::max(f.max, c);
    f.total += c;
  }
  return f;
}

Permutation order_rows(const BinaryMatrix& B, const PermConfig& cfg) {
  validate(cfg);
  const Index m = B.rows();
  std::vector<Permutation> candidates;
  candidates.push_back(identity_permutation(m));
  Permutation by_sum = identity_permutation(m);
  const std::vector<Index> sums = B.row_sums();
  std::stable_sort(by_sum.begin(), by_sum.end(), [&](Index a, Index b) {
    return sums[static_cast<std::size_t>(a)] > sums[static_cast<std::size_t>(b)];
  });
  candidates.push_back(by_sum);
  candidates.push_back(greedy_chain(B, 0));
  candidates.push_back(greedy_chain(B, by_sum.front()));
  Rng rng(cfg.seed);
  std::uniform_int_distribution<Index> pick(0, m - 1);
  for (int r = 0; r < cfg.order_restarts; ++r) candidates.push_back(greedy_chain(B, pick(rng)));

  std::size_t best = 0;
  Flips best_flips = column_flips(B, candidates[0]);
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const Flips f = column_flips(B, candidates[c]);
    if (f.max < best_flips.max || (f.max == best_flips.max && f.total < best_flips.total)) {
      best = c;
      best_flips = f;
    }
  }
  return candidates[best];
}

Factorization polynomial_factorization(const BinaryMatrix& B, const Permutation& perm, Exec exec) {
  const Flips flips = column_flips(B, perm);
  const Index m = B.rows();
  const Index n = B.cols();
  const Index d = flips.max;

  std::vector<double> nodes(static_cast<std::size_t>(m));
  for (Index p = 0; p < m; ++p) nodes[static_cast<std::size_t>(p)] = chebyshev_node(p, m);

  Factorization F;
  F.tau = 0.0;
  F.L.resize(m, d + 1);
  for (Index p = 0; p < m; ++p) {
    const double t = nodes[static_cast<std::size_t>(p)];
    const Index i = perm[static_cast<std::size_t>(p)];
    F.L(i, 0) = 1.0;
    if (d >= 1) F.L(i, 1) = t;
    for (Index k = 2; k <= d; ++k) F.L(i, k) = 2.0 * t * F.L(i, k - 1) - F.L(i, k - 2);
  }

  // cosines(j, k) = T_j(s_k) at the Chebyshev points s_k of the first kind.
  RealMatrix cosines(d + 1, d + 1);
  for (Index j = 0; j <= d; ++j)
    for (Index k = 0; k <= d; ++k)
      cosines(j, k) = std::cos(std::numbers::pi * static_cast<double>(j) * (static_cast<double>(k) + 0.5) /
                               static_cast<double>(d + 1));

  F.R = RealMatrix::Zero(n, d + 1);
  parallel_for(exec, n, [&](Index j) {
    // Crossing a root from left to right flips the sign: p(t) = sign0 * prod (root - t).
    std::vector<Index> gaps;  // root between nodes g and g+1
    for (Index p = 0; p + 1 < m; ++p)
      if (B(perm[static_cast<std::size_t>(p)], j) != B(perm[static_cast<std::size_t>(p + 1)], j)) gaps.push_back(p);
    std::vector<double> roots;
    for (Index g : gaps)
      roots.push_back(0.5 * (nodes[static_cast<std::size_t>(g)] + nodes[static_cast<std::size_t>(g + 1)]));
    add_balancing_pairs(gaps, roots, d, nodes);
    const double sign0 = B(perm[0], j) ? 1.0 : -1.0;
    const std::vector<double> coef = chebyshev_coefficients(sign0, roots, d, cosines);
    double peak = 0.0;
    for (double c : coef) peak = std::max(peak, std::abs(c));
    if (!std::isfinite(peak) || !(peak > 0.0)) {
      throw NumericalError("polynomial coefficients left the double range; try a smaller instance");
    }
    for (Index k = 0; k <= d; ++k) F.R(j, k) = coef[static_cast<std::size_t>(k)] / peak;
  });

  // Strict signs: no reconstructed entry may be zero.
  const RealMatrix X = F.reconstruct(exec);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double x = X(i, j);
      if (!std::isfinite(x) || x == 0.0 || (x > 0.0) != B(i, j)) {
        throw NumericalError("polynomial witness lost its sign pattern at (" + std::to_string(i) + ", " +
                             std::to_string(j) + "); try a smaller instance");
      }
    }
  }
  return F;
}

RankEstimate estimate_rank(const BinaryMatrix& B, double tau, const PermConfig& cfg) {
  validate(cfg);
  if (!std::isfinite(tau)) throw InvalidInput("threshold must be finite");
  Stopwatch clock;
  RankEstimate est;
  est.method = "perm";
  est.kind = BoundKind::upper;
  est.tau = tau;

  const Permutation order = order_rows(B, cfg);
  const Flips flips = column_flips(B, order);
  Factorization F = polynomial_factorization(B, order, cfg.exec);
  est.log.push_back({F.rank(), "max flips " + std::to_string(flips.max)});
  if (tau != 0.0) {
    // Scale by a power of two so every entry has magnitude at least one;
    // then adding tau cannot erase a sign.
    const RealMatrix X = F.reconstruct(cfg.exec);
    const double smallest = X.cwiseAbs().minCoeff();
    int exponent = 0;
    std::frexp(std::max(1.0, std::abs(tau)) / smallest, &exponent);
    F.R *= std::ldexp(1.0, exponent + 1);
    F = bounds::shift_threshold(F, tau);
    est.log.push_back({F.rank(), "shifted to threshold " + std::to_string(tau)});
  }
  if (!F.rounds_to(B)) throw NumericalError("polynomial witness failed verification");
  est.value = F.rank();
  est.witness = std::move(F);
  est.elapsed_s = clock.seconds();
  return est;
}

}  // namespace rrank::perm
