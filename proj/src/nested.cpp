#include "rrank/nested.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rrank/error.hpp"
#include "rrank/linalg.hpp"

namespace rrank::nested {
namespace {

Permutation sorted_by_sum(const std::vector<Index>& sums) {
  Permutation order = identity_permutation(static_cast<Index>(sums.size()));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return sums[static_cast<std::size_t>(a)] > sums[static_cast<std::size_t>(b)];
  });
  return order;
}

bool rounds_one(double l, double r) { return l * r >= 0.5; }

BinaryMatrix round_rank1(const RealVector& l, const RealVector& r) {
  BinaryMatrix C(l.size(), r.size());
  for (Index i = 0; i < l.size(); ++i)
    for (Index j = 0; j < r.size(); ++j) C.set(i, j, rounds_one(l(i), r(j)));
  return C;
}

// Smallest c with fl(c * v) >= 1/2.
double breakpoint(double v) {
  double c = 0.5 / v;
  while (!rounds_one(c, v)) c = std::nextafter(c, std::numeric_limits<double>::infinity());
  while (true) {
    const double lower = std::nextafter(c, 0.0);
    if (!rounds_one(lower, v)) break;
    c = lower;
  }
  return c;
}

// Best value for one factor entry given the opposite factor `other` and the
// target line `bit(j)`. Returns the current value unless a candidate is
// strictly better.
template <typename Bits>
double best_entry(double current, const RealVector& other, const std::vector<Index>& order, Bits bit,
                  double other_max) {
  const Index len = other.size();
  // ones_prefix[q]: ones among the q largest entries of `other`.
  std::vector<Index> ones_prefix(static_cast<std::size_t>(len) + 1, 0);
  for (Index q = 0; q < len; ++q)
    ones_prefix[static_cast<std::size_t>(q) + 1] = ones_prefix[static_cast<std::size_t>(q)] + bit(order[static_cast<std::size_t>(q)]);
  const Index total_ones = ones_prefix.back();

  // Rounding of c * other is monotone in the entry of other, so the ones
  // form a prefix of `order`.
  auto error_of = [&](double c) {
    Index lo = 0;
    Index hi = len;
    while (lo < hi) {
      const Index mid = (lo + hi) / 2;
      if (rounds_one(c, other(order[static_cast<std::size_t>(mid)]))) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    const Index inside = ones_prefix[static_cast<std::size_t>(lo)];
    return (lo - inside) + (total_ones - inside);
  };

  double best = current;
  Index best_error = error_of(current);
  auto consider = [&](double c) {
    const Index e = error_of(c);
    if (e < best_error) {
      best = c;
      best_error = e;
    }
  };
  consider(0.0);
  if (other_max > 0.0) consider(breakpoint(other_max));
  for (Index j = 0; j < len; ++j) {
    if (bit(j) && other(j) > 0.0) consider(breakpoint(other(j)));
  }
  return best;
}

// Updates every entry of `self` against the fixed `other`. Returns true when
// `other` is identically zero.
template <typename Bits>
bool update_side(RealVector& self, const RealVector& other, Bits bits, Exec exec) {
  const double other_max = other.size() > 0 ? other.maxCoeff() : 0.0;
  if (!(other_max > 0.0)) {
    self.setZero();
    return true;
  }
  std::vector<Index> order = identity_permutation(other.size());
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return other(a) > other(b); });
  parallel_for(exec, self.size(), [&](Index i) {
    self(i) = best_entry(self(i), other, order, [&](Index j) { return bits(i, j); }, other_max);
  });
  return false;
}

NestedSolution finish(const BinaryMatrix& B, RankOne factors) {
  NestedSolution out;
  out.l = std::move(factors.l);
  out.r = std::move(factors.r);
  out.C = round_rank1(out.l, out.r);
  out.error = hamming_error(B, out.C);
  return out;
}

}  // namespace

bool is_directly_nested(const BinaryMatrix& B) {
  Index previous = B.cols();
  for (Index i = 0; i < B.rows(); ++i) {
    const std::uint8_t* row = B.row_data(i);
    Index prefix = 0;
    while (prefix < B.cols() && row[prefix]) ++prefix;
    for (Index j = prefix; j < B.cols(); ++j)
      if (row[j]) return false;
    if (prefix > previous) return false;
    previous = prefix;
  }
  return true;
}

NestedCheck is_nested(const BinaryMatrix& B) {
  NestedCheck check;
  check.rows = sorted_by_sum(B.row_sums());
  check.cols = sorted_by_sum(B.col_sums());
  check.nested = is_directly_nested(B.permuted(check.rows, check.cols));
  if (!check.nested) {
    check.rows.clear();
    check.cols.clear();
  }
  return check;
}

BinaryMatrix RankOne::rounded() const { return round_rank1(l, r); }

Factorization RankOne::factorization() const {
  Factorization F;
  F.L = l;
  F.R = r;
  F.tau = 0.5;
  return F;
}

RankOne sum_sorted_rank1(const BinaryMatrix& B) {
  const Permutation cols = sorted_by_sum(B.col_sums());
  RankOne out;
  out.l.resize(B.rows());
  for (Index i = 0; i < B.rows(); ++i) out.l(i) = static_cast<double>(B.row_sum(i));
  out.r.resize(B.cols());
  for (Index q = 0; q < B.cols(); ++q) out.r(cols[static_cast<std::size_t>(q)]) = 1.0 / static_cast<double>(2 * q + 1);
  return out;
}

RankOne nested_rank1_construct(const BinaryMatrix& B) {
  if (!is_nested(B).nested) throw InvalidInput("matrix is not nested");
  return sum_sorted_rank1(B);
}

Rrank1Decision rrank1_decide(const BinaryMatrix& B) {
  if (B.nnz() == 0) throw InvalidInput("rank-one decision needs a nonzero matrix");
  const Index m = B.rows();
  const Index n = B.cols();

  // Union-find over m row vertices and n column vertices.
  std::vector<Index> parent(static_cast<std::size_t>(m + n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (B(i, j)) parent[static_cast<std::size_t>(find(i))] = find(m + j);

  // Components that contain at least one edge, in order of first row.
  std::vector<Index> roots;
  for (Index i = 0; i < m; ++i) {
    if (B.row_sum(i) == 0) continue;
    const Index root = find(i);
    if (std::find(roots.begin(), roots.end(), root) == roots.end()) roots.push_back(root);
  }

  Rrank1Decision decision;
  decision.components = static_cast<Index>(roots.size());
  if (roots.size() > 2) return decision;

  RealVector l = RealVector::Zero(m);
  RealVector r = RealVector::Zero(n);
  for (std::size_t c = 0; c < roots.size(); ++c) {
    Permutation rows;
    Permutation cols;
    for (Index i = 0; i < m; ++i)
      if (B.row_sum(i) > 0 && find(i) == roots[c]) rows.push_back(i);
    for (Index j = 0; j < n; ++j)
      if (B.col_sum(j) > 0 && find(m + j) == roots[c]) cols.push_back(j);
    const auto block_rows = static_cast<Index>(rows.size());
    const auto block_cols = static_cast<Index>(cols.size());
    BinaryMatrix block(block_rows, block_cols);
    for (Index p = 0; p < block_rows; ++p)
      for (Index q = 0; q < block_cols; ++q)
        block.set(p, q, B(rows[static_cast<std::size_t>(p)], cols[static_cast<std::size_t>(q)]));
    if (!is_nested(block).nested) return decision;
    const RankOne part = sum_sorted_rank1(block);
    const double sign = c == 0 ? 1.0 : -1.0;
    for (std::size_t p = 0; p < rows.size(); ++p) l(rows[p]) = sign * part.l(static_cast<Index>(p));
    for (std::size_t q = 0; q < cols.size(); ++q) r(cols[q]) = sign * part.r(static_cast<Index>(q));
  }
  Factorization F;
  F.L = l;
  F.R = r;
  F.tau = 0.5;
  if (!F.rounds_to(B)) throw NumericalError("rank-one witness failed verification");
  decision.yes = true;
  decision.witness = std::move(F);
  return decision;
}

NestedSolution nexhaust(const BinaryMatrix& B, RankOne seed, int max_sweeps, Exec exec) {
  if (seed.l.size() != B.rows() || seed.r.size() != B.cols()) {
    throw ShapeMismatch("seed factors do not match the matrix");
  }
  if (max_sweeps < 0) throw InvalidInput("max sweeps must be non-negative");
  if ((seed.l.array() < 0.0).any() || (seed.r.array() < 0.0).any() || !seed.l.allFinite() ||
      !seed.r.allFinite()) {
    throw InvalidInput("seed factors must be finite and non-negative");
  }
  NestedSolution out = finish(B, std::move(seed));
  out.trace.push_back(out.error);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    out.degenerate |= update_side(out.l, out.r, [&](Index i, Index j) { return B(i, j); }, exec);
    out.degenerate |= update_side(out.r, out.l, [&](Index j, Index i) { return B(i, j); }, exec);
    out.C = round_rank1(out.l, out.r);
    const std::size_t error = hamming_error(B, out.C);
    if (error > out.error) throw NumericalError("alternating search increased the error");
    out.iterations = sweep;
    out.trace.push_back(error);
    const bool improved = error < out.error;
    out.error = error;
    if (!improved) break;
  }
  return out;
}

NestedSolution nexhaust(const BinaryMatrix& B, int max_sweeps, Exec exec) {
  return nexhaust(B, sum_sorted_rank1(B), max_sweeps, exec);
}

NestedSolution svd_nested(const BinaryMatrix& B) {
  if (B.nnz() == 0) throw InvalidInput("rank-one SVD needs a nonzero matrix");
  const Svd svd = thin_svd(B);
  const double root = std::sqrt(svd.s(0));
  RankOne factors;
  factors.l = svd.U.col(0).cwiseAbs() * root;
  factors.r = svd.V.col(0).cwiseAbs() * root;
  NestedSolution out = finish(B, std::move(factors));
  out.trace.push_back(out.error);
  return out;
}

}  // namespace rrank::nested
