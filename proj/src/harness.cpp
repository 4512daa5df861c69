#include "rrank/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rrank/error.hpp"
#include "rrank/nested.hpp"

namespace rrank::harness {
namespace {

Json nullable_time(double seconds, const Options& opts) {
  return opts.timing ? Json(seconds) : Json(nullptr);
}

Json input_summary(const BinaryMatrix& B) {
  return Json{{"rows", B.rows()}, {"cols", B.cols()}, {"nnz", B.nnz()}};
}

Json path_or_null(const std::optional<std::filesystem::path>& path) {
  return path ? Json(path->string()) : Json(nullptr);
}

// Writes the witness if requested and re-checks it from what a reader gets
// back: the file when one is written, otherwise the in-memory factors.
bool recheck(const BinaryMatrix& B, const Factorization& F, const std::optional<std::filesystem::path>& path) {
  if (path) {
    io::write_factorization(*path, F);
    const Factorization back = io::read_factorization(*path);
    return back.rows() == B.rows() && back.cols() == B.cols() && round_threshold(back.reconstruct(), back.tau) == B;
  }
  return F.rows() == B.rows() && F.cols() == B.cols() && round_threshold(F.reconstruct(), F.tau) == B;
}

Json log_json(const std::vector<RankStep>& log) {
  Json out = Json::array();
  for (const auto& step : log) out.push_back(Json{{"k", step.k}, {"outcome", step.outcome}});
  return out;
}

Options with_settings(Options opts) {
  opts.proj.seed = opts.seed;
  opts.proj.exec = opts.exec;
  opts.lpca.seed = opts.seed;
  opts.lpca.exec = opts.exec;
  opts.perm.seed = opts.seed;
  opts.perm.exec = opts.exec;
  return opts;
}

double relative_or_nan(std::size_t errors, const BinaryMatrix& B) {
  const Index nnz = B.nnz();
  return nnz > 0 ? static_cast<double>(errors) / static_cast<double>(nnz) : std::nan("");
}

Json finite_or_null(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

bool contains(const std::vector<std::string>& list, const std::string& value) {
  return std::find(list.begin(), list.end(), value) != list.end();
}

}  // namespace

const std::vector<std::string>& rank_methods() {
  static const std::vector<std::string> methods{"proj", "svd", "lpca", "perm", "nuclear", "lowerbound"};
  return methods;
}

const std::vector<std::string>& minerr_methods() {
  static const std::vector<std::string> methods{"proj", "svd", "lpca", "truncsvd"};
  return methods;
}

const std::vector<std::string>& nested_methods() {
  static const std::vector<std::string> methods{"check", "construct", "nexhaust", "svd1"};
  return methods;
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

RankEstimate estimate(const BinaryMatrix& B, const std::string& method, const Options& raw) {
  const Options opts = with_settings(raw);
  if (method == "proj") return proj::estimate_rank(B, opts.tau, opts.proj);
  if (method == "svd") return spectral::svd_estimate_rank(B, opts.tau);
  if (method == "lpca") return lpca::estimate_rank(B, opts.tau, opts.lpca);
  if (method == "perm") return perm::estimate_rank(B, opts.tau, opts.perm);
  if (method == "nuclear") return spectral::nuclear_estimate_rank(B, opts.tau, opts.nuclear);
  if (method == "lowerbound") return bounds::spectral_lower_bound(B);
  throw InvalidInput("unknown rank method '" + method + "'");
}

Outcome rank_command(const BinaryMatrix& B, const std::string& method, const Options& opts, const Outputs& out) {
  if (!contains(rank_methods(), method)) throw InvalidInput("unknown rank method '" + method + "'");
  Outcome result;
  Json& j = result.json;
  j["schema"] = 1;
  j["command"] = "rank";
  j["method"] = method;
  j["input"] = input_summary(B);
  j["tau"] = opts.tau;

  RankEstimate est;
  try {
    est = estimate(B, method, opts);
  } catch (const NumericalError& e) {
    j["ok"] = false;
    j["error"] = e.what();
    result.exit_code = kMethodFailure;
    return result;
  }
  j["kind"] = to_string(est.kind);
  j["ok"] = est.ok;
  j["bound"] = est.ok ? Json(est.value) : Json(nullptr);
  j["bound_tau"] = est.tau;
  if (est.kind == BoundKind::lower) {
    // A threshold-0 bound loses at most one at any other threshold.
    const Index at_tau = opts.tau == 0.0 ? est.value : std::max<Index>(est.value - 1, 1);
    j["bound_at_requested_tau"] = at_tau;
  }
  j["elapsed_s"] = nullable_time(est.elapsed_s, opts);
  j["log"] = log_json(est.log);
  j["warnings"] = est.warnings;

  if (!est.ok) {
    j["witness_path"] = nullptr;
    j["verified"] = false;
    result.exit_code = kMethodFailure;
    return result;
  }
  if (est.kind == BoundKind::upper) {
    const bool verified = est.witness && recheck(B, *est.witness, out.witness);
    j["witness_rank"] = est.witness ? Json(est.witness->rank()) : Json(nullptr);
    j["witness_path"] = path_or_null(out.witness);
    j["verified"] = verified;
    if (!verified) result.exit_code = kVerificationFailure;
  } else {
    j["witness_path"] = nullptr;
    j["verified"] = nullptr;
  }
  return result;
}

Outcome minerr_command(const BinaryMatrix& B, const std::string& method, const Options& raw, const Outputs& out) {
  if (!contains(minerr_methods(), method)) throw InvalidInput("unknown minerr method '" + method + "'");
  const Options opts = with_settings(raw);
  const Index full = std::min(B.rows(), B.cols());
  if (opts.k < 1 || opts.k > full) {
    throw InvalidInput("k must lie in [1, " + std::to_string(full) + "]");
  }
  Outcome result;
  Json& j = result.json;
  j["schema"] = 1;
  j["command"] = "minerr";
  j["method"] = method;
  j["input"] = input_summary(B);
  j["k"] = opts.k;
  j["tau"] = opts.tau;

  Stopwatch clock;
  if (method == "truncsvd") {
    const spectral::TruncSvd t = spectral::trunc_svd_baseline(B, opts.k);
    j["rounded"] = false;
    j["residual"] = t.residual;
    j["abs_residual"] = t.abs_residual;
    j["error"] = nullptr;
    j["relative_error"] = nullptr;
    j["elapsed_s"] = nullable_time(clock.seconds(), opts);
    j["output_matrix"] = nullptr;
    j["witness_path"] = nullptr;
    j["verified"] = nullptr;
    return result;
  }

  Decomposition d;
  Json extra = Json::object();
  try {
    if (method == "proj") {
      proj::MinErrorResult r = proj::min_error_decomposition(B, opts.k, opts.tau, opts.proj);
      extra["fallback_columns"] = r.fallback_columns;
      d = std::move(r);
    } else if (method == "svd") {
      spectral::SvdMinError r = spectral::svd_min_error(B, opts.k, opts.tau);
      extra["best_rank"] = r.best_rank;
      extra["errors"] = r.errors;
      extra["best_errors"] = r.best_errors;
      d = std::move(r);
    } else {
      d = lpca::min_error(B, opts.k, opts.tau, opts.lpca);
    }
  } catch (const NumericalError& e) {
    j["ok"] = false;
    j["error_message"] = e.what();
    result.exit_code = kMethodFailure;
    return result;
  }
  const double elapsed = clock.seconds();
  j["rounded"] = true;
  j["ok"] = true;
  j["error"] = d.error;
  j["relative_error"] = finite_or_null(relative_or_nan(d.error, B));
  j["elapsed_s"] = nullable_time(elapsed, opts);
  for (auto& [key, value] : extra.items()) j[key] = value;

  if (out.matrix) io::write_matrix(*out.matrix, d.C, out.format);
  j["output_matrix"] = path_or_null(out.matrix);
  // The reported C must be the rounding of the reported factors and its error
  // must match a recount.
  bool verified = recheck(d.C, d.F, out.witness) && hamming_error(B, d.C) == d.error;
  if (out.matrix) verified = verified && io::read_matrix(*out.matrix) == d.C;
  j["witness_path"] = path_or_null(out.witness);
  j["verified"] = verified;
  if (!verified) result.exit_code = kVerificationFailure;
  return result;
}

Outcome nested_command(const BinaryMatrix& B, const std::string& method, const Options& opts, const Outputs& out) {
  if (!contains(nested_methods(), method)) throw InvalidInput("unknown nested method '" + method + "'");
  Outcome result;
  Json& j = result.json;
  j["schema"] = 1;
  j["command"] = "nested";
  j["method"] = method;
  j["input"] = input_summary(B);
  Stopwatch clock;

  if (method == "check") {
    const nested::NestedCheck check = nested::is_nested(B);
    j["nested"] = check.nested;
    j["directly_nested"] = nested::is_directly_nested(B);
    if (B.nnz() > 0) {
      const nested::Rrank1Decision decision = nested::rrank1_decide(B);
      j["rrank1"] = decision.yes;
      j["components"] = decision.components;
      if (decision.yes) {
        const bool verified = recheck(B, *decision.witness, out.witness);
        j["witness_path"] = path_or_null(out.witness);
        j["verified"] = verified;
        if (!verified) result.exit_code = kVerificationFailure;
      }
    } else {
      j["rrank1"] = nullptr;
      j["components"] = 0;
    }
    j["elapsed_s"] = nullable_time(clock.seconds(), opts);
    return result;
  }

  if (method == "construct") {
    if (!nested::is_nested(B).nested) {
      j["ok"] = false;
      j["error_message"] = "input is not nested";
      result.exit_code = kMethodFailure;
      return result;
    }
    const nested::RankOne f = nested::nested_rank1_construct(B);
    const bool verified = recheck(B, f.factorization(), out.witness);
    j["ok"] = true;
    j["error"] = 0;
    j["elapsed_s"] = nullable_time(clock.seconds(), opts);
    j["witness_path"] = path_or_null(out.witness);
    j["verified"] = verified;
    if (!verified) result.exit_code = kVerificationFailure;
    return result;
  }

  nested::NestedSolution sol;
  if (method == "nexhaust") {
    sol = nested::nexhaust(B, opts.max_sweeps, opts.exec);
  } else {
    if (B.nnz() == 0) throw InvalidInput("svd1 needs a nonzero matrix");
    sol = nested::svd_nested(B);
  }
  j["ok"] = true;
  j["error"] = sol.error;
  j["relative_error"] = finite_or_null(relative_or_nan(sol.error, B));
  j["iterations"] = sol.iterations;
  j["trace"] = sol.trace;
  j["degenerate"] = sol.degenerate;
  j["elapsed_s"] = nullable_time(clock.seconds(), opts);
  if (out.matrix) io::write_matrix(*out.matrix, sol.C, out.format);
  j["output_matrix"] = path_or_null(out.matrix);
  const bool verified = recheck(sol.C, sol.factorization(), out.witness) && nested::is_nested(sol.C).nested &&
                        hamming_error(B, sol.C) == sol.error;
  j["witness_path"] = path_or_null(out.witness);
  j["verified"] = verified;
  if (!verified) result.exit_code = kVerificationFailure;
  return result;
}

Outcome gen_command(const datagen::GenSpec& spec, const Outputs& out) {
  const datagen::Generated g = datagen::generate(spec);
  Outcome result;
  Json& j = result.json;
  j["schema"] = 1;
  j["command"] = "gen";
  j["kind"] = "planted";
  j["m"] = spec.m;
  j["n"] = spec.n;
  j["k"] = spec.k;
  j["distribution"] = datagen::to_string(spec.distribution);
  j["mu"] = spec.mu;
  j["noise"] = spec.noise;
  j["tau"] = spec.tau;
  j["seed"] = spec.seed;
  j["nnz"] = g.B.nnz();
  j["density"] = static_cast<double>(g.B.nnz()) / static_cast<double>(g.B.size());
  j["flips"] = g.flips;
  if (out.matrix) io::write_matrix(*out.matrix, g.B, out.format);
  j["output_matrix"] = path_or_null(out.matrix);
  // The planted factors certify the noise-free matrix only.
  const bool verified = recheck(g.clean, g.planted, out.witness);
  j["witness_path"] = path_or_null(out.witness);
  j["witness_certifies"] = g.flips == 0 ? "output" : "noise-free matrix";
  j["verified"] = verified;
  if (!verified) result.exit_code = kVerificationFailure;
  return result;
}

Outcome gen_nested_command(Index m, Index n, double density, std::uint64_t seed, const Outputs& out) {
  const BinaryMatrix B = datagen::generate_nested(m, n, density, seed);
  Outcome result;
  Json& j = result.json;
  j["schema"] = 1;
  j["command"] = "gen";
  j["kind"] = "nested";
  j["m"] = m;
  j["n"] = n;
  j["target_density"] = density;
  j["seed"] = seed;
  j["nnz"] = B.nnz();
  j["density"] = static_cast<double>(B.nnz()) / static_cast<double>(B.size());
  if (out.matrix) io::write_matrix(*out.matrix, B, out.format);
  j["output_matrix"] = path_or_null(out.matrix);
  const nested::RankOne f = nested::nested_rank1_construct(B);
  const bool verified = recheck(B, f.factorization(), out.witness);
  j["witness_path"] = path_or_null(out.witness);
  j["verified"] = verified;
  if (!verified) result.exit_code = kVerificationFailure;
  return result;
}

Outcome verify_command(const BinaryMatrix& B, const Factorization& F) {
  Outcome result;
  Json& j = result.json;
  j["schema"] = 1;
  j["command"] = "verify";
  j["input"] = input_summary(B);
  j["rank"] = F.rank();
  j["tau"] = F.tau;
  if (F.rows() != B.rows() || F.cols() != B.cols()) {
    j["mismatches"] = nullptr;
    j["verified"] = false;
    j["error_message"] = "factorization shape does not match the matrix";
    result.exit_code = kVerificationFailure;
    return result;
  }
  const std::size_t mismatches = hamming_error(B, round_threshold(F.reconstruct(), F.tau));
  j["mismatches"] = mismatches;
  j["verified"] = mismatches == 0;
  if (mismatches != 0) result.exit_code = kVerificationFailure;
  return result;
}

}  // namespace rrank::harness
