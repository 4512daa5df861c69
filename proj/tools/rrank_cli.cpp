#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rrank/error.hpp"
#include "rrank/harness.hpp"
#include "rrank/io.hpp"

namespace {

using namespace rrank;

struct Cli {
  int threads = 0;
  bool no_timing = false;
  std::string json_out;

  std::string matrix;
  std::string format = "auto";
  std::string method;
  std::string witness;
  std::string output_matrix;
  std::string search = "linear";
  harness::Options opts;

  datagen::GenSpec gen;
  double nested_density = 0.0;
  std::string out_format = "dense";

  std::string protocol;
  std::string csv_out;
  std::string witness_dir;

  std::string factorization;
};

// RR_THREADS caps whatever --threads asks for.
int effective_threads(int requested) {
  int threads = requested;
  if (const char* env = std::getenv("RR_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = threads > 0 ? std::min(threads, cap) : cap;
  }
  return threads;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

harness::Outputs outputs(const Cli& cli) {
  harness::Outputs out;
  if (!cli.witness.empty()) out.witness = cli.witness;
  if (!cli.output_matrix.empty()) out.matrix = cli.output_matrix;
  out.format = io::parse_format(cli.out_format);
  return out;
}

void add_method_flags(CLI::App* cmd, Cli& cli) {
  auto& o = cli.opts;
  cmd->add_option("--tau", o.tau, "rounding threshold")->capture_default_str();
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_option("--epsilon", o.proj.epsilon, "proj: separation margin")->capture_default_str();
  cmd->add_option("--dmax", o.proj.d_max, "proj: largest dimension tried (0 = min(m,n))")->capture_default_str();
  cmd->add_option("--reps", o.proj.repetitions, "proj: projections per dimension")->capture_default_str();
  cmd->add_option("--search", cli.search, "proj: dimension search")
      ->check(CLI::IsMember({"linear", "doubling"}))
      ->capture_default_str();
  cmd->add_option("--restarts", o.lpca.restarts, "lpca: restarts")->capture_default_str();
  cmd->add_option("--max-iters", o.lpca.max_iters, "lpca: sweeps per restart")->capture_default_str();
  cmd->add_option("--tol", o.lpca.tol, "lpca: relative log-likelihood tolerance")->capture_default_str();
  cmd->add_option("--order-restarts", o.perm.order_restarts, "perm: random chain starts")->capture_default_str();
  cmd->add_option("--admm-iters", o.nuclear.admm_iters, "nuclear: ADMM iterations")->capture_default_str();
  cmd->add_option("--nuclear-eps", o.nuclear.eps, "nuclear: constraint margin")->capture_default_str();
  cmd->add_option("--witness", cli.witness, "write the witness factorization here");
}

BinaryMatrix load(const Cli& cli) { return io::read_matrix(cli.matrix, io::parse_format(cli.format)); }

int finish(const harness::Outcome& outcome, const Cli& cli) {
  emit(harness::dump(outcome.json), cli.json_out);
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  CLI::App app{"Rounding rank bounds and decompositions of binary matrices"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", cli.threads, "worker threads (RR_THREADS caps this)");
  app.add_flag("--no-timing", cli.no_timing, "report timings as null so output is reproducible");
  app.add_option("--json", cli.json_out, "write the JSON result here instead of stdout");

  auto* rank = app.add_subcommand("rank", "bound the rounding rank");
  rank->add_option("matrix", cli.matrix, "input matrix")->required();
  rank->add_option("--format", cli.format)->check(CLI::IsMember({"auto", "dense", "sparse"}))->capture_default_str();
  rank->add_option("--method", cli.method)->required()->check(CLI::IsMember(harness::rank_methods()));
  add_method_flags(rank, cli);

  auto* minerr = app.add_subcommand("minerr", "minimum-error decomposition at fixed rank");
  minerr->add_option("matrix", cli.matrix, "input matrix")->required();
  minerr->add_option("--format", cli.format)->check(CLI::IsMember({"auto", "dense", "sparse"}))->capture_default_str();
  minerr->add_option("--method", cli.method)->required()->check(CLI::IsMember(harness::minerr_methods()));
  minerr->add_option("--k", cli.opts.k, "target rank")->required();
  minerr->add_option("--output-matrix", cli.output_matrix, "write the rounded matrix here");
  minerr->add_option("--out-format", cli.out_format)->check(CLI::IsMember({"dense", "sparse"}))->capture_default_str();
  add_method_flags(minerr, cli);

  auto* nested = app.add_subcommand("nested", "nestedness checks and rank-one nested approximation");
  nested->add_option("matrix", cli.matrix, "input matrix")->required();
  nested->add_option("--format", cli.format)->check(CLI::IsMember({"auto", "dense", "sparse"}))->capture_default_str();
  nested->add_option("--method", cli.method)->required()->check(CLI::IsMember(harness::nested_methods()));
  nested->add_option("--max-sweeps", cli.opts.max_sweeps)->capture_default_str();
  nested->add_option("--seed", cli.opts.seed)->capture_default_str();
  nested->add_option("--output-matrix", cli.output_matrix, "write the nested approximation here");
  nested->add_option("--out-format", cli.out_format)->check(CLI::IsMember({"dense", "sparse"}))->capture_default_str();
  nested->add_option("--witness", cli.witness, "write the rank-one factors here");

  auto* gen = app.add_subcommand("gen", "generate a synthetic matrix");
  std::string distribution = "uniform";
  gen->add_option("--m", cli.gen.m)->capture_default_str();
  gen->add_option("--n", cli.gen.n)->capture_default_str();
  gen->add_option("--k", cli.gen.k)->capture_default_str();
  gen->add_option("--distribution", distribution)->check(CLI::IsMember({"uniform", "normal"}))->capture_default_str();
  gen->add_option("--mu", cli.gen.mu)->capture_default_str();
  gen->add_option("--noise", cli.gen.noise)->capture_default_str();
  gen->add_option("--tau", cli.gen.tau)->capture_default_str();
  gen->add_option("--seed", cli.gen.seed)->capture_default_str();
  gen->add_option("--nested-density", cli.nested_density, "generate a permuted staircase of this density instead");
  gen->add_option("--output-matrix,-o", cli.output_matrix, "matrix file")->required();
  gen->add_option("--out-format", cli.out_format)->check(CLI::IsMember({"dense", "sparse"}))->capture_default_str();
  gen->add_option("--witness", cli.witness, "planted factorization file");

  auto* experiment = app.add_subcommand("experiment", "run a protocol and emit CSV");
  experiment->add_option("protocol", cli.protocol, "protocol file")->required();
  experiment->add_option("--csv", cli.csv_out, "write the CSV here instead of stdout");
  experiment->add_option("--witness-dir", cli.witness_dir, "keep every witness and re-check it from disk");

  auto* verify = app.add_subcommand("verify", "check that a factorization rounds to a matrix");
  verify->add_option("matrix", cli.matrix, "input matrix")->required();
  verify->add_option("factorization", cli.factorization, "factorization file")->required();
  verify->add_option("--format", cli.format)->check(CLI::IsMember({"auto", "dense", "sparse"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : harness::kParseError;
  }

  const int threads = effective_threads(cli.threads);
  set_thread_limit(threads);
  cli.opts.timing = !cli.no_timing;
  cli.opts.exec = thread_limit() > 1 ? Exec::parallel : Exec::serial;
  cli.opts.proj.mode = cli.search == "doubling" ? proj::SearchMode::doubling_bisect : proj::SearchMode::linear_scan;

  try {
    if (*rank) return finish(harness::rank_command(load(cli), cli.method, cli.opts, outputs(cli)), cli);
    if (*minerr) return finish(harness::minerr_command(load(cli), cli.method, cli.opts, outputs(cli)), cli);
    if (*nested) return finish(harness::nested_command(load(cli), cli.method, cli.opts, outputs(cli)), cli);
    if (*gen) {
      if (cli.nested_density > 0.0) {
        return finish(harness::gen_nested_command(cli.gen.m, cli.gen.n, cli.nested_density, cli.gen.seed, outputs(cli)),
                      cli);
      }
      cli.gen.distribution = datagen::parse_distribution(distribution);
      return finish(harness::gen_command(cli.gen, outputs(cli)), cli);
    }
    if (*verify) {
      return finish(harness::verify_command(load(cli), io::read_factorization(cli.factorization)), cli);
    }
    if (*experiment) {
      harness::ExperimentOptions eo;
      eo.base = cli.opts;
      if (!cli.witness_dir.empty()) eo.witness_dir = cli.witness_dir;
      const harness::ExperimentResult result = harness::run_experiment(harness::parse_protocol(cli.protocol), eo);
      emit(result.csv, cli.csv_out);
      if (result.failures > 0) std::cerr << result.failures << " runs failed; see the failures column\n";
      return result.exit_code;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return harness::kParseError;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return harness::kParseError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return harness::kMethodFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
