#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrank/bounds.hpp"
#include "rrank/datagen.hpp"
#include "rrank/io.hpp"
#include "rrank/lpca.hpp"
#include "rrank/matrix.hpp"
#include "rrank/perm.hpp"
#include "rrank/proj.hpp"
#include "rrank/spectral.hpp"

// Command implementations behind the rrank executable. Every command returns
// a JSON document (schema 1) and a process exit code.
namespace rrank::harness {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kParseError = 2,
  kMethodFailure = 3,
  kVerificationFailure = 4,
};

struct Options {
  double tau = 0.5;
  std::uint64_t seed = 0;
  Exec exec = Exec::serial;
  bool timing = true;  // false: elapsed fields are null so output is reproducible
  Index k = 0;         // target rank for minerr
  int max_sweeps = 100;
  proj::ProjConfig proj;
  lpca::LpcaConfig lpca;
  perm::PermConfig perm;
  spectral::NuclearConfig nuclear;
};

struct Outputs {
  std::optional<std::filesystem::path> witness;
  std::optional<std::filesystem::path> matrix;
  io::MatrixFormat format = io::MatrixFormat::dense;
};

struct Outcome {
  Json json;
  int exit_code = kOk;
};

const std::vector<std::string>& rank_methods();
const std::vector<std::string>& minerr_methods();
const std::vector<std::string>& nested_methods();

// Runs one rank estimator; throws InvalidInput on an unknown method.
RankEstimate estimate(const BinaryMatrix& B, const std::string& method, const Options& opts);

Outcome rank_command(const BinaryMatrix& B, const std::string& method, const Options& opts,
                     const Outputs& out = {});
Outcome minerr_command(const BinaryMatrix& B, const std::string& method, const Options& opts,
                       const Outputs& out = {});
Outcome nested_command(const BinaryMatrix& B, const std::string& method, const Options& opts,
                       const Outputs& out = {});
Outcome gen_command(const datagen::GenSpec& spec, const Outputs& out);
Outcome gen_nested_command(Index m, Index n, double density, std::uint64_t seed, const Outputs& out);
Outcome verify_command(const BinaryMatrix& B, const Factorization& F);

// Protocol files hold [dataset] and [run] blocks of "key = value" lines;
// values may be comma-separated lists, and integer ranges "a..b" expand.
// Every dataset block is crossed with every run block, and every list in a
// dataset block (except seeds) is crossed with the others.
struct Block {
  std::string kind;
  std::size_t line = 0;
  std::map<std::string, std::vector<std::string>> values;
};

struct Protocol {
  std::vector<Block> datasets;
  std::vector<Block> runs;
};

Protocol parse_protocol(std::istream& in);
Protocol parse_protocol(const std::filesystem::path& path);

struct ExperimentOptions {
  Options base;  // method settings shared by all cells
  std::optional<std::filesystem::path> witness_dir;
};

// Column order of the experiment CSV.
const std::vector<std::string>& experiment_columns();

struct ExperimentResult {
  std::string csv;
  int exit_code = kOk;
  std::size_t cells = 0;
  std::size_t failures = 0;
};

ExperimentResult run_experiment(const Protocol& protocol, const ExperimentOptions& opts);

// Serializes a JSON document with two-space indentation and a final newline.
std::string dump(const Json& json);

}  // namespace rrank::harness
