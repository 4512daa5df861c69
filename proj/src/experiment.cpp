#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rrank/error.hpp"
#include "rrank/harness.hpp"

namespace rrank::harness {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_value(const std::string& token, T& value) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

// "a, b, c" with integer ranges "lo..hi" expanded.
std::vector<std::string> split_list(const std::string& text, std::size_t line) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ParseError(line, "empty list item");
    const auto dots = item.find("..");
    long long lo = 0;
    long long hi = 0;
    if (dots != std::string::npos && parse_value(item.substr(0, dots), lo) && parse_value(item.substr(dots + 2), hi)) {
      if (hi < lo || hi - lo > 100000) throw ParseError(line, "bad range '" + item + "'");
      for (long long v = lo; v <= hi; ++v) items.push_back(std::to_string(v));
    } else {
      items.push_back(item);
    }
  }
  if (items.empty()) throw ParseError(line, "missing value");
  return items;
}

const std::set<std::string>& dataset_keys() {
  static const std::set<std::string> keys{"m", "n", "k", "mu", "distribution", "noise", "tau", "seeds"};
  return keys;
}

const std::set<std::string>& run_keys() {
  static const std::set<std::string> keys{"task", "methods", "k", "restarts", "max_iters", "tol", "epsilon",
                                          "reps", "dmax", "admm_iters", "nuclear_eps", "order_restarts"};
  return keys;
}

template <typename T>
T to_number(const std::string& token, const Block& block, const std::string& key) {
  T value{};
  if (!parse_value(token, value)) {
    throw ParseError(block.line, "invalid value '" + token + "' for '" + key + "'");
  }
  return value;
}

std::vector<std::string> values_or(const Block& block, const std::string& key, std::vector<std::string> fallback) {
  const auto it = block.values.find(key);
  return it == block.values.end() ? fallback : it->second;
}

std::string scalar(const Block& block, const std::string& key) {
  const auto& v = block.values.at(key);
  if (v.size() != 1) throw ParseError(block.line, "'" + key + "' takes a single value");
  return v.front();
}

struct Dataset {
  datagen::GenSpec spec;  // seed filled per job
  std::vector<std::uint64_t> seeds;
};

std::vector<Dataset> expand_dataset(const Block& block) {
  const auto ms = values_or(block, "m", {"100"});
  const auto ns = values_or(block, "n", {"100"});
  const auto ks = values_or(block, "k", {"10"});
  const auto mus = values_or(block, "mu", {"0.5"});
  const auto dists = values_or(block, "distribution", {"uniform"});
  const auto noises = values_or(block, "noise", {"0"});
  const auto taus = values_or(block, "tau", {"0.5"});
  std::vector<std::uint64_t> seeds;
  for (const auto& s : values_or(block, "seeds", {"1..10"})) seeds.push_back(to_number<std::uint64_t>(s, block, "seeds"));

  std::vector<Dataset> out;
  for (const auto& m : ms)
    for (const auto& n : ns)
      for (const auto& k : ks)
        for (const auto& mu : mus)
          for (const auto& dist : dists)
            for (const auto& noise : noises)
              for (const auto& tau : taus) {
                Dataset d;
                d.spec.m = to_number<Index>(m, block, "m");
                d.spec.n = to_number<Index>(n, block, "n");
                d.spec.k = to_number<Index>(k, block, "k");
                d.spec.mu = to_number<double>(mu, block, "mu");
                try {
                  d.spec.distribution = datagen::parse_distribution(dist);
                } catch (const InvalidInput& e) {
                  throw ParseError(block.line, e.what());
                }
                d.spec.noise = to_number<double>(noise, block, "noise");
                d.spec.tau = to_number<double>(tau, block, "tau");
                try {
                  datagen::validate(d.spec);
                } catch (const InvalidInput& e) {
                  throw ParseError(block.line, e.what());
                }
                d.seeds = seeds;
                out.push_back(d);
              }
  return out;
}

struct Run {
  std::string task;  // rank | minerr
  std::vector<std::string> methods;
  std::vector<std::string> ks;  // integers or "planted"
  Options opts;
};

Run expand_run(const Block& block, const Options& base) {
  Run run;
  run.opts = base;
  run.task = block.values.count("task") ? scalar(block, "task") : "rank";
  if (run.task != "rank" && run.task != "minerr") throw ParseError(block.line, "unknown task '" + run.task + "'");
  const auto& allowed = run.task == "rank" ? rank_methods() : minerr_methods();
  run.methods = values_or(block, "methods", {});
  if (run.methods.empty()) throw ParseError(block.line, "run block needs 'methods'");
  for (const auto& m : run.methods)
    if (std::find(allowed.begin(), allowed.end(), m) == allowed.end())
      throw ParseError(block.line, "method '" + m + "' is not available for task " + run.task);
  run.ks = run.task == "minerr" ? values_or(block, "k", {"planted"}) : std::vector<std::string>{"NA"};
  for (const auto& k : run.ks)
    if (run.task == "minerr" && k != "planted") to_number<Index>(k, block, "k");

  Options& o = run.opts;
  if (block.values.count("restarts")) o.lpca.restarts = to_number<int>(scalar(block, "restarts"), block, "restarts");
  if (block.values.count("max_iters")) o.lpca.max_iters = to_number<int>(scalar(block, "max_iters"), block, "max_iters");
  if (block.values.count("tol")) o.lpca.tol = to_number<double>(scalar(block, "tol"), block, "tol");
  if (block.values.count("epsilon")) o.proj.epsilon = to_number<double>(scalar(block, "epsilon"), block, "epsilon");
  if (block.values.count("reps")) o.proj.repetitions = to_number<int>(scalar(block, "reps"), block, "reps");
  if (block.values.count("dmax")) o.proj.d_max = to_number<Index>(scalar(block, "dmax"), block, "dmax");
  if (block.values.count("admm_iters"))
    o.nuclear.admm_iters = to_number<int>(scalar(block, "admm_iters"), block, "admm_iters");
  if (block.values.count("nuclear_eps"))
    o.nuclear.eps = to_number<double>(scalar(block, "nuclear_eps"), block, "nuclear_eps");
  if (block.values.count("order_restarts"))
    o.perm.order_restarts = to_number<int>(scalar(block, "order_restarts"), block, "order_restarts");
  try {
    proj::validate(o.proj);
    lpca::validate(o.lpca);
    perm::validate(o.perm);
    spectral::validate(o.nuclear);
  } catch (const InvalidInput& e) {
    throw ParseError(block.line, e.what());
  }
  return run;
}

struct Cell {
  const Dataset* data;
  const Run* run;
  std::string method;
  std::string k;  // as written, "planted", or "NA"
};

struct JobResult {
  bool ok = false;
  double value = 0.0;
  double seconds = 0.0;
  bool has_witness = false;
  bool verified_now = false;  // in-memory check when no witness directory
  std::string matrix_file;
  std::string witness_file;
  std::string message;
};

std::string fmt(double v) { return io::format_real(v); }

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = std::nan("");
};

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = std::nan("");
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::string or_na(double v) { return std::isfinite(v) ? fmt(v) : "NA"; }

JobResult run_job(const Cell& cell, std::uint64_t seed, const std::optional<std::filesystem::path>& dir,
                  const std::string& stem) {
  JobResult r;
  datagen::GenSpec spec = cell.data->spec;
  spec.seed = seed;
  const datagen::Generated g = datagen::generate(spec);
  Options opts = cell.run->opts;
  opts.tau = spec.tau;
  opts.seed = seed;
  opts.exec = Exec::serial;

  std::optional<Factorization> witness;
  BinaryMatrix target = g.B;
  Stopwatch clock;
  if (cell.run->task == "rank") {
    RankEstimate est = estimate(g.B, cell.method, opts);
    r.seconds = clock.seconds();
    r.ok = est.ok;
    r.value = static_cast<double>(est.value);
    if (est.kind == BoundKind::upper && est.ok) witness = std::move(est.witness);
    if (!est.ok) r.message = "no bound";
  } else {
    opts.k = cell.k == "planted" ? spec.k : std::stoll(cell.k);
    opts.k = std::min(opts.k, std::min(spec.m, spec.n));
    Outcome out = minerr_command(g.B, cell.method, opts);
    r.seconds = clock.seconds();
    r.ok = out.json.value("ok", true);
    if (cell.method == "truncsvd") {
      r.value = out.json["residual"].get<double>();
    } else if (r.ok) {
      const Index nnz = g.B.nnz();
      r.value = nnz > 0 ? out.json["error"].get<double>() / static_cast<double>(nnz) : 0.0;
      r.ok = out.json["verified"].get<bool>();
      if (!r.ok) r.message = "decomposition failed verification";
    }
  }
  if (witness) {
    r.has_witness = true;
    if (dir) {
      r.matrix_file = (*dir / (stem + ".mat")).string();
      r.witness_file = (*dir / (stem + ".fact")).string();
      io::write_matrix(r.matrix_file, target);
      io::write_factorization(r.witness_file, *witness);
    } else {
      r.verified_now = round_threshold(witness->reconstruct(), witness->tau) == target;
    }
  }
  return r;
}

}  // namespace

Protocol parse_protocol(std::istream& in) {
  Protocol protocol;
  Block* current = nullptr;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[dataset]") {
        protocol.datasets.push_back(Block{"dataset", number, {}});
        current = &protocol.datasets.back();
      } else if (line == "[run]") {
        protocol.runs.push_back(Block{"run", number, {}});
        current = &protocol.runs.back();
      } else {
        throw ParseError(number, "unknown block " + line);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(number, "expected key = value");
    if (!current) throw ParseError(number, "key outside of a block");
    const std::string key = trim(line.substr(0, eq));
    const auto& allowed = current->kind == "dataset" ? dataset_keys() : run_keys();
    if (!allowed.count(key)) throw ParseError(number, "unknown key '" + key + "' in [" + current->kind + "]");
    if (current->values.count(key)) throw ParseError(number, "duplicate key '" + key + "'");
    current->values[key] = split_list(trim(line.substr(eq + 1)), number);
  }
  if (protocol.datasets.empty()) throw ParseError(0, "protocol has no [dataset] block");
  if (protocol.runs.empty()) throw ParseError(0, "protocol has no [run] block");
  return protocol;
}

Protocol parse_protocol(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return parse_protocol(in);
}

const std::vector<std::string>& experiment_columns() {
  static const std::vector<std::string> columns{
      "task", "method", "m", "n", "k", "distribution", "mu", "noise", "tau", "param_k",
      "seeds", "failures", "mean", "std", "time_mean", "time_std", "verified"};
  return columns;
}

ExperimentResult run_experiment(const Protocol& protocol, const ExperimentOptions& opts) {
  std::vector<Dataset> datasets;
  for (const auto& block : protocol.datasets) {
    auto expanded = expand_dataset(block);
    datasets.insert(datasets.end(), expanded.begin(), expanded.end());
  }
  std::vector<Run> runs;
  for (const auto& block : protocol.runs) runs.push_back(expand_run(block, opts.base));

  std::vector<Cell> cells;
  for (const auto& data : datasets)
    for (const auto& run : runs)
      for (const auto& method : run.methods)
        for (const auto& k : run.ks) cells.push_back(Cell{&data, &run, method, k});

  struct Job {
    std::size_t cell;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::uint64_t seed : cells[c].data->seeds) jobs.push_back(Job{c, seed});

  if (opts.witness_dir) std::filesystem::create_directories(*opts.witness_dir);
  std::vector<JobResult> results(jobs.size());
  parallel_for(opts.base.exec, jobs.size(), [&](std::size_t idx) {
    const Job& job = jobs[idx];
    const Cell& cell = cells[job.cell];
    const std::string stem = "cell" + std::to_string(job.cell) + "_" + cell.method + "_seed" + std::to_string(job.seed);
    try {
      results[idx] = run_job(cell, job.seed, opts.witness_dir, stem);
    } catch (const Error& e) {
      results[idx].ok = false;
      results[idx].message = e.what();
    }
  });

  // Independent re-check of every written witness.
  for (auto& r : results) {
    if (!r.has_witness || r.witness_file.empty()) continue;
    const BinaryMatrix B = io::read_matrix(r.matrix_file);
    const Factorization F = io::read_factorization(r.witness_file);
    r.verified_now = F.rows() == B.rows() && F.cols() == B.cols() && round_threshold(F.reconstruct(), F.tau) == B;
  }

  ExperimentResult out;
  out.cells = cells.size();
  std::ostringstream csv;
  for (std::size_t c = 0; c < experiment_columns().size(); ++c) csv << (c ? "," : "") << experiment_columns()[c];
  csv << "\n";
  std::size_t job = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    std::vector<double> values;
    std::vector<double> times;
    std::size_t failures = 0;
    std::size_t witnesses = 0;
    bool verified = true;
    for (std::size_t s = 0; s < cell.data->seeds.size(); ++s, ++job) {
      const JobResult& r = results[job];
      if (!r.ok) {
        ++failures;
        continue;
      }
      values.push_back(r.value);
      times.push_back(r.seconds);
      if (r.has_witness) {
        ++witnesses;
        verified = verified && r.verified_now;
      }
    }
    out.failures += failures;
    if (!verified) out.exit_code = kVerificationFailure;
    const Summary v = summarize(values);
    const Summary t = summarize(times);
    const datagen::GenSpec& spec = cell.data->spec;
    csv << cell.run->task << "," << cell.method << "," << spec.m << "," << spec.n << "," << spec.k << ","
        << datagen::to_string(spec.distribution) << "," << fmt(spec.mu) << "," << fmt(spec.noise) << ","
        << fmt(spec.tau) << "," << (cell.k == "planted" ? std::to_string(spec.k) : cell.k) << ","
        << cell.data->seeds.size() << "," << failures << "," << or_na(v.mean) << "," << or_na(v.stddev) << ",";
    if (opts.base.timing) {
      csv << or_na(t.mean) << "," << or_na(t.stddev);
    } else {
      csv << "NA,NA";
    }
    csv << "," << (witnesses == 0 ? "NA" : (verified ? "true" : "false")) << "\n";
  }
  out.csv = csv.str();
  return out;
}

}  // namespace rrank::harness
