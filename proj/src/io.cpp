#include "rrank/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

#include "rrank/error.hpp"

namespace rrank::io {
namespace {

// Line reader that tracks 1-based line numbers and skips blank lines.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Returns false at end of input.
  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, line_)) {
      ++number_;
      tokens.clear();
      std::string_view rest(line_);
      while (!rest.empty()) {
        const auto start = rest.find_first_not_of(" \t\r");
        if (start == std::string_view::npos) break;
        rest.remove_prefix(start);
        const auto end = rest.find_first_of(" \t\r");
        tokens.push_back(rest.substr(0, end));
        rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
      }
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::size_t line() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t number_ = 0;
};

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

Index parse_positive(std::string_view token, std::size_t line, const char* what) {
  const auto v = parse_number<long long>(token, line, what);
  if (v <= 0) throw ParseError(line, std::string(what) + " must be positive");
  return static_cast<Index>(v);
}

std::vector<std::string_view> expect_line(LineReader& reader, std::vector<std::string_view>& tokens,
                                          const char* what) {
  if (!reader.next(tokens)) {
    throw ParseError(reader.line() + 1, std::string("unexpected end of input, expected ") + what);
  }
  return tokens;
}

BinaryMatrix read_dense_body(LineReader& reader, Index m, Index n, Index max_entries) {
  if (m > max_entries / n) throw InvalidInput("matrix exceeds the dense size limit");
  BinaryMatrix B(m, n);
  std::vector<std::string_view> tokens;
  for (Index i = 0; i < m; ++i) {
    expect_line(reader, tokens, "matrix row");
    if (static_cast<Index>(tokens.size()) != n) {
      throw ParseError(reader.line(), "expected " + std::to_string(n) + " entries, found " +
                                          std::to_string(tokens.size()));
    }
    for (Index j = 0; j < n; ++j) {
      const auto t = tokens[static_cast<std::size_t>(j)];
      if (t == "1") {
        B.set(i, j, true);
      } else if (t != "0") {
        throw ParseError(reader.line(), "entry '" + std::string(t) + "' is not 0 or 1");
      }
    }
  }
  if (reader.next(tokens)) throw ParseError(reader.line(), "trailing data after matrix");
  return B;
}

SparseBinaryMatrix read_sparse_body(LineReader& reader, Index m, Index n, Index nnz) {
  SparseBinaryMatrix S{m, n, {}};
  S.ones.reserve(static_cast<std::size_t>(nnz));
  std::set<std::pair<Index, Index>> seen;
  std::vector<std::string_view> tokens;
  for (Index e = 0; e < nnz; ++e) {
    expect_line(reader, tokens, "sparse entry");
    if (tokens.size() != 2) throw ParseError(reader.line(), "expected 'i j'");
    const Index i = parse_positive(tokens[0], reader.line(), "row index");
    const Index j = parse_positive(tokens[1], reader.line(), "column index");
    if (i > m || j > n) throw ParseError(reader.line(), "entry outside the declared shape");
    if (!seen.emplace(i - 1, j - 1).second) throw ParseError(reader.line(), "duplicate entry");
    S.ones.emplace_back(i - 1, j - 1);
  }
  if (reader.next(tokens)) throw ParseError(reader.line(), "trailing data after sparse entries");
  return S;
}

void open_or_throw(std::ifstream& in, const std::filesystem::path& path) {
  in.open(path);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
}

void open_or_throw(std::ofstream& out, const std::filesystem::path& path) {
  out.open(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
}

}  // namespace

MatrixFormat parse_format(const std::string& name) {
  if (name == "auto") return MatrixFormat::automatic;
  if (name == "dense") return MatrixFormat::dense;
  if (name == "sparse") return MatrixFormat::sparse;
  throw InvalidInput("unknown matrix format '" + name + "'");
}

BinaryMatrix read_matrix(std::istream& in, MatrixFormat format, Index max_entries) {
  LineReader reader(in);
  std::vector<std::string_view> tokens;
  expect_line(reader, tokens, "header");
  if (format == MatrixFormat::automatic) {
    if (tokens.size() == 2) {
      format = MatrixFormat::dense;
    } else if (tokens.size() == 3) {
      format = MatrixFormat::sparse;
    } else {
      throw ParseError(reader.line(), "header must be 'm n' (dense) or 'm n nnz' (sparse)");
    }
  }
  const std::size_t expected = format == MatrixFormat::dense ? 2 : 3;
  if (tokens.size() != expected) {
    throw ParseError(reader.line(), format == MatrixFormat::dense ? "dense header must be 'm n'"
                                                                  : "sparse header must be 'm n nnz'");
  }
  const Index m = parse_positive(tokens[0], reader.line(), "row count");
  const Index n = parse_positive(tokens[1], reader.line(), "column count");
  if (format == MatrixFormat::dense) return read_dense_body(reader, m, n, max_entries);
  const auto nnz = parse_number<long long>(tokens[2], reader.line(), "nonzero count");
  if (nnz < 0) throw ParseError(reader.line(), "nonzero count must be non-negative");
  return read_sparse_body(reader, m, n, static_cast<Index>(nnz)).to_dense(max_entries);
}

BinaryMatrix read_matrix(const std::filesystem::path& path, MatrixFormat format, Index max_entries) {
  std::ifstream in;
  open_or_throw(in, path);
  return read_matrix(in, format, max_entries);
}

SparseBinaryMatrix read_sparse(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string_view> tokens;
  expect_line(reader, tokens, "header");
  if (tokens.size() != 3) throw ParseError(reader.line(), "sparse header must be 'm n nnz'");
  const Index m = parse_positive(tokens[0], reader.line(), "row count");
  const Index n = parse_positive(tokens[1], reader.line(), "column count");
  const auto nnz = parse_number<long long>(tokens[2], reader.line(), "nonzero count");
  if (nnz < 0) throw ParseError(reader.line(), "nonzero count must be non-negative");
  return read_sparse_body(reader, m, n, static_cast<Index>(nnz));
}

void write_matrix(std::ostream& out, const BinaryMatrix& B, MatrixFormat format) {
  if (format == MatrixFormat::sparse) {
    out << B.rows() << ' ' << B.cols() << ' ' << B.nnz() << '\n';
    for (Index i = 0; i < B.rows(); ++i)
      for (Index j = 0; j < B.cols(); ++j)
        if (B(i, j)) out << i + 1 << ' ' << j + 1 << '\n';
    return;
  }
  out << B.rows() << ' ' << B.cols() << '\n';
  std::string line;
  for (Index i = 0; i < B.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < B.cols(); ++j) {
      if (j > 0) line.push_back(' ');
      line.push_back(B(i, j) ? '1' : '0');
    }
    line.push_back('\n');
    out << line;
  }
}

void write_matrix(const std::filesystem::path& path, const BinaryMatrix& B, MatrixFormat format) {
  std::ofstream out;
  open_or_throw(out, path);
  write_matrix(out, B, format);
}

std::string format_real(double value) {
  std::array<char, 32> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) throw Error("cannot format real value");
  return std::string(buffer.data(), ptr);
}

Factorization read_factorization(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string_view> tokens;
  expect_line(reader, tokens, "header");
  if (tokens.size() != 4) throw ParseError(reader.line(), "factorization header must be 'm n k tau'");
  const Index m = parse_positive(tokens[0], reader.line(), "row count");
  const Index n = parse_positive(tokens[1], reader.line(), "column count");
  const Index k = parse_positive(tokens[2], reader.line(), "inner dimension");
  Factorization F;
  F.tau = parse_number<double>(tokens[3], reader.line(), "threshold");
  F.L.resize(m, k);
  F.R.resize(n, k);
  auto read_rows = [&](RealMatrix& target, const char* name) {
    for (Index i = 0; i < target.rows(); ++i) {
      expect_line(reader, tokens, name);
      if (static_cast<Index>(tokens.size()) != k) {
        throw ParseError(reader.line(), "expected " + std::to_string(k) + " reals");
      }
      for (Index t = 0; t < k; ++t) {
        target(i, t) = parse_number<double>(tokens[static_cast<std::size_t>(t)], reader.line(), "real");
      }
    }
  };
  read_rows(F.L, "row of L");
  read_rows(F.R, "row of R");
  if (reader.next(tokens)) throw ParseError(reader.line(), "trailing data after factorization");
  F.validate();
  return F;
}

Factorization read_factorization(const std::filesystem::path& path) {
  std::ifstream in;
  open_or_throw(in, path);
  return read_factorization(in);
}

void write_factorization(std::ostream& out, const Factorization& F) {
  F.validate();
  out << F.rows() << ' ' << F.cols() << ' ' << F.rank() << ' ' << format_real(F.tau) << '\n';
  auto write_rows = [&](const RealMatrix& M) {
    std::string line;
    for (Index i = 0; i < M.rows(); ++i) {
      line.clear();
      for (Index t = 0; t < M.cols(); ++t) {
        if (t > 0) line.push_back(' ');
        line += format_real(M(i, t));
      }
      line.push_back('\n');
      out << line;
    }
  };
  write_rows(F.L);
  write_rows(F.R);
}

void write_factorization(const std::filesystem::path& path, const Factorization& F) {
  std::ofstream out;
  open_or_throw(out, path);
  write_factorization(out, F);
}

}  // namespace rrank::io
