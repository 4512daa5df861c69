#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rrank {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something outside an operation's domain.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Malformed text input; line() is 1-based, 0 when the problem is not tied
// to a particular line (e.g. premature end of file).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// SVD failure, overflow in a construction, diverging optimizer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rrank
