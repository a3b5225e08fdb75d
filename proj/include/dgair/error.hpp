#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgair {

/// Bad input to a public operation (counts, indices, degrees, configuration).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Expression text could not be parsed. `offset()` is the byte offset of the failure.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Expression evaluation failed (unbound variable, division by zero, non-finite value).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file error carrying the 1-based line number (0 when not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Numerical failure during a run: blow-up, Krylov or Picard non-convergence, bad factorization.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PicardError : public NumericalError {
 public:
  PicardError(const std::string& what, std::vector<double> history)
      : NumericalError(what), history_(std::move(history)) {}
  /// Max-norm difference between successive iterates, one entry per iteration.
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace dgair
