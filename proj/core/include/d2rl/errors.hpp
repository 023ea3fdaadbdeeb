#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace d2rl {

/// A documented precondition of an oracle routine does not hold
/// (e.g. asking for the stationary distribution of a multichain policy).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An iterative solver failed to reach its tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace d2rl
