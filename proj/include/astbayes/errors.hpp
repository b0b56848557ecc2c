#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace astbayes {

/// Invalid parameter, empty sample, out-of-support argument.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature failed to converge or a numerical invariant was violated.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved_error = 0.0)
      : std::runtime_error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Malformed input file. Carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace astbayes

namespace astbayes {

/// Bad command-line or configuration input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace astbayes
