#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shrinkbound {

// Invalid argument to a numerical kernel (negative tau, sigma <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation not defined for the given input shape (e.g. k != 2 closed forms).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Adaptive quadrature hit its subdivision cap. Carries the best estimate so far.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate,
                   double error_estimate)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

// Root finder was handed an interval without a sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file or specification string. line() is 1-based, 0 if n/a.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace shrinkbound
