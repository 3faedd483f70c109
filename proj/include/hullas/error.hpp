#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hullas {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameters, malformed files, violated preconditions.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation could not produce a result (non-convergence, infeasibility,
/// singular systems). The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input-file parse failure carrying the byte offset where parsing stopped.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : ValidationError(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Argument outside the domain of a correlation or formula.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// No admissible solution exists (e.g. a hull too heavy to float).
class InfeasibleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Iterative solver stopped without meeting its tolerance.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : NumericalError(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace hullas
