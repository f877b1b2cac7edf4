#pragma once

#include <stdexcept>
#include <string>

namespace qsd {

/// Raised when an argument lies outside the mathematical domain of an
/// operation (non-positive operator where positivity is required, skew
/// parameter outside (0,1), dimension mismatch, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the Jacobi eigensolver when the sweep cap is hit.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (off-diagonal residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  [[nodiscard]] double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Malformed or non-conforming input document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qsd
