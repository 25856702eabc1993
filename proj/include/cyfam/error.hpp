#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cyfam {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Period matrix is not symmetric or its imaginary part is not positive definite.
class InvalidPeriod : public Error {
 public:
  using Error::Error;
};

/// A base parameter lies outside the disc on which the family is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated on the diagonal (u = 0 modulo the lattice).
class SingularPoint : public Error {
 public:
  using Error::Error;
};

/// Right-hand side of a Poisson problem has a nonzero harmonic part.
class NotSolvable : public Error {
 public:
  using Error::Error;
};

/// Tensor shapes or grids do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Index pairing of a contraction is not compatible with the variances.
class PairingError : public Error {
 public:
  using Error::Error;
};

/// Requested accuracy cannot be reached with the configured discretization.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Metric samples are not Hermitian positive definite.
class InvalidMetric : public Error {
 public:
  using Error::Error;
};

/// Line search exhausted without keeping the metric positive definite.
class StepFailure : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not converge; carries the residual history.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace cyfam
