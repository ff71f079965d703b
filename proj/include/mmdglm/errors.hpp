#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mmdglm {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a precondition (dimension mismatch, empty data, family mismatch).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class NumericInputError : public Error {
 public:
  using Error::Error;
};

class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

// All points coincide, so the median heuristic has nothing to measure.
class DegenerateBandwidthError : public Error {
 public:
  using Error::Error;
};

class CovarianceNotPdError : public Error {
 public:
  using Error::Error;
};

// Malformed user input (CSV cells, spec files). Mapped to exit code 1 by the CLI.
class InputError : public Error {
 public:
  using Error::Error;
};

// Raised when an iterate or objective stops being finite.
class SolverDivergenceError : public Error {
 public:
  SolverDivergenceError(const std::string& what, Eigen::VectorXd iterate)
      : Error(what), iterate_(std::move(iterate)) {}

  const Eigen::VectorXd& iterate() const noexcept { return iterate_; }

 private:
  Eigen::VectorXd iterate_;
};

}  // namespace mmdglm
