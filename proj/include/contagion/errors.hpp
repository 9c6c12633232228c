#pragma once

#include <stdexcept>
#include <string>

namespace contagion {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data or violated calibration invariants (CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line and column of the offence.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, int line, int column, const std::string& reason)
      : ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                        ": " + reason),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Exposure matrix has a nonzero diagonal entry.
class NonHollow : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A bank's interbank liabilities meet or exceed its total value.
class ColumnOverflow : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Calibration produced a non-positive capital ratio.
class Insolvent : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// No hollow-diagonal matrix can satisfy the requested marginals.
class InfeasibleMarginals : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Greedy reconstruction could not complete under the hollow-diagonal constraint.
class Infeasible : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical failure: singular systems, stalled iterations (CLI exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public NumericError {
 public:
  using NumericError::NumericError;
};

class NotConverged : public NumericError {
 public:
  NotConverged(const std::string& what, double residual)
      : NumericError(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Filesystem-level failure (CLI exit code 4).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace contagion
