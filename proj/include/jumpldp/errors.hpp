#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jumpldp {

// Base of all library errors. Subfamilies map to CLI exit codes:
// ValidationError -> 1, ConvergenceError -> 2, IoError -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// -- model validation -------------------------------------------------------

struct RowSumError : ValidationError {
  using ValidationError::ValidationError;
};

struct IntensityError : ValidationError {
  using ValidationError::ValidationError;
};

struct ReducibleError : ValidationError {
  using ValidationError::ValidationError;
};

struct NotReversibleError : ValidationError {
  using ValidationError::ValidationError;
};

struct DimensionError : ValidationError {
  using ValidationError::ValidationError;
};

struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};

struct GridError : ValidationError {
  using ValidationError::ValidationError;
};

// Carries the entries (x, y) where the N-step kernel still vanishes.
struct NoMinorizationError : ValidationError {
  NoMinorizationError(const std::string& msg, std::vector<std::pair<int, int>> pattern)
      : ValidationError(msg), violating(std::move(pattern)) {}
  std::vector<std::pair<int, int>> violating;
};

// -- tilt / decomposition ----------------------------------------------------

struct MismatchError : ValidationError {
  using ValidationError::ValidationError;
};

struct DegenerateSupportError : ValidationError {
  using ValidationError::ValidationError;
};

// -- simulation --------------------------------------------------------------

struct SeedError : ValidationError {
  using ValidationError::ValidationError;
};

struct UnreachableError : ValidationError {
  using ValidationError::ValidationError;
};

struct JumpBudgetError : Error {
  using Error::Error;
};

// -- estimation --------------------------------------------------------------

struct DegenerateWeightError : ValidationError {
  using ValidationError::ValidationError;
};

struct EigenFailure : Error {
  using Error::Error;
};

// Optimizers attach their best iterate so callers can inspect how far they got.
struct NonConvergenceError : ConvergenceError {
  NonConvergenceError(const std::string& msg, std::vector<double> iterate, double resid)
      : ConvergenceError(msg), best(std::move(iterate)), residual(resid) {}
  std::vector<double> best;
  double residual = 0.0;
};

}  // namespace jumpldp
