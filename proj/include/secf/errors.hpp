#pragma once

#include <stdexcept>
#include <string>

namespace secf {

/// Malformed input, invalid configuration or violated preconditions.
/// The CLI maps this family to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not produce a trustworthy answer.
/// The CLI maps this family to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorisation failed even after the jitter schedule was exhausted.
class ConditioningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The Vandermonde matrix (or P^T K0^{-1} P) is rank deficient on the sample.
class UnisolvencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace secf
