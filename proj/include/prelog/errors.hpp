#pragma once

#include <stdexcept>

namespace prelog {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A factorization or embedding failed where theory says it should not.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The requested model cannot be used for this operation (e.g. simulating a
/// Gaussian process whose spectrum has point masses).
struct UnsupportedModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Sample set with atoms; its differential entropy is -infinity.
struct DegenerateSampleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace prelog
