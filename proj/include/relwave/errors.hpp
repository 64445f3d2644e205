#pragma once

#include <stdexcept>
#include <string>

namespace relwave {

/// Argument outside the mathematical domain of an operation (|t| > 1, ε too large, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data violating a stated precondition (non-uniform grid, broken boundary condition, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative method failed to converge or to factorize.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Min-max ordering between sandwich forms violated.
class OrderingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace relwave
