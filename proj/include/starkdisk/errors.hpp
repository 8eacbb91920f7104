#pragma once

#include <stdexcept>

namespace starkdisk {

/// A diagonalization failed or the generalized problem is degenerate. The
/// message carries the diagnostics.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative root search left its bracket.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A root search was handed an interval without a sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace starkdisk
