#pragma once

#include <stdexcept>
#include <string>

namespace rcd {

/// Raised when arguments violate an operation's preconditions (dimension
/// mismatch, out-of-range sizes, malformed ensembles, exceeded caps).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a numeric routine fails: eigensolver non-convergence,
/// non-Hermitian residue, iteration caps, internal consistency checks.
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rcd
