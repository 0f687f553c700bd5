#pragma once

#include <stdexcept>
#include <string>

namespace kanlm {

/// Caller-side contract violation: bad arguments, malformed files,
/// mismatched dimensions. Maps to CLI exit code 2.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: rank-deficient solves, non-finite losses.
/// Maps to CLI exit code 1.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pruning left a network output with no incoming edges, or emptied a layer.
class StructuralFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expression evaluated outside a candidate's domain (log of a
/// non-positive value, division by zero). The message names the node.
class EvalDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kanlm
