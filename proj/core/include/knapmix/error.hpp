#pragma once

#include <stdexcept>
#include <string>

namespace knapmix {

// Malformed input: dimension mismatch, bad field, out-of-domain argument.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured size cap (enumeration, matrix) was exceeded.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A caller-side precondition failed (e.g. an infeasible solution was passed).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An internal invariant was violated. Seeing one means a bug, or a
// counterexample to a property the construction relies on.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The randomized estimator detected a sampler failure.
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace knapmix
