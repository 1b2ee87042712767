#pragma once

#include <stdexcept>
#include <string>

namespace entfate {

// Invalid argument with respect to an operation's domain (bad site label,
// dimension mismatch, rank-deficient ball center, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Eigensolver failure or a non-finite objective.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A checked precondition on intermediate data did not hold
// (e.g. a non-monotone threshold scan).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A root was requested in a range that does not bracket it.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace entfate
