#pragma once

#include <stdexcept>
#include <string>

namespace pbessel {

// Numeric failure that the caller may want to catch and handle: requested
// accuracy could not be certified.
class AccuracyError : public std::runtime_error {
public:
  explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

// Eigenvalue harvest could not be certified index-complete.  Carries the
// index range that could not be bridged.
class CompletenessError : public std::runtime_error {
public:
  CompletenessError(const std::string& what, int index_lo, int index_hi)
      : std::runtime_error(what), index_lo(index_lo), index_hi(index_hi) {}
  int index_lo;
  int index_hi;
};

// Quadrature failed to converge on a class-norm integral.
class UnboundedNormError : public AccuracyError {
public:
  explicit UnboundedNormError(const std::string& what) : AccuracyError(what) {}
};

// A lambda passed to an eigenpair operation is not an eigenvalue of the
// stated problem (multiplier ratio test failed).
class NotAnEigenvalueError : public std::runtime_error {
public:
  explicit NotAnEigenvalueError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace pbessel
