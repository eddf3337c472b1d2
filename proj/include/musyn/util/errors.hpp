#pragma once

#include <stdexcept>
#include <string>

namespace musyn {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix/channel dimensions do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A simulated state exceeded the overflow guard: the interconnection is
/// unstable (or the requested operation was applied to an unstable loop).
class DivergedError : public Error {
 public:
  using Error::Error;
};

/// The requested attenuation level gamma is at or below what the current
/// configuration can achieve; the associated game is unbounded.
class GammaInfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Least-squares regression was rank deficient; the sampled data does not
/// excite all quadratic features.
class InsufficientExcitationError : public Error {
 public:
  using Error::Error;
};

/// An eigen/linear solver failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace musyn
