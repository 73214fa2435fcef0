#pragma once

#include <stdexcept>
#include <string>

namespace thermoform {

// Base class for every failure the library reports deliberately.
// Anything else escaping is a bug.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotExpanding : Error {
  using Error::Error;
};

struct NewtonDivergence : Error {
  using Error::Error;
};

struct TooManyPoints : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NotPositive : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

struct DegenerateVariance : Error {
  using Error::Error;
};

struct NotStrictlyConvex : Error {
  using Error::Error;
};

struct SOutOfRange : Error {
  using Error::Error;
};

struct CoboundaryObservable : Error {
  using Error::Error;
};

struct FamilyNotExpanding : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace thermoform
