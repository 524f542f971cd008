#pragma once

#include <stdexcept>
#include <string>

namespace epsflow {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the documented domain of an operation.
class InputDomainError : public Error {
 public:
  using Error::Error;
};

// Bulk potential has no usable vacuum manifold for the given parameters.
class DegenerateManifoldError : public Error {
 public:
  using Error::Error;
};

// Nearest-point projection onto N is not single valued at this point.
class ProjectionUndefinedError : public Error {
 public:
  using Error::Error;
};

// Geodesic between the two endpoints is not unique.
class NonuniqueGeodesicError : public Error {
 public:
  using Error::Error;
};

// Ball/half-ball leaves the grid, or a radius is unresolvable.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Two fields that must share a grid do not.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

// A smallness precondition of a constructive lemma fails on the given data.
class SmallnessViolationError : public Error {
 public:
  using Error::Error;
};

// A constructive step (projection, geodesic) failed on a specific sample.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Line search could not make progress; carries the state at the failure.
class StagnationError : public Error {
 public:
  StagnationError(const std::string& msg, int iter, double energy, double residual)
      : Error(msg), iter(iter), energy(energy), residual(residual) {}
  int iter;
  double energy;
  double residual;
};

// Not enough valid data points for a fit or a report.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Configuration file problems (parse or schema).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace epsflow
