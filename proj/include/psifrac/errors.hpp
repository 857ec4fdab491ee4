#pragma once

#include <stdexcept>
#include <string>

namespace psifrac {

// Base class for everything this library throws on purpose. The CLI maps
// ConfigError to exit code 2 and the remaining kinds to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation point outside the coordinate map's domain [a, b].
class DomainError : public Error {
 public:
  using Error::Error;
};

// Coordinate map fails validation: non-finite values, non-monotone,
// or a singular slope where a pointwise slope is actually required.
class InvalidMapError : public Error {
 public:
  using Error::Error;
};

// Grid construction or grid compatibility failure (mismatched grids,
// too few nodes for the finite-difference stencils).
class GridError : public Error {
 public:
  using Error::Error;
};

// A function that must vanish at the interval ends does not.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

// Invalid scalar parameter (exponent, order, tolerance, ...).
class ParamError : public Error {
 public:
  using Error::Error;
};

// Degenerate input where a quotient or normalization is undefined
// (identically zero function passed to a Rayleigh quotient, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Numerical failure at run time: NaN/inf appearing mid-iteration,
// quadrature refinement not converging, singular linear solve.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Bad key/value in a run configuration file or an inconsistent
// combination of configured values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace psifrac
