#pragma once

#include <stdexcept>
#include <string>

namespace stitforest {

// All library failures derive from Error so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Polytope has no interior point at the working tolerance.
struct InfeasiblePolytope : Error {
  using Error::Error;
};

// Support function queried along a recession direction.
struct UnboundedObjective : Error {
  using Error::Error;
};

// Zonotope generators do not span the ambient space.
struct DegenerateZonotope : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

// Total split rate of a cell fell below the representable floor.
struct RateUnderflow : Error {
  using Error::Error;
};

// Directional distribution cannot be sampled (isotropic placeholder).
struct UnsupportedDistribution : Error {
  using Error::Error;
};

// Query point lies outside the tessellated window.
struct OutOfWindow : Error {
  using Error::Error;
};

// Feature matrix columns do not span the ambient space.
struct RankDeficient : Error {
  using Error::Error;
};

// Bound evaluator requires a (2,1)-normalized feature matrix.
struct NotNormalized : Error {
  using Error::Error;
};

struct InvalidTarget : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct SchemaVersionMismatch : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace stitforest
