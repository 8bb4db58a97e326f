#pragma once

#include <stdexcept>
#include <string>

namespace sgne {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scenario or file input failed validation.
struct InputError : Error {
  using Error::Error;
};

/// Total demand lies outside the aggregate generation capacity.
struct InfeasibleError : Error {
  using Error::Error;
};

/// Dual bisection could not establish a sign-changing bracket.
struct NoBracketError : Error {
  using Error::Error;
};

struct DisconnectedGraphError : Error {
  using Error::Error;
};

struct NonSymmetricError : Error {
  using Error::Error;
};

struct NotPositiveDefiniteError : Error {
  using Error::Error;
};

struct MissingNeighborMessageError : Error {
  using Error::Error;
};

/// A point handed to the operator evaluation lies outside the generation box.
struct OutsideBoxError : Error {
  using Error::Error;
};

}  // namespace sgne
