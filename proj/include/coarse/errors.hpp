#pragma once

#include <stdexcept>
#include <string>

namespace coarse {

// Base of everything the library throws on a violated contract.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A vertex token that is not in the family's canonical form.
struct EncodingError : Error {
  using Error::Error;
};

// A ball would exceed the vertex budget. Carries the last radius that fit.
struct ResourceError : Error {
  ResourceError(const std::string& what, int attained_radius)
      : Error(what), attained_radius(attained_radius) {}
  int attained_radius;
};

struct OutOfBallError : Error {
  using Error::Error;
};

struct NoPathError : Error {
  using Error::Error;
};

// Input does not satisfy an operation's precondition (margins, hypotheses,
// malformed families...).
struct PreconditionError : Error {
  using Error::Error;
};

struct UnsupportedError : Error {
  using Error::Error;
};

}  // namespace coarse
