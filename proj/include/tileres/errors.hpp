#pragma once

#include <stdexcept>
#include <string>

namespace tileres {

// Base for all errors thrown by the library. Verification *failures* are not
// exceptions; they are reported as findings. Exceptions are reserved for
// contract violations: bad inputs, unsatisfiable preconditions, guard limits.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: dimension mismatch, coordinate outside [0,1], bad rational
// literal, inverted interval, etc.
struct InvalidArgument : Error {
  using Error::Error;
};

// A cover does not reach every face it must; carries a witness description.
struct CoverError : Error {
  std::string witness_face;
  CoverError(const std::string& msg, std::string face)
      : Error(msg), witness_face(std::move(face)) {}
};

// A fresh index set intersects indices already spent.
struct IndexCollision : Error {
  using Error::Error;
};

// The finite base ran out of usable elements; names the starving tile.
struct BaseExhausted : Error {
  std::string tile;
  BaseExhausted(const std::string& msg, std::string tile_desc)
      : Error(msg), tile(std::move(tile_desc)) {}
};

// A hard guard was exceeded (generator count, depth, dimension).
struct GuardExceeded : Error {
  using Error::Error;
};

}  // namespace tileres
