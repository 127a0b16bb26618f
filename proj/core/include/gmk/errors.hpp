#pragma once

#include <stdexcept>
#include <string>

namespace gmk {

// Bad arguments: dimension or degree mismatch, violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input text that does not parse into the expected structure.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested size exceeds a documented bound (depth, grid size, n).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A construction that cannot proceed at the current resolution.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gmk
