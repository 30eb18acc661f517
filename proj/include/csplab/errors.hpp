#pragma once

#include <stdexcept>
#include <string>

namespace csplab {

// Malformed input, violated preconditions, shape mismatches.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured enumeration/pass/node cap would be exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace csplab
