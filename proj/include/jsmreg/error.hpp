#pragma once

#include <stdexcept>
#include <string>

namespace jsmreg {

// Input that violates an operation's precondition (bad sizes, out-of-range
// parameters, malformed files).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File system or codec failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jsmreg
