#pragma once

#include <stdexcept>
#include <string>

namespace embedprobe {

// Base class for every failure raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or missing input files and config entries.
class InputError : public Error {
 public:
  using Error::Error;
};

// Arguments that violate an operation's preconditions.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace embedprobe
