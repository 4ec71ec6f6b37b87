#pragma once

#include <stdexcept>
#include <string>

namespace rydsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes or subsystem structure do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Bad user input: unknown parameter names, invalid values, unwritable paths.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Propagation diverged, a state left the physical set, or a solver failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rydsim
