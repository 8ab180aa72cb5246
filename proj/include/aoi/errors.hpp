#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

/// Invalid user input: bad configuration values, malformed files, unknown keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-convergence, non-finite values, or a size guard that a computation hit.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The instance is too large for the requested exact computation.
class CapacityError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace aoi
