#pragma once

#include <stdexcept>
#include <string>

namespace infoval {

// Invalid inputs raise std::invalid_argument. The types below cover the
// failure classes callers usually want to tell apart.

/// A variance estimate collapsed to zero (constant data, identical series).
class DegenerateVarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A test was asked to run on fewer observations than it needs.
class InsufficientSampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unusable input data (CSV parsing, date alignment).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace infoval
