#pragma once

#include <stdexcept>

namespace clc {

// Malformed arguments to a library operation (shape mismatch, non-finite
// values, labels out of range).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Experiment or trainer configuration that violates a documented constraint.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset files that cannot be read or do not follow the IDX layout.
struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Result files that cannot be written.
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace clc
