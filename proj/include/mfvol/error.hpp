#pragma once

#include <stdexcept>

namespace mfvol {

// Invalid parameters or options. Maps to the CLI usage exit code.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or out-of-contract input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate numerics: zero dispersion, vanishing moments, non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfvol
