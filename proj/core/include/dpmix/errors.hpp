#pragma once

#include <stdexcept>
#include <string>

namespace dpmix {

/// Invalid distribution or model parameters (shape <= 0, non-SPD matrix, ...).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Bad configuration: unknown kernel, iterations < 1, missing seed, malformed grid.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Data outside the kernel support, missing files, non-numeric cells.
class DataDomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operation not defined for this kernel class (e.g. predictive on a
/// non-conjugate kernel).
class UnsupportedOperationError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Retained history too short for the requested burnin/thinning.
class InsufficientSamplesError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace dpmix
