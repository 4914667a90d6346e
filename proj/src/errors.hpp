#pragma once

#include <stdexcept>
#include <string>

namespace mbpnpi {

// Invalid configuration / parameter values (caught at construction or parse).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside a function's mathematical domain.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature / root-finding / inversion failed to reach its tolerance.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation requested for a model in the wrong asymptotic regime.
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem / serialization failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mbpnpi
