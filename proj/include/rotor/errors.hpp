#pragma once

#include <stdexcept>

namespace rotor {

/// Invalid quantum numbers, out-of-range arguments, malformed physical inputs.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A basis, grid or channel cutoff was too small for the requested dynamics.
/// Callers are expected to rebuild with larger truncation parameters.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver breakdown (zero pivot, norm drift beyond guard, flat search window).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rotor
