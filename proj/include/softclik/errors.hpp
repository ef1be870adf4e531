#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace softclik {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An argument left its mathematical domain (s outside [0,1], dimension
/// mismatch, non-SPD gain, ...).
struct DomainError : Error {
  using Error::Error;
};

/// A binary file failed validation. `offset` is the byte position at which
/// the problem was detected.
struct FormatError : Error {
  std::size_t offset = 0;
  FormatError(const std::string& msg, std::size_t off)
      : Error(msg + " (at byte offset " + std::to_string(off) + ")"), offset(off) {}
};

/// The BVP shooting solver did not converge; carries the last residual norm.
struct SolverError : Error {
  double residual = 0.0;
  SolverError(const std::string& msg, double res)
      : Error(msg + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

/// An activation drove the intrinsic extension to zero or below.
struct NonphysicalActivation : Error {
  using Error::Error;
};

/// Bad configuration input (unknown key, unparsable value, invalid flag).
struct ConfigError : Error {
  using Error::Error;
};

/// A composed Jacobian became singular with damping disabled, or a CLIK step
/// produced non-finite values.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace softclik
