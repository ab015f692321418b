#pragma once

#include <stdexcept>
#include <string>

namespace panotrack {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (bad files, schema violations, out-of-range points).
struct InputError : Error {
  using Error::Error;
};

struct DomainError : InputError {
  using InputError::InputError;
};

// The ankle ray points at or above the horizon, so it never meets the ground.
struct AboveHorizonError : DomainError {
  using DomainError::DomainError;
};

// World point on the camera's vertical axis; azimuth undefined.
struct SingularPointError : DomainError {
  using DomainError::DomainError;
};

struct ConfigError : InputError {
  using InputError::InputError;
};

struct DegenerateSkeletonError : InputError {
  using InputError::InputError;
};

struct NoTargetError : Error {
  using Error::Error;
};

struct UndefinedMetricError : Error {
  using Error::Error;
};

// Covariance could not be repaired into SPD form.
struct FilterDivergenceError : Error {
  using Error::Error;
};

}  // namespace panotrack
