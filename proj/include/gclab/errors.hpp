#pragma once

#include <stdexcept>
#include <string>

namespace gclab {

/// Base class for all gclab errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value or section.
struct config_error : error {
  using error::error;
};

/// Mismatched lengths, sample rates, or tensor shapes.
struct shape_error : error {
  using error::error;
};

/// Input series too short for the requested operation.
struct input_error : error {
  using error::error;
};

/// Euler-rate mapping evaluated at or near gimbal lock.
struct singularity_error : error {
  using error::error;
};

/// Both gyrocompassing arctangent arguments vanish; heading unobservable.
struct unobservable_error : error {
  using error::error;
};

/// Vehicle restoring moment non-positive on a restored axis.
struct stability_error : error {
  using error::error;
};

/// Damping regime outside the supported closed forms.
struct unsupported_regime_error : error {
  using error::error;
};

/// Checkpoint or artifact failed its integrity check.
struct integrity_error : error {
  using error::error;
};

/// Training diverged (non-finite loss).
struct training_error : error {
  using error::error;
};

}  // namespace gclab
