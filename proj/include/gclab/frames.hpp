#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "gclab/angles.hpp"
#include "gclab/errors.hpp"

namespace gclab {

// Conventions: navigation frame is north-east-down, body frame is
// forward-right-down. Longitude is irrelevant to heading observability and
// is fixed to zero throughout; only latitude enters the earth-rate
// projection.

/// Orientation triad (roll, pitch, yaw), radians.
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Body-axis angular rates (p, q, r), rad/s.
struct BodyRates {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
};

/// Site latitude and earth rotation rate.
struct GeoConfig {
  double latitude = 0.0;                 // rad, |lat| < pi/2
  double earth_rate = 7.292115e-5;       // rad/s (WGS-84)

  void validate() const {
    if (!(std::abs(latitude) < pi / 2.0)) throw config_error("geo: |latitude| must be < pi/2");
    if (!(earth_rate > 0.0)) throw config_error("geo: earth_rate must be positive");
  }
};

/// Direction cosine matrix body -> navigation for the roll/pitch/yaw triad.
inline Eigen::Matrix3d rotation_body_to_nav(const EulerAngles& a) {
  const double cphi = std::cos(a.roll), sphi = std::sin(a.roll);
  const double cth = std::cos(a.pitch), sth = std::sin(a.pitch);
  const double cpsi = std::cos(a.yaw), spsi = std::sin(a.yaw);
  Eigen::Matrix3d m;
  m << cth * cpsi, sphi * sth * cpsi - cphi * spsi, cphi * sth * cpsi + sphi * spsi,
       cth * spsi, sphi * sth * spsi + cphi * cpsi, cphi * sth * spsi - sphi * cpsi,
       -sth,       sphi * cth,                      cphi * cth;
  return m;
}

/// Navigation -> body rotation; transpose of the body->nav matrix.
inline Eigen::Matrix3d rotation_body_from_nav(const EulerAngles& a) {
  return rotation_body_to_nav(a).transpose();
}

/// Earth rotation rate expressed in the navigation (NED) frame, using the
/// standard latitude projection (O*cos(lat), 0, -O*sin(lat)).
inline Eigen::Vector3d earth_rate_nav(const GeoConfig& geo) {
  return {geo.earth_rate * std::cos(geo.latitude), 0.0, -geo.earth_rate * std::sin(geo.latitude)};
}

/// Earth rotation rate projected onto the body axes for a given attitude.
inline BodyRates earth_rate_body(const GeoConfig& geo, const EulerAngles& attitude) {
  const Eigen::Vector3d wb = rotation_body_from_nav(attitude) * earth_rate_nav(geo);
  return {wb.x(), wb.y(), wb.z()};
}

namespace detail {
inline constexpr double kGyrocompassDegenerate = 1e-15;
}

/// Heading from body rates with known roll and pitch. The rates are assumed
/// to contain (a possibly noisy) earth-rate projection only.
inline double gyrocompass_full(const BodyRates& w, double roll, double pitch) {
  const double cphi = std::cos(roll), sphi = std::sin(roll);
  const double cth = std::cos(pitch), sth = std::sin(pitch);
  const double s_psi = -w.q * cphi + w.r * sphi;
  const double c_psi = w.p * cth + w.q * sphi * sth + w.r * cphi * sth;
  if (std::abs(s_psi) < detail::kGyrocompassDegenerate &&
      std::abs(c_psi) < detail::kGyrocompassDegenerate) {
    throw unobservable_error("gyrocompass: both arctangent arguments vanish");
  }
  return wrap_pi(std::atan2(s_psi, c_psi));
}

/// Heading for a leveled platform: atan2(-q, p). Uses only the horizontal
/// gyro pair, so any constant added to r leaves the estimate unchanged.
inline double gyrocompass_leveled(const BodyRates& w) {
  if (std::abs(w.q) < detail::kGyrocompassDegenerate &&
      std::abs(w.p) < detail::kGyrocompassDegenerate) {
    throw unobservable_error("gyrocompass: both arctangent arguments vanish");
  }
  return wrap_pi(std::atan2(-w.q, w.p));
}

namespace detail {
inline constexpr double kGimbalMargin = 1e-6;
}

/// Mapping of body-axis rates to Euler-angle rates. Singular at pitch +-pi/2.
inline Eigen::Matrix3d euler_rate_matrix(const EulerAngles& a) {
  if (!(std::abs(a.pitch) < pi / 2.0 - detail::kGimbalMargin)) {
    throw singularity_error("euler_rate_matrix: pitch within 1e-6 of +-pi/2");
  }
  const double cphi = std::cos(a.roll), sphi = std::sin(a.roll);
  const double cth = std::cos(a.pitch), tth = std::tan(a.pitch);
  Eigen::Matrix3d m;
  m << 1.0, sphi * tth, cphi * tth,
       0.0, cphi,       -sphi,
       0.0, sphi / cth, cphi / cth;
  return m;
}

}  // namespace gclab
