#pragma once

#include <cmath>
#include <numbers>

namespace gclab {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wrap an angle into [-pi, pi).
inline double wrap_pi(double a) {
  double w = std::remainder(a, two_pi);
  if (w >= pi) w -= two_pi;
  return w;
}

inline double deg_to_rad(double d) { return d * pi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / pi; }

/// Smallest signed difference a - b on the circle, in [-pi, pi).
inline double wrapped_diff(double a, double b) { return wrap_pi(a - b); }

}  // namespace gclab
