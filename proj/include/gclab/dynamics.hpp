#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "gclab/errors.hpp"
#include "gclab/series.hpp"

namespace gclab {

enum class Axis : int { roll = 0, pitch = 1, yaw = 2 };

enum class DisturbanceMode : int { impulse = 0, step = 1, sinusoid = 2 };

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::roll: return "roll";
    case Axis::pitch: return "pitch";
    default: return "yaw";
  }
}

inline const char* mode_name(DisturbanceMode m) {
  switch (m) {
    case DisturbanceMode::impulse: return "impulse";
    case DisturbanceMode::step: return "step";
    default: return "sinusoid";
  }
}

/// Hovering-vehicle mass, geometry, and hydrodynamic coefficients. The hull
/// is modeled as a solid cylinder with its symmetry axis along body-x; the
/// center of gravity sits below the body origin (z_gravity < 0) and the
/// center of buoyancy above it, which is what restores roll and pitch.
struct VehicleParams {
  double mass = 50.0;        // kg
  double radius = 0.15;      // m
  double length = 1.5;       // m
  double z_gravity = -0.05;  // m, negative = below origin
  double z_buoyancy = 0.05;  // m, positive = above origin
  double weight = 490.5;     // N
  double buoyancy = 490.5;   // N
  Eigen::Vector3d damping = Eigen::Vector3d::Zero();  // N*m*s/rad, diagonal

  void validate() const {
    if (!(mass > 0.0 && radius > 0.0 && length > 0.0))
      throw config_error("vehicle: mass, radius, length must be positive");
    if (damping.minCoeff() < 0.0) throw config_error("vehicle: negative damping");
    const double rel = std::abs(weight - buoyancy) / std::max(weight, buoyancy);
    if (!(rel <= 0.05)) throw config_error("vehicle: weight/buoyancy trim off by more than 5%");
    if (!(z_gravity < z_buoyancy))
      throw config_error("vehicle: center of gravity must sit below center of buoyancy");
  }
};

/// Per-axis coefficients of the reduced rotational model
///   inertia * angle'' + damping * angle' + restoring * angle = torque(t).
/// Yaw has zero restoring moment and therefore no natural frequency; it is
/// flagged non-oscillatory and responds as a damped integrator.
struct DynamicsDerived {
  Eigen::Vector3d inertia = Eigen::Vector3d::Zero();            // kg*m^2
  Eigen::Vector3d restoring = Eigen::Vector3d::Zero();          // N*m/rad
  Eigen::Vector3d damping = Eigen::Vector3d::Zero();            // N*m*s/rad
  Eigen::Vector3d natural_frequency = Eigen::Vector3d::Zero();  // rad/s
  Eigen::Vector3d damping_ratio = Eigen::Vector3d::Zero();

  bool oscillatory(Axis a) const { return restoring(static_cast<int>(a)) > 0.0; }

  static DynamicsDerived from_coefficients(double inertia_c, double damping_c,
                                           double restoring_c, Axis axis = Axis::roll) {
    DynamicsDerived d;
    const int i = static_cast<int>(axis);
    d.inertia.setConstant(inertia_c);
    d.damping.setConstant(damping_c);
    d.restoring.setZero();
    d.restoring(i) = restoring_c;
    if (restoring_c > 0.0) {
      d.natural_frequency(i) = std::sqrt(restoring_c / inertia_c);
      d.damping_ratio(i) = damping_c / (2.0 * std::sqrt(restoring_c * inertia_c));
    }
    return d;
  }
};

/// One single-axis forcing term.
struct DisturbanceSpec {
  DisturbanceMode mode = DisturbanceMode::step;
  Axis axis = Axis::roll;
  double amplitude = 0.0;  // N*m (impulse: N*m*s)
  double frequency = 0.0;  // rad/s, sinusoid only
  double phase = 0.0;      // rad, sinusoid only
  double onset = 0.0;      // s

  void validate() const {
    if (!(amplitude >= 0.0)) throw config_error("disturbance: amplitude must be >= 0");
    if (mode == DisturbanceMode::sinusoid && !(frequency > 0.0))
      throw config_error("disturbance: sinusoid frequency must be positive");
    if (!(onset >= 0.0)) throw config_error("disturbance: onset must be >= 0");
  }
};

/// Sampled single-axis angle/rate trajectory.
struct Response {
  Axis axis = Axis::roll;
  double sample_rate = 0.0;
  std::vector<double> angle;  // rad
  std::vector<double> rate;   // rad/s
  double max_abs_angle = 0.0;

  /// The linearized model assumes small angles; callers may warn past this.
  bool small_angle_exceeded(double limit = 0.3) const { return max_abs_angle > limit; }
};

/// Embed a single-axis response into a 3-axis rate series (other axes zero).
inline RateSeries to_rate_series(const Response& resp) {
  RateSeries s = RateSeries::zeros(resp.sample_rate, resp.rate.size());
  std::vector<double>* dst = nullptr;
  switch (resp.axis) {
    case Axis::roll: dst = &s.p; break;
    case Axis::pitch: dst = &s.q; break;
    case Axis::yaw: dst = &s.r; break;
  }
  *dst = resp.rate;
  return s;
}

/// Derive the per-axis ODE coefficients from vehicle mass and geometry.
inline DynamicsDerived derive_dynamics(const VehicleParams& v) {
  v.validate();
  DynamicsDerived d;
  const double r2 = v.radius * v.radius;
  const double transverse = v.mass * (3.0 * r2 + v.length * v.length) / 12.0;
  d.inertia = {0.5 * v.mass * r2, transverse, transverse};
  const double g_rp = v.z_buoyancy * v.buoyancy - v.z_gravity * v.weight;
  if (!(g_rp > 0.0))
    throw stability_error("dynamics: non-positive restoring moment (top-heavy trim)");
  d.restoring = {g_rp, g_rp, 0.0};
  d.damping = v.damping;
  for (int i = 0; i < 2; ++i) {
    d.natural_frequency(i) = std::sqrt(d.restoring(i) / d.inertia(i));
    d.damping_ratio(i) = d.damping(i) / (2.0 * std::sqrt(d.restoring(i) * d.inertia(i)));
  }
  return d;
}

/// Default illustrative vehicle: 50 kg neutrally buoyant cylinder, bottom
/// heavy by 5 cm each way, damping set for a damping ratio of 0.2 on the
/// restored axes (yaw reuses the pitch coefficient).
inline VehicleParams default_vehicle() {
  VehicleParams v;
  const double g_rp = v.z_buoyancy * v.buoyancy - v.z_gravity * v.weight;
  const double i_roll = 0.5 * v.mass * v.radius * v.radius;
  const double i_pitch = v.mass * (3.0 * v.radius * v.radius + v.length * v.length) / 12.0;
  const double zeta = 0.2;
  v.damping = {2.0 * zeta * std::sqrt(g_rp * i_roll), 2.0 * zeta * std::sqrt(g_rp * i_pitch),
               2.0 * zeta * std::sqrt(g_rp * i_pitch)};
  return v;
}

/// Torque-to-inertia ratio of a disturbance on its excited axis.
inline double torque_to_inertia(const DisturbanceSpec& spec, const DynamicsDerived& d) {
  return spec.amplitude / d.inertia(static_cast<int>(spec.axis));
}

/// Complex orientational gain at angular frequency omega:
/// 1 / (restoring - inertia*omega^2 + j*damping*omega), i.e. the standard
/// second-order form (1/I) / ((w0^2 - w^2) + j*2*zeta*w0*w) on restored axes.
inline std::complex<double> frequency_response(const DynamicsDerived& d, Axis axis,
                                               double omega) {
  if (!(omega >= 0.0)) throw config_error("frequency_response: omega must be >= 0");
  const int i = static_cast<int>(axis);
  const std::complex<double> den(d.restoring(i) - d.inertia(i) * omega * omega,
                                 d.damping(i) * omega);
  if (den == std::complex<double>(0.0, 0.0))
    return {std::numeric_limits<double>::infinity(), 0.0};
  return 1.0 / den;
}

namespace detail {

struct AxisCoeffs {
  double inertia, damping, restoring;
  double w0 = 0.0, zeta = 0.0, alpha = 0.0, wd = 0.0;  // restored axes
  double beta = 0.0;                                   // yaw decay rate
  bool restored = false;
};

inline AxisCoeffs axis_coeffs(const DynamicsDerived& d, Axis axis) {
  const int i = static_cast<int>(axis);
  AxisCoeffs c{d.inertia(i), d.damping(i), d.restoring(i)};
  if (!(c.inertia > 0.0)) throw config_error("dynamics: non-positive inertia");
  c.restored = c.restoring > 0.0;
  if (c.restored) {
    c.w0 = std::sqrt(c.restoring / c.inertia);
    c.zeta = c.damping / (2.0 * std::sqrt(c.restoring * c.inertia));
    if (c.zeta >= 1.0)
      throw unsupported_regime_error(
          "dynamics: damping ratio >= 1; only the underdamped closed form is supported");
    c.alpha = c.zeta * c.w0;
    c.wd = c.w0 * std::sqrt(1.0 - c.zeta * c.zeta);
  } else {
    c.beta = c.damping / c.inertia;
  }
  return c;
}

/// Unit-amplitude angle/rate at elapsed time t >= 0 after onset. Amplitude
/// is factored out so scaling a forcing scales the response exactly.
inline void unit_response(const AxisCoeffs& c, DisturbanceMode mode, double frequency,
                          double phase, double t, double& y, double& v) {
  if (c.restored) {
    const double e = std::exp(-c.alpha * t);
    const double swd = std::sin(c.wd * t), cwd = std::cos(c.wd * t);
    switch (mode) {
      case DisturbanceMode::impulse: {
        const double k = 1.0 / (c.inertia * c.wd);
        y = k * e * swd;
        v = k * e * (c.wd * cwd - c.alpha * swd);
        return;
      }
      case DisturbanceMode::step: {
        const double k = 1.0 / c.restoring;
        const double sphi0 = std::sqrt(1.0 - c.zeta * c.zeta);  // sin(acos(zeta))
        const double phi0 = std::acos(c.zeta);
        y = k * (1.0 - e * std::sin(c.wd * t + phi0) / sphi0);
        v = k * e * c.w0 * swd / sphi0;
        return;
      }
      case DisturbanceMode::sinusoid: {
        const std::complex<double> j(0.0, 1.0);
        const std::complex<double> den(c.restoring - c.inertia * frequency * frequency,
                                       c.damping * frequency);
        const std::complex<double> p = std::exp(j * phase) / den;  // unit-amplitude phasor
        const double re_jwp = -frequency * p.imag();               // Re(j*w*P)
        const double c1 = -p.real();
        const double c2 = (c.alpha * c1 - re_jwp) / c.wd;
        const double arg = frequency * t + std::arg(p);
        const double yp = std::abs(p) * std::cos(arg);
        const double vp = -frequency * std::abs(p) * std::sin(arg);
        y = yp + e * (c1 * cwd + c2 * swd);
        v = vp + e * ((c.wd * c2 - c.alpha * c1) * cwd - (c.wd * c1 + c.alpha * c2) * swd);
        return;
      }
    }
    return;
  }
  // Unrestored axis: damped integrator (yaw). An impulse drifts the angle to
  // a constant offset; a step makes it ramp away.
  const double inv_i = 1.0 / c.inertia;
  if (c.damping > 0.0) {
    const double em1 = -std::expm1(-c.beta * t);  // 1 - exp(-beta t)
    switch (mode) {
      case DisturbanceMode::impulse:
        y = inv_i * em1 / c.beta;
        v = inv_i * std::exp(-c.beta * t);
        return;
      case DisturbanceMode::step:
        y = (t - em1 / c.beta) / c.damping;
        v = em1 / c.damping;
        return;
      case DisturbanceMode::sinusoid: {
        const std::complex<double> j(0.0, 1.0);
        const std::complex<double> den(-c.inertia * frequency * frequency,
                                       c.damping * frequency);
        const std::complex<double> p = std::exp(j * phase) / den;
        const double re_jwp = -frequency * p.imag();
        const double c2 = re_jwp / c.beta;
        const double c1 = -p.real() - c2;
        const double arg = frequency * t + std::arg(p);
        const double yp = std::abs(p) * std::cos(arg);
        const double vp = -frequency * std::abs(p) * std::sin(arg);
        y = yp + c1 + c2 * std::exp(-c.beta * t);
        v = vp - c.beta * c2 * std::exp(-c.beta * t);
        return;
      }
    }
    return;
  }
  // Undamped, unrestored: pure double integrator.
  switch (mode) {
    case DisturbanceMode::impulse:
      y = inv_i * t;
      v = inv_i;
      return;
    case DisturbanceMode::step:
      y = 0.5 * inv_i * t * t;
      v = inv_i * t;
      return;
    case DisturbanceMode::sinusoid: {
      const std::complex<double> j(0.0, 1.0);
      const std::complex<double> p =
          std::exp(j * phase) / (-c.inertia * frequency * frequency);
      const double arg = frequency * t + std::arg(p);
      const double yp = std::abs(p) * std::cos(arg);
      const double vp = -frequency * std::abs(p) * std::sin(arg);
      const double c1 = -p.real();
      const double c2 = frequency * p.imag();  // -Re(j w P)
      y = yp + c1 + c2 * t;
      v = vp + c2;
      return;
    }
  }
}

inline std::size_t sample_count(double duration, double fs) {
  if (!(fs > 0.0) || !(duration * fs >= 1.0))
    throw config_error("dynamics: need duration*sample_rate >= 1");
  return static_cast<std::size_t>(std::llround(duration * fs));
}

}  // namespace detail

/// Closed-form response to a single forcing term, zero initial conditions,
/// sampled at t = k/fs. The onset is snapped to the sample grid so the
/// analytic and numeric paths describe the same forcing.
inline Response respond_analytic(const DynamicsDerived& derived, const DisturbanceSpec& spec,
                                 double duration, double sample_rate) {
  spec.validate();
  const std::size_t n = detail::sample_count(duration, sample_rate);
  const auto c = detail::axis_coeffs(derived, spec.axis);
  Response out;
  out.axis = spec.axis;
  out.sample_rate = sample_rate;
  out.angle.assign(n, 0.0);
  out.rate.assign(n, 0.0);
  if (spec.amplitude == 0.0) return out;
  const auto onset_idx = static_cast<std::size_t>(std::llround(spec.onset * sample_rate));
  for (std::size_t i = onset_idx; i < n; ++i) {
    const double t = static_cast<double>(i - onset_idx) / sample_rate;
    double y = 0.0, v = 0.0;
    detail::unit_response(c, spec.mode, spec.frequency, spec.phase, t, y, v);
    out.angle[i] = spec.amplitude * y;
    out.rate[i] = spec.amplitude * v;
    out.max_abs_angle = std::max(out.max_abs_angle, std::abs(out.angle[i]));
  }
  return out;
}

/// Fixed-step RK4 integration of the same linear model; serves as the
/// independent oracle for the closed forms. Substeps are at least 10 per
/// output sample and refined so that (fastest rate)*(substep) <= 0.01.
/// The impulse is realized as an exact rate increment amplitude/inertia at
/// onset, the zero-width limit of a matching-integral pulse.
inline Response respond_numeric(const DynamicsDerived& derived, const DisturbanceSpec& spec,
                                double duration, double sample_rate) {
  spec.validate();
  const std::size_t n = detail::sample_count(duration, sample_rate);
  const auto c = detail::axis_coeffs(derived, spec.axis);
  Response out;
  out.axis = spec.axis;
  out.sample_rate = sample_rate;
  out.angle.assign(n, 0.0);
  out.rate.assign(n, 0.0);
  if (spec.amplitude == 0.0) return out;
  const auto onset_idx = static_cast<std::size_t>(std::llround(spec.onset * sample_rate));
  if (onset_idx >= n) return out;

  double rate_scale = 0.0;
  if (c.restored) rate_scale = c.w0;
  if (c.beta > 0.0) rate_scale = std::max(rate_scale, c.beta);
  if (spec.mode == DisturbanceMode::sinusoid) rate_scale = std::max(rate_scale, spec.frequency);
  const double dt_out = 1.0 / sample_rate;
  auto n_sub = static_cast<std::size_t>(std::max(10.0, std::ceil(dt_out * rate_scale / 0.01)));
  const double h = dt_out / static_cast<double>(n_sub);

  const double amp = spec.amplitude;
  auto torque = [&](double t_rel) -> double {
    switch (spec.mode) {
      case DisturbanceMode::step: return amp;
      case DisturbanceMode::sinusoid: return amp * std::cos(spec.frequency * t_rel + spec.phase);
      default: return 0.0;  // impulse enters through the initial condition
    }
  };
  auto accel = [&](double t_rel, double y, double v) -> double {
    return (torque(t_rel) - c.damping * v - c.restoring * y) / c.inertia;
  };

  double y = 0.0;
  double v = (spec.mode == DisturbanceMode::impulse) ? amp / c.inertia : 0.0;
  for (std::size_t i = onset_idx; i < n; ++i) {
    out.angle[i] = y;
    out.rate[i] = v;
    out.max_abs_angle = std::max(out.max_abs_angle, std::abs(y));
    if (i + 1 == n) break;
    double t = static_cast<double>(i - onset_idx) * dt_out;
    for (std::size_t s = 0; s < n_sub; ++s) {
      const double k1y = v, k1v = accel(t, y, v);
      const double k2y = v + 0.5 * h * k1v, k2v = accel(t + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v);
      const double k3y = v + 0.5 * h * k2v, k3v = accel(t + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v);
      const double k4y = v + h * k3v, k4v = accel(t + h, y + h * k3y, v + h * k3v);
      y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      t += h;
    }
  }
  return out;
}

}  // namespace gclab
