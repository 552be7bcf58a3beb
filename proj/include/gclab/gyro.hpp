#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "gclab/errors.hpp"
#include "gclab/frames.hpp"
#include "gclab/rng.hpp"
#include "gclab/series.hpp"

namespace gclab {

/// Measurement error model: output = M * truth + bias + white noise.
/// The white-noise draw per sample has standard deviation
/// noise_density * sqrt(sample_rate) on each axis.
struct GyroErrorModel {
  Eigen::Matrix3d scale_misalignment = Eigen::Matrix3d::Identity();
  Eigen::Vector3d bias = Eigen::Vector3d::Zero();           // rad/s
  Eigen::Vector3d noise_density = Eigen::Vector3d::Zero();  // rad/s/sqrt(Hz)
  std::uint64_t seed = 0;

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      const double d = scale_misalignment(i, i);
      if (!(d >= 0.9 && d <= 1.1))
        throw config_error("gyro: scale factor diagonal outside [0.9, 1.1]");
      if (!(noise_density(i) >= 0.0)) throw config_error("gyro: negative noise density");
      if (!std::isfinite(bias(i))) throw config_error("gyro: non-finite bias");
    }
  }
};

/// Constant series equal to the earth-rate projection at the given attitude.
inline RateSeries stationary_truth(const GeoConfig& geo, const EulerAngles& attitude,
                                   double duration, double sample_rate) {
  geo.validate();
  if (!(sample_rate > 0.0) || !(duration * sample_rate >= 1.0))
    throw config_error("stationary_truth: need duration*sample_rate >= 1");
  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  const BodyRates w = earth_rate_body(geo, attitude);
  RateSeries s;
  s.sample_rate = sample_rate;
  s.p.assign(n, w.p);
  s.q.assign(n, w.q);
  s.r.assign(n, w.r);
  return s;
}

/// Apply the error model to a true-rate series. Deterministic given the
/// model seed; noise draws are consumed sample-major, axis-minor.
inline RateSeries measure(const RateSeries& truth, const GyroErrorModel& model) {
  truth.validate();
  model.validate();
  RateSeries out = truth;
  const Eigen::Matrix3d& m = model.scale_misalignment;
  const bool identity_m = m.isIdentity(0.0);
  rng::Stream noise(model.seed);
  const double sqrt_fs = std::sqrt(truth.sample_rate);
  const Eigen::Vector3d sigma = model.noise_density * sqrt_fs;
  const bool noisy = sigma.maxCoeff() > 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    Eigen::Vector3d w(truth.p[i], truth.q[i], truth.r[i]);
    if (!identity_m) w = m * w;
    w += model.bias;
    if (noisy) {
      w.x() += sigma.x() * noise.gaussian();
      w.y() += sigma.y() * noise.gaussian();
      w.z() += sigma.z() * noise.gaussian();
    }
    out.p[i] = w.x();
    out.q[i] = w.y();
    out.r[i] = w.z();
  }
  return out;
}

/// Conversions for the customary MEMS datasheet units.
inline double deg_per_sqrt_hour_to_si(double v) { return deg_to_rad(v) / 60.0; }
inline double deg_per_hour_to_si(double v) { return deg_to_rad(v) / 3600.0; }

/// Draw a run-constant per-axis bias uniformly in [-range, range] (rad/s).
inline Eigen::Vector3d draw_run_bias(double range_rad_s, std::uint64_t seed) {
  rng::Stream s(seed);
  Eigen::Vector3d b;
  for (int i = 0; i < 3; ++i) b(i) = s.uniform(-range_rad_s, range_rad_s);
  return b;
}

}  // namespace gclab
