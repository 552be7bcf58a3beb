#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "gclab/angles.hpp"
#include "gclab/dynamics.hpp"
#include "gclab/errors.hpp"
#include "gclab/gyro.hpp"
#include "gclab/rng.hpp"
#include "gclab/series.hpp"
#include "gclab/util.hpp"

namespace gclab {

/// Dataset generation recipe: which headings to label, how many windows per
/// heading, and the distribution the disturbance parameters are drawn from.
struct AugmentConfig {
  double gamma_lo = 1.0;  // torque-to-inertia target range (equal bounds pin it)
  double gamma_hi = 1.0;
  double weight_impulse = 1.0;  // mode-mix weights, need not be normalized
  double weight_step = 1.0;
  double weight_sinusoid = 1.0;
  double frequency_lo = 0.3;  // rad/s, sinusoid band
  double frequency_hi = 2.0;
  double phase_lo = 0.0;
  double phase_hi = two_pi;
  std::vector<double> headings;  // rad, label grid
  int per_heading_count = 20;
  int window_length = 6000;  // samples
  bool include_yaw_axis = false;  // unrestored yaw drift breaks the small-angle
                                  // model over long windows; off by default
  std::uint64_t seed = 0;

  /// Uniform label grid of `count` headings covering [-pi, pi).
  static std::vector<double> uniform_headings(int count) {
    std::vector<double> h(count);
    for (int i = 0; i < count; ++i)
      h[i] = wrap_pi(-pi + two_pi * static_cast<double>(i) / static_cast<double>(count));
    return h;
  }

  void validate() const {
    if (!(gamma_lo >= 0.0) || !(gamma_hi >= gamma_lo))
      throw config_error("augment: need 0 <= gamma_lo <= gamma_hi");
    if (weight_impulse < 0 || weight_step < 0 || weight_sinusoid < 0 ||
        weight_impulse + weight_step + weight_sinusoid <= 0)
      throw config_error("augment: mode-mix weights must be nonnegative and not all zero");
    if (!(frequency_lo > 0.0) || !(frequency_hi >= frequency_lo))
      throw config_error("augment: need 0 < frequency_lo <= frequency_hi");
    if (!(phase_hi >= phase_lo)) throw config_error("augment: empty phase range");
    if (headings.empty()) throw config_error("augment: empty heading grid");
    if (per_heading_count < 1) throw config_error("augment: per_heading_count must be >= 1");
    if (window_length < 2) throw config_error("augment: window_length must be >= 2");
  }
};

/// One labeled window plus everything needed to regenerate it in isolation.
struct DatasetItem {
  int id = 0;
  RateSeries window;
  double heading = 0.0;  // rad, wrapped label
  double gamma = 0.0;    // realized torque-to-inertia ratio
  DisturbanceSpec disturbance;
  std::uint64_t noise_seed = 0;
};

/// Items plus full generation provenance.
struct LabeledDataset {
  std::vector<DatasetItem> items;
  GeoConfig geo;
  VehicleParams vehicle;
  GyroErrorModel gyro;
  AugmentConfig config;
  double sample_rate = 100.0;
  int small_angle_warnings = 0;  // windows whose |angle| exceeded 0.3 rad
};

/// Index-based split of a dataset (items are not copied).
struct SplitIndices {
  std::vector<int> train, validation, test;
};

/// Elementwise sum of two rate series of identical shape.
inline RateSeries superimpose(const RateSeries& a, const RateSeries& b) {
  a.validate();
  b.validate();
  if (a.size() != b.size() || a.sample_rate != b.sample_rate)
    throw shape_error("superimpose: length or sample-rate mismatch");
  RateSeries out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.p[i] = a.p[i] + b.p[i];
    out.q[i] = a.q[i] + b.q[i];
    out.r[i] = a.r[i] + b.r[i];
  }
  return out;
}

namespace detail {

/// Per-item disturbance draw. The draw order and count are fixed so that
/// datasets built with different gamma targets share every other random
/// choice, differing only in forcing amplitude.
inline DisturbanceSpec draw_disturbance(const AugmentConfig& cfg, const DynamicsDerived& derived,
                                        std::uint64_t item_seed, double* gamma_out) {
  rng::Stream s(item_seed);
  const double wsum = cfg.weight_impulse + cfg.weight_step + cfg.weight_sinusoid;
  const double u = s.uniform01() * wsum;
  DisturbanceSpec spec;
  spec.mode = (u < cfg.weight_impulse)
                  ? DisturbanceMode::impulse
                  : (u < cfg.weight_impulse + cfg.weight_step ? DisturbanceMode::step
                                                              : DisturbanceMode::sinusoid);
  const int n_axes = cfg.include_yaw_axis ? 3 : 2;
  spec.axis = static_cast<Axis>(s.below(static_cast<std::uint64_t>(n_axes)));
  const double gamma = s.uniform(cfg.gamma_lo, cfg.gamma_hi);
  const double freq = s.uniform(cfg.frequency_lo, cfg.frequency_hi);
  const double phase = s.uniform(cfg.phase_lo, cfg.phase_hi);
  spec.amplitude = gamma * derived.inertia(static_cast<int>(spec.axis));
  spec.frequency = freq;
  spec.phase = phase;
  spec.onset = 0.0;
  *gamma_out = gamma;
  return spec;
}

}  // namespace detail

/// Build the labeled dataset: per heading and repetition, draw a disturbance,
/// solve the dynamics, synthesize a measured stationary window at that
/// heading, and superimpose. Deterministic given the config seed; items may
/// be generated in parallel because each derives its own child seeds.
inline LabeledDataset build_dataset(const AugmentConfig& cfg, const GeoConfig& geo,
                                    const VehicleParams& vehicle, const GyroErrorModel& gyro,
                                    double sample_rate, int jobs = 1) {
  cfg.validate();
  geo.validate();
  gyro.validate();
  const DynamicsDerived derived = derive_dynamics(vehicle);
  if (cfg.gamma_hi > 0.0) {
    const int n_axes = cfg.include_yaw_axis ? 3 : 2;
    for (int a = 0; a < n_axes; ++a) {
      if (derived.oscillatory(static_cast<Axis>(a)) &&
          derived.damping_ratio(a) >= 1.0)
        throw config_error(std::string("augment: gamma target infeasible, axis ") +
                           axis_name(static_cast<Axis>(a)) + " is not underdamped");
    }
  }

  LabeledDataset ds;
  ds.geo = geo;
  ds.vehicle = vehicle;
  ds.gyro = gyro;
  ds.config = cfg;
  ds.sample_rate = sample_rate;
  const int n_headings = static_cast<int>(cfg.headings.size());
  const int n_items = n_headings * cfg.per_heading_count;
  ds.items.resize(n_items);

  const double duration = static_cast<double>(cfg.window_length) / sample_rate;
  std::atomic<int> warnings{0};
  parallel_for(static_cast<std::size_t>(n_items), jobs, [&](std::size_t idx) {
    const int id = static_cast<int>(idx);
    const int h_idx = id / cfg.per_heading_count;
    DatasetItem item;
    item.id = id;
    item.heading = wrap_pi(cfg.headings[h_idx]);
    item.noise_seed = rng::derive_seed(cfg.seed, "augment/noise", static_cast<std::uint64_t>(id));
    const std::uint64_t draw_seed =
        rng::derive_seed(cfg.seed, "augment/item", static_cast<std::uint64_t>(id));
    item.disturbance = detail::draw_disturbance(cfg, derived, draw_seed, &item.gamma);

    const RateSeries truth =
        stationary_truth(geo, {0.0, 0.0, item.heading}, duration, sample_rate);
    GyroErrorModel item_gyro = gyro;
    item_gyro.seed = item.noise_seed;
    RateSeries measured = measure(truth, item_gyro);
    if (item.disturbance.amplitude > 0.0) {
      const Response resp = respond_analytic(derived, item.disturbance, duration, sample_rate);
      if (resp.small_angle_exceeded()) warnings.fetch_add(1, std::memory_order_relaxed);
      measured = superimpose(measured, to_rate_series(resp));
    }
    item.window = std::move(measured);
    ds.items[idx] = std::move(item);
  });
  ds.small_angle_warnings = warnings.load();
  return ds;
}

/// Regenerate the clean dynamic rate contribution of an item (provenance
/// path used by the label-consistency oracle and by reproducibility tooling).
inline RateSeries regenerate_dynamics(const LabeledDataset& ds, const DatasetItem& item) {
  const double duration = static_cast<double>(ds.config.window_length) / ds.sample_rate;
  if (item.disturbance.amplitude == 0.0)
    return RateSeries::zeros(ds.sample_rate, static_cast<std::size_t>(ds.config.window_length));
  const DynamicsDerived derived = derive_dynamics(ds.vehicle);
  return to_rate_series(respond_analytic(derived, item.disturbance, duration, ds.sample_rate));
}

/// Heading-stratified deterministic split. Fractions must sum to 1.
inline SplitIndices split_dataset(const LabeledDataset& ds, double f_train, double f_val,
                                  double f_test) {
  if (!(f_train >= 0 && f_val >= 0 && f_test >= 0) ||
      std::abs(f_train + f_val + f_test - 1.0) > 1e-9)
    throw config_error("split: fractions must be nonnegative and sum to 1");
  SplitIndices out;
  const int reps = ds.config.per_heading_count;
  const int n_headings = static_cast<int>(ds.config.headings.size());
  for (int h = 0; h < n_headings; ++h) {
    std::vector<int> ids(reps);
    std::iota(ids.begin(), ids.end(), h * reps);
    rng::Stream shuffle(rng::derive_seed(ds.config.seed, "split", static_cast<std::uint64_t>(h)));
    for (int i = reps - 1; i > 0; --i) {
      const auto j = static_cast<int>(shuffle.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(ids[i], ids[j]);
    }
    // Largest-remainder apportioning keeps the per-heading counts exact.
    const double want[3] = {f_train * reps, f_val * reps, f_test * reps};
    int take[3];
    double rem[3];
    int assigned = 0;
    for (int k = 0; k < 3; ++k) {
      take[k] = static_cast<int>(std::floor(want[k] + 1e-12));
      rem[k] = want[k] - take[k];
      assigned += take[k];
    }
    while (assigned < reps) {
      int best = 0;
      for (int k = 1; k < 3; ++k)
        if (rem[k] > rem[best] + 1e-15) best = k;
      ++take[best];
      rem[best] = -1.0;
      ++assigned;
    }
    int pos = 0;
    for (int k = 0; k < 3; ++k) {
      auto* dst = (k == 0) ? &out.train : (k == 1) ? &out.validation : &out.test;
      for (int i = 0; i < take[k]; ++i) dst->push_back(ids[pos++]);
    }
  }
  return out;
}

}  // namespace gclab
