#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gclab/augment.hpp"
#include "gclab/dynamics.hpp"
#include "gclab/errors.hpp"
#include "gclab/filters.hpp"
#include "gclab/frames.hpp"
#include "gclab/gyro.hpp"
#include "gclab/io.hpp"
#include "gclab/learner.hpp"

namespace gclab {

/// Sensor-grade settings in datasheet units. The run-constant bias is drawn
/// uniformly in +-bias_range from the master seed unless given explicitly.
struct GyroSetup {
  double noise_density_deg_sqrt_h = 0.2;  // deg/sqrt(hour) per axis
  double bias_range_deg_h = 5.0;          // deg/hour, uniform draw range
  bool has_explicit_bias = false;
  Eigen::Vector3d bias_rad_s = Eigen::Vector3d::Zero();
  Eigen::Matrix3d scale_misalignment = Eigen::Matrix3d::Identity();
  double sample_rate = 100.0;  // Hz
  double duration = 60.0;      // s, standalone simulate/snr default
};

struct SimulateSetup {
  bool all_modes = true;  // write one trajectory per mode when no --mode given
  DisturbanceMode mode = DisturbanceMode::step;
  Axis axis = Axis::roll;
  double gamma = 1.0;       // used when amplitude < 0
  double amplitude = -1.0;  // N*m; negative means derive from gamma
  double frequency = 1.0;   // rad/s
  double phase = 0.0;
  double onset = 0.0;
  double duration = 60.0;
};

struct BenchSetup {
  std::vector<double> gammas = {0.0, 0.1, 0.5, 1.0, 10.0};  // 0 is the N/D column
  std::vector<std::string> methods = {"wavelet", "wiener", "sg", "fir", "learner"};
  double f_train = 0.8, f_val = 0.1, f_test = 0.1;
  int snr_trials = 16;
  double snr_duration = 240.0;
  std::vector<double> snr_averaging_times;  // empty -> log grid

  std::vector<double> averaging_times() const {
    if (!snr_averaging_times.empty()) return snr_averaging_times;
    std::vector<double> t;
    for (double v = 0.01; v <= std::min(20.0, snr_duration / 4.0) * (1.0 + 1e-9); v *= 1.4678)
      t.push_back(v);  // ~6 points per decade
    return t;
  }
};

/// One config drives the whole pipeline. Every random draw derives from
/// master_seed through a labeled child seed, so any command's outputs are a
/// pure function of (config file, CLI flags).
struct RunConfig {
  std::uint64_t master_seed = 42;
  std::string output_dir = "out";
  GeoConfig geo{deg_to_rad(32.0), 7.292115e-5};
  VehicleParams vehicle = default_vehicle();
  GyroSetup gyro;
  AugmentConfig augment = default_augment();
  FilterConfig filter;
  TrainConfig train;
  RegressorShape shape;
  SimulateSetup simulate;
  BenchSetup bench;

  static AugmentConfig default_augment() {
    AugmentConfig a;
    a.headings = AugmentConfig::uniform_headings(72);
    a.per_heading_count = 20;
    a.window_length = 6000;
    return a;
  }

  /// Instantiate the measurement model, drawing the run bias if needed.
  GyroErrorModel gyro_model() const {
    GyroErrorModel m;
    m.scale_misalignment = gyro.scale_misalignment;
    m.noise_density.setConstant(deg_per_sqrt_hour_to_si(gyro.noise_density_deg_sqrt_h));
    m.bias = gyro.has_explicit_bias
                 ? gyro.bias_rad_s
                 : draw_run_bias(deg_per_hour_to_si(gyro.bias_range_deg_h),
                                 rng::derive_seed(master_seed, "gyro/bias"));
    m.seed = rng::derive_seed(master_seed, "gyro/noise");
    return m;
  }

  /// Augment config finalized with its derived child seed.
  AugmentConfig augment_with_seed() const {
    AugmentConfig a = augment;
    a.seed = rng::derive_seed(master_seed, "augment");
    return a;
  }

  TrainConfig train_with_seed() const {
    TrainConfig t = train;
    t.seed = rng::derive_seed(master_seed, "train");
    return t;
  }

  void validate() const {
    geo.validate();
    vehicle.validate();
    augment.validate();
    train.validate();
    shape.validate();
    if (!(gyro.sample_rate > 0.0)) throw config_error("gyro: sample_rate must be positive");
    if (!(gyro.duration > 0.0)) throw config_error("gyro: duration must be positive");
    if (!(gyro.noise_density_deg_sqrt_h >= 0.0))
      throw config_error("gyro: negative noise density");
    if (!(gyro.bias_range_deg_h >= 0.0)) throw config_error("gyro: negative bias range");
    if (bench.gammas.empty()) throw config_error("bench: empty gamma grid");
    for (double g : bench.gammas)
      if (!(g >= 0.0)) throw config_error("bench: gamma values must be >= 0");
    if (bench.methods.empty()) throw config_error("bench: empty method list");
    for (const auto& m : bench.methods)
      if (m != "wavelet" && m != "wiener" && m != "sg" && m != "fir" && m != "learner")
        throw config_error("bench: unknown method '" + m + "'");
    if (std::abs(bench.f_train + bench.f_val + bench.f_test - 1.0) > 1e-9)
      throw config_error("bench: split fractions must sum to 1");
    if (!(bench.snr_trials >= 1)) throw config_error("bench: snr_trials must be >= 1");
    if (!(bench.snr_duration > 0.0)) throw config_error("bench: snr_duration must be positive");
    if (!(simulate.duration > 0.0)) throw config_error("simulate: duration must be positive");
  }
};

namespace detail {

using io::json;

inline void check_keys(const json& j, const std::string& section,
                       std::initializer_list<const char*> allowed) {
  for (const auto& kv : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (kv.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw config_error("config: unknown key '" + kv.key() + "' in section '" + section + "'");
  }
}

template <typename T>
inline void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

/// Parse a JSON run config. Unknown keys are rejected; absent keys keep
/// their documented defaults.
inline RunConfig parse_config(const io::json& j) {
  using detail::check_keys;
  using detail::maybe;
  RunConfig rc;
  check_keys(j, "<root>",
             {"master_seed", "output_dir", "geo", "vehicle", "gyro", "augment", "filter",
              "train", "simulate", "bench"});
  maybe(j, "master_seed", rc.master_seed);
  maybe(j, "output_dir", rc.output_dir);

  if (j.contains("geo")) {
    const auto& s = j.at("geo");
    check_keys(s, "geo", {"latitude_deg", "earth_rate"});
    if (s.contains("latitude_deg")) rc.geo.latitude = deg_to_rad(s.at("latitude_deg").get<double>());
    maybe(s, "earth_rate", rc.geo.earth_rate);
  }
  if (j.contains("vehicle")) {
    const auto& s = j.at("vehicle");
    check_keys(s, "vehicle",
               {"mass", "radius", "length", "z_gravity", "z_buoyancy", "weight", "buoyancy",
                "damping"});
    maybe(s, "mass", rc.vehicle.mass);
    maybe(s, "radius", rc.vehicle.radius);
    maybe(s, "length", rc.vehicle.length);
    maybe(s, "z_gravity", rc.vehicle.z_gravity);
    maybe(s, "z_buoyancy", rc.vehicle.z_buoyancy);
    maybe(s, "weight", rc.vehicle.weight);
    maybe(s, "buoyancy", rc.vehicle.buoyancy);
    if (s.contains("damping")) {
      const auto d = s.at("damping").get<std::vector<double>>();
      if (d.size() != 3) throw config_error("vehicle: damping must have 3 entries");
      rc.vehicle.damping = {d[0], d[1], d[2]};
    }
  }
  if (j.contains("gyro")) {
    const auto& s = j.at("gyro");
    check_keys(s, "gyro",
               {"noise_density_deg_sqrt_h", "bias_range_deg_h", "bias_rad_s",
                "scale_misalignment", "sample_rate", "duration"});
    maybe(s, "noise_density_deg_sqrt_h", rc.gyro.noise_density_deg_sqrt_h);
    maybe(s, "bias_range_deg_h", rc.gyro.bias_range_deg_h);
    maybe(s, "sample_rate", rc.gyro.sample_rate);
    maybe(s, "duration", rc.gyro.duration);
    if (s.contains("bias_rad_s")) {
      const auto b = s.at("bias_rad_s").get<std::vector<double>>();
      if (b.size() != 3) throw config_error("gyro: bias_rad_s must have 3 entries");
      rc.gyro.has_explicit_bias = true;
      rc.gyro.bias_rad_s = {b[0], b[1], b[2]};
    }
    if (s.contains("scale_misalignment")) {
      const auto rows = s.at("scale_misalignment").get<std::vector<std::vector<double>>>();
      if (rows.size() != 3 || rows[0].size() != 3 || rows[1].size() != 3 || rows[2].size() != 3)
        throw config_error("gyro: scale_misalignment must be 3x3");
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rc.gyro.scale_misalignment(r, c) = rows[r][c];
    }
  }
  if (j.contains("augment")) {
    const auto& s = j.at("augment");
    check_keys(s, "augment",
               {"gamma", "gamma_range", "mode_mix", "frequency_range", "phase_range",
                "heading_count", "headings", "per_heading_count", "window_length",
                "include_yaw_axis"});
    if (s.contains("gamma")) {
      rc.augment.gamma_lo = rc.augment.gamma_hi = s.at("gamma").get<double>();
    }
    if (s.contains("gamma_range")) {
      const auto r = s.at("gamma_range").get<std::vector<double>>();
      if (r.size() != 2) throw config_error("augment: gamma_range must be [lo, hi]");
      rc.augment.gamma_lo = r[0];
      rc.augment.gamma_hi = r[1];
    }
    if (s.contains("mode_mix")) {
      const auto& m = s.at("mode_mix");
      check_keys(m, "augment.mode_mix", {"impulse", "step", "sinusoid"});
      maybe(m, "impulse", rc.augment.weight_impulse);
      maybe(m, "step", rc.augment.weight_step);
      maybe(m, "sinusoid", rc.augment.weight_sinusoid);
    }
    if (s.contains("frequency_range")) {
      const auto r = s.at("frequency_range").get<std::vector<double>>();
      if (r.size() != 2) throw config_error("augment: frequency_range must be [lo, hi]");
      rc.augment.frequency_lo = r[0];
      rc.augment.frequency_hi = r[1];
    }
    if (s.contains("phase_range")) {
      const auto r = s.at("phase_range").get<std::vector<double>>();
      if (r.size() != 2) throw config_error("augment: phase_range must be [lo, hi]");
      rc.augment.phase_lo = r[0];
      rc.augment.phase_hi = r[1];
    }
    if (s.contains("heading_count"))
      rc.augment.headings = AugmentConfig::uniform_headings(s.at("heading_count").get<int>());
    if (s.contains("headings")) rc.augment.headings = s.at("headings").get<std::vector<double>>();
    maybe(s, "per_heading_count", rc.augment.per_heading_count);
    maybe(s, "window_length", rc.augment.window_length);
    maybe(s, "include_yaw_axis", rc.augment.include_yaw_axis);
  }
  if (j.contains("filter")) {
    const auto& s = j.at("filter");
    check_keys(s, "filter",
               {"fir_taps", "fir_cutoff_hz", "sg_window", "sg_order", "wiener_segment",
                "wiener_noise_power", "wavelet_levels", "wavelet_threshold_scale"});
    maybe(s, "fir_taps", rc.filter.fir_taps);
    maybe(s, "fir_cutoff_hz", rc.filter.fir_cutoff_hz);
    maybe(s, "sg_window", rc.filter.sg_window);
    maybe(s, "sg_order", rc.filter.sg_order);
    maybe(s, "wiener_segment", rc.filter.wiener_segment);
    maybe(s, "wiener_noise_power", rc.filter.wiener_noise_power);
    maybe(s, "wavelet_levels", rc.filter.wavelet_levels);
    maybe(s, "wavelet_threshold_scale", rc.filter.wavelet_threshold_scale);
  }
  if (j.contains("train")) {
    const auto& s = j.at("train");
    check_keys(s, "train",
               {"epochs", "batch_size", "learning_rate", "early_stop_patience", "restarts",
                "hidden", "conv_kernels", "conv_width", "prepool", "postpool"});
    maybe(s, "epochs", rc.train.epochs);
    maybe(s, "batch_size", rc.train.batch_size);
    maybe(s, "learning_rate", rc.train.learning_rate);
    maybe(s, "early_stop_patience", rc.train.early_stop_patience);
    maybe(s, "restarts", rc.train.restarts);
    maybe(s, "hidden", rc.shape.hidden);
    maybe(s, "conv_kernels", rc.shape.conv_kernels);
    maybe(s, "conv_width", rc.shape.conv_width);
    maybe(s, "prepool", rc.shape.prepool);
    maybe(s, "postpool", rc.shape.postpool);
  }
  if (j.contains("simulate")) {
    const auto& s = j.at("simulate");
    check_keys(s, "simulate",
               {"mode", "axis", "gamma", "amplitude", "frequency", "phase", "onset", "duration"});
    if (s.contains("mode")) {
      rc.simulate.mode = io::mode_from_name(s.at("mode").get<std::string>());
      rc.simulate.all_modes = false;
    }
    if (s.contains("axis")) rc.simulate.axis = io::axis_from_name(s.at("axis").get<std::string>());
    maybe(s, "gamma", rc.simulate.gamma);
    maybe(s, "amplitude", rc.simulate.amplitude);
    maybe(s, "frequency", rc.simulate.frequency);
    maybe(s, "phase", rc.simulate.phase);
    maybe(s, "onset", rc.simulate.onset);
    maybe(s, "duration", rc.simulate.duration);
  }
  if (j.contains("bench")) {
    const auto& s = j.at("bench");
    check_keys(s, "bench",
               {"gammas", "methods", "split_fractions", "snr_trials", "snr_duration",
                "snr_averaging_times"});
    maybe(s, "gammas", rc.bench.gammas);
    maybe(s, "methods", rc.bench.methods);
    if (s.contains("split_fractions")) {
      const auto f = s.at("split_fractions").get<std::vector<double>>();
      if (f.size() != 3) throw config_error("bench: split_fractions must be [train, val, test]");
      rc.bench.f_train = f[0];
      rc.bench.f_val = f[1];
      rc.bench.f_test = f[2];
    }
    maybe(s, "snr_trials", rc.bench.snr_trials);
    maybe(s, "snr_duration", rc.bench.snr_duration);
    maybe(s, "snr_averaging_times", rc.bench.snr_averaging_times);
  }
  rc.shape.window_length = rc.augment.window_length;
  rc.validate();
  return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  io::json j;
  try {
    j = io::json::parse(io::read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("config: cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

/// Canonical JSON dump of everything that influences outputs; hashed into
/// provenance fields.
inline io::json config_to_json(const RunConfig& rc) {
  io::json j;
  j["master_seed"] = rc.master_seed;
  j["geo"] = {{"latitude", rc.geo.latitude}, {"earth_rate", rc.geo.earth_rate}};
  j["vehicle"] = {{"mass", rc.vehicle.mass},
                  {"radius", rc.vehicle.radius},
                  {"length", rc.vehicle.length},
                  {"z_gravity", rc.vehicle.z_gravity},
                  {"z_buoyancy", rc.vehicle.z_buoyancy},
                  {"weight", rc.vehicle.weight},
                  {"buoyancy", rc.vehicle.buoyancy},
                  {"damping",
                   {rc.vehicle.damping(0), rc.vehicle.damping(1), rc.vehicle.damping(2)}}};
  j["gyro"] = {{"noise_density_deg_sqrt_h", rc.gyro.noise_density_deg_sqrt_h},
               {"bias_range_deg_h", rc.gyro.bias_range_deg_h},
               {"has_explicit_bias", rc.gyro.has_explicit_bias},
               {"sample_rate", rc.gyro.sample_rate},
               {"duration", rc.gyro.duration}};
  j["augment"] = {{"gamma_lo", rc.augment.gamma_lo},
                  {"gamma_hi", rc.augment.gamma_hi},
                  {"headings", rc.augment.headings.size()},
                  {"per_heading_count", rc.augment.per_heading_count},
                  {"window_length", rc.augment.window_length},
                  {"frequency_lo", rc.augment.frequency_lo},
                  {"frequency_hi", rc.augment.frequency_hi},
                  {"include_yaw_axis", rc.augment.include_yaw_axis}};
  j["filter"] = {{"fir_taps", rc.filter.fir_taps},
                 {"fir_cutoff_hz", rc.filter.fir_cutoff_hz},
                 {"sg_window", rc.filter.sg_window},
                 {"sg_order", rc.filter.sg_order},
                 {"wiener_segment", rc.filter.wiener_segment},
                 {"wavelet_levels", rc.filter.wavelet_levels},
                 {"wavelet_threshold_scale", rc.filter.wavelet_threshold_scale}};
  j["train"] = {{"epochs", rc.train.epochs},
                {"batch_size", rc.train.batch_size},
                {"learning_rate", rc.train.learning_rate},
                {"early_stop_patience", rc.train.early_stop_patience},
                {"restarts", rc.train.restarts},
                {"hidden", rc.shape.hidden},
                {"conv_kernels", rc.shape.conv_kernels},
                {"conv_width", rc.shape.conv_width},
                {"prepool", rc.shape.prepool},
                {"postpool", rc.shape.postpool}};
  j["bench"] = {{"gammas", rc.bench.gammas},
                {"methods", rc.bench.methods},
                {"split", {rc.bench.f_train, rc.bench.f_val, rc.bench.f_test}},
                {"snr_trials", rc.bench.snr_trials},
                {"snr_duration", rc.bench.snr_duration}};
  return j;
}

}  // namespace gclab
