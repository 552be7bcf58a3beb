#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gclab/angles.hpp"
#include "gclab/augment.hpp"
#include "gclab/config.hpp"
#include "gclab/dynamics.hpp"
#include "gclab/errors.hpp"
#include "gclab/filters.hpp"
#include "gclab/gyro.hpp"
#include "gclab/io.hpp"
#include "gclab/learner.hpp"
#include "gclab/util.hpp"

namespace gclab {

/// 20*log10(signal/noise) in decibels.
inline double snr_db(double signal_amplitude, double noise_amplitude) {
  if (!(noise_amplitude > 0.0)) throw config_error("snr: zero noise gives infinite SNR");
  return 20.0 * std::log10(signal_amplitude / noise_amplitude);
}

/// Wrapped heading RMSE in degrees over (estimate, label) pairs.
inline double wrapped_rmse_deg(const std::vector<double>& estimates,
                               const std::vector<double>& labels) {
  if (estimates.size() != labels.size() || estimates.empty())
    throw shape_error("wrapped_rmse: size mismatch or empty");
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double e = wrapped_diff(estimates[i], labels[i]);
    const double term = e * e - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  return rad_to_deg(std::sqrt(sum / static_cast<double>(estimates.size())));
}

/// Scenario for the SNR-versus-averaging-time analysis: measured stationary
/// rates, optionally buried under sinusoidal disturbances of intensity gamma
/// drawn fresh per trial.
struct SnrScenario {
  GeoConfig geo;
  double heading = 0.0;
  GyroErrorModel gyro;  // seed field ignored; trials derive their own
  VehicleParams vehicle;
  double gamma = 0.0;  // 0 -> stationary only (N/D)
  double frequency_lo = 0.3, frequency_hi = 2.0;
  double phase_lo = 0.0, phase_hi = two_pi;
  double sample_rate = 100.0;
  double duration = 240.0;
  int trials = 16;
  std::uint64_t seed = 0;
};

/// SNR of the horizontal earth-rate signal against the residual scatter of
/// K-sample block averages, pooled over the trial ensemble. The SNR argument
/// is the power ratio (earth-rate magnitude squared over summed block-mean
/// variance of p and q), which makes a white-noise-only scenario gain
/// +20 dB per decade of averaging time.
inline std::vector<std::pair<double, double>> snr_vs_averaging(
    const SnrScenario& sc, const std::vector<double>& averaging_times) {
  sc.geo.validate();
  if (sc.trials < 1) throw config_error("snr: need at least one trial");
  if (sc.gyro.noise_density.maxCoeff() <= 0.0 && sc.gamma <= 0.0)
    throw config_error("snr: no noise and no dynamics gives infinite SNR");
  for (double t : averaging_times)
    if (!(t > 0.0) || t > sc.duration)
      throw config_error("snr: averaging times must lie in (0, duration]");

  const auto n = static_cast<std::size_t>(std::llround(sc.duration * sc.sample_rate));
  const DynamicsDerived derived = (sc.gamma > 0.0) ? derive_dynamics(sc.vehicle)
                                                   : DynamicsDerived{};

  // Pooled per-axis block-mean variances, one slot per averaging time.
  std::vector<double> var_p(averaging_times.size(), 0.0), var_q(averaging_times.size(), 0.0);
  std::vector<std::size_t> blocks(averaging_times.size(), 0);

  for (int trial = 0; trial < sc.trials; ++trial) {
    const RateSeries truth =
        stationary_truth(sc.geo, {0.0, 0.0, sc.heading}, sc.duration, sc.sample_rate);
    GyroErrorModel gm = sc.gyro;
    gm.seed = rng::derive_seed(sc.seed, "snr/noise", static_cast<std::uint64_t>(trial));
    RateSeries series = measure(truth, gm);
    if (sc.gamma > 0.0) {
      rng::Stream draw(rng::derive_seed(sc.seed, "snr/dist", static_cast<std::uint64_t>(trial)));
      DisturbanceSpec spec;
      spec.mode = DisturbanceMode::sinusoid;
      spec.axis = static_cast<Axis>(draw.below(2));
      spec.frequency = draw.uniform(sc.frequency_lo, sc.frequency_hi);
      spec.phase = draw.uniform(sc.phase_lo, sc.phase_hi);
      spec.amplitude = sc.gamma * derived.inertia(static_cast<int>(spec.axis));
      const Response resp = respond_analytic(derived, spec, sc.duration, sc.sample_rate);
      series = superimpose(series, to_rate_series(resp));
    }

    for (std::size_t ti = 0; ti < averaging_times.size(); ++ti) {
      const auto k = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(averaging_times[ti] * sc.sample_rate)));
      const std::size_t nb = n / k;
      if (nb < 2) throw config_error("snr: averaging time leaves fewer than 2 blocks");
      double mp = 0.0, mq = 0.0;
      std::vector<double> bp(nb), bq(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        double ap = 0.0, aq = 0.0;
        for (std::size_t i = b * k; i < (b + 1) * k; ++i) {
          ap += series.p[i];
          aq += series.q[i];
        }
        bp[b] = ap / static_cast<double>(k);
        bq[b] = aq / static_cast<double>(k);
        mp += bp[b];
        mq += bq[b];
      }
      mp /= static_cast<double>(nb);
      mq /= static_cast<double>(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        var_p[ti] += (bp[b] - mp) * (bp[b] - mp);
        var_q[ti] += (bq[b] - mq) * (bq[b] - mq);
      }
      blocks[ti] += nb - 1;  // unbiased denominator, pooled
    }
  }

  const double horizontal = sc.geo.earth_rate * std::cos(sc.geo.latitude);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(averaging_times.size());
  for (std::size_t ti = 0; ti < averaging_times.size(); ++ti) {
    const double noise_power =
        (var_p[ti] + var_q[ti]) / static_cast<double>(blocks[ti]);
    curve.emplace_back(averaging_times[ti], snr_db(horizontal * horizontal, noise_power));
  }
  return curve;
}

/// Least-squares slope of an SNR curve in dB per decade of averaging time.
inline double snr_slope_db_per_decade(const std::vector<std::pair<double, double>>& curve) {
  if (curve.size() < 2) throw shape_error("snr slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [t, db] : curve) {
    const double x = std::log10(t);
    sx += x;
    sy += db;
    sxx += x * x;
    sxy += x * db;
  }
  const double n = static_cast<double>(curve.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Heading RMSE of one classical baseline over the indexed items.
inline double filter_rmse_deg(const LabeledDataset& ds, const std::vector<int>& indices,
                              FilterConfig cfg, int jobs = 1) {
  if (indices.empty()) throw config_error("filter_rmse: empty split");
  std::vector<double> est(indices.size()), lab(indices.size());
  parallel_for(indices.size(), jobs, [&](std::size_t i) {
    est[i] = estimate_heading_filtered(ds.items[indices[i]].window, cfg);
    lab[i] = ds.items[indices[i]].heading;
  });
  return wrapped_rmse_deg(est, lab);
}

/// Full benchmark result: the RMSE grid plus per-column SNR and training
/// curves and the trained checkpoints.
struct BenchReport {
  std::vector<double> gammas;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> rmse_deg;  // [method][gamma]
  std::vector<std::vector<std::pair<double, double>>> snr_curves;  // [gamma]
  std::vector<std::vector<EpochMetrics>> loss_curves;              // [gamma]
  std::vector<Regressor> checkpoints;                              // [gamma]
  std::vector<int> small_angle_warnings;                           // [gamma]
  std::string config_hash;

  bool has_learner() const {
    for (const auto& m : methods)
      if (m == "learner") return true;
    return false;
  }
};

inline std::string gamma_label(double g) {
  if (g == 0.0) return "N/D";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), g);
  return "gamma=" + std::string(buf, res.ptr);
}

/// Run the benchmark grid: per gamma, build a dataset, train the learner,
/// and evaluate all five methods on the identical test split.
inline BenchReport run_benchmark(const RunConfig& rc, int jobs = 1) {
  rc.validate();
  BenchReport rep;
  rep.gammas = rc.bench.gammas;
  rep.methods = rc.bench.methods;
  rep.rmse_deg.assign(rep.methods.size(), std::vector<double>(rep.gammas.size(), 0.0));
  rep.snr_curves.resize(rep.gammas.size());
  rep.loss_curves.resize(rep.gammas.size());
  rep.checkpoints.resize(rep.gammas.size());
  rep.small_angle_warnings.assign(rep.gammas.size(), 0);
  {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(rng::fnv1a64(config_to_json(rc).dump())));
    rep.config_hash = hex;
  }
  const GyroErrorModel gyro = rc.gyro_model();
  const std::vector<double> avg_times = rc.bench.averaging_times();

  for (std::size_t gi = 0; gi < rep.gammas.size(); ++gi) {
    const double gamma = rep.gammas[gi];
    try {
      AugmentConfig acfg = rc.augment_with_seed();
      acfg.gamma_lo = acfg.gamma_hi = gamma;
      const LabeledDataset ds =
          build_dataset(acfg, rc.geo, rc.vehicle, gyro, rc.gyro.sample_rate, jobs);
      rep.small_angle_warnings[gi] = ds.small_angle_warnings;
      const SplitIndices split =
          split_dataset(ds, rc.bench.f_train, rc.bench.f_val, rc.bench.f_test);

      if (rep.has_learner()) {
        const TrainResult tr = train(ds, split, rc.shape, rc.train_with_seed());
        rep.loss_curves[gi] = tr.metrics;
        rep.checkpoints[gi] = tr.model;
      }
      for (std::size_t m = 0; m < rep.methods.size(); ++m) {
        if (rep.methods[m] == "learner") {
          rep.rmse_deg[m][gi] = evaluate(rep.checkpoints[gi], ds, split.test);
          continue;
        }
        FilterConfig fc = rc.filter;
        if (rep.methods[m] == "wavelet") fc.kind = FilterKind::wavelet;
        else if (rep.methods[m] == "wiener") fc.kind = FilterKind::wiener;
        else if (rep.methods[m] == "sg") fc.kind = FilterKind::savitzky_golay;
        else fc.kind = FilterKind::fir;
        rep.rmse_deg[m][gi] = filter_rmse_deg(ds, split.test, fc, jobs);
      }

      SnrScenario sc;
      sc.geo = rc.geo;
      sc.gyro = gyro;
      sc.vehicle = rc.vehicle;
      sc.gamma = gamma;
      sc.frequency_lo = rc.augment.frequency_lo;
      sc.frequency_hi = rc.augment.frequency_hi;
      sc.phase_lo = rc.augment.phase_lo;
      sc.phase_hi = rc.augment.phase_hi;
      sc.sample_rate = rc.gyro.sample_rate;
      sc.duration = rc.bench.snr_duration;
      sc.trials = rc.bench.snr_trials;
      sc.seed = rng::derive_seed(rc.master_seed, "snr", gi);
      rep.snr_curves[gi] = snr_vs_averaging(sc, avg_times);
    } catch (const error& e) {
      throw error("bench: cell " + gamma_label(gamma) + " failed: " + e.what());
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Report serialization (17 significant digits everywhere).

inline std::string table2_csv(const BenchReport& rep) {
  std::string out = "method";
  for (double g : rep.gammas) out += "," + gamma_label(g);
  out += "\n";
  for (std::size_t m = 0; m < rep.methods.size(); ++m) {
    out += rep.methods[m];
    for (std::size_t gi = 0; gi < rep.gammas.size(); ++gi)
      out += "," + io::fmt(rep.rmse_deg[m][gi]);
    out += "\n";
  }
  return out;
}

inline std::string snr_csv(const BenchReport& rep) {
  std::string out = "gamma,averaging_time_s,snr_db\n";
  for (std::size_t gi = 0; gi < rep.gammas.size(); ++gi)
    for (const auto& [t, db] : rep.snr_curves[gi])
      out += io::fmt(rep.gammas[gi]) + "," + io::fmt(t) + "," + io::fmt(db) + "\n";
  return out;
}

inline std::string loss_curves_csv(const BenchReport& rep) {
  std::string out = "gamma,epoch,train_loss,val_rmse_deg\n";
  for (std::size_t gi = 0; gi < rep.gammas.size(); ++gi)
    for (const auto& m : rep.loss_curves[gi])
      out += io::fmt(rep.gammas[gi]) + "," + io::fmt(m.epoch) + "," + io::fmt(m.train_loss) +
             "," + io::fmt(m.val_rmse_deg) + "\n";
  return out;
}

inline io::json report_json(const BenchReport& rep) {
  io::json j;
  j["config_hash"] = rep.config_hash;
  j["methods"] = rep.methods;
  j["gammas"] = rep.gammas;
  j["rmse_deg"] = rep.rmse_deg;
  j["small_angle_warnings"] = rep.small_angle_warnings;
  io::json snr = io::json::array();
  for (std::size_t gi = 0; gi < rep.gammas.size(); ++gi) {
    io::json pts = io::json::array();
    for (const auto& [t, db] : rep.snr_curves[gi]) pts.push_back({{"t", t}, {"snr_db", db}});
    snr.push_back({{"gamma", rep.gammas[gi]}, {"points", pts}});
  }
  j["snr"] = std::move(snr);
  return j;
}

}  // namespace gclab
