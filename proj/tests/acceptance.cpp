// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 6 runs the full desk-scale benchmark and takes the bulk
// of the wall time.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gclab/gclab.hpp"

using namespace gclab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// --- criterion 1 -----------------------------------------------------------

Outcome frames_round_trip() {
  const auto t0 = Clock::now();
  rng::Stream s(20240201);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GeoConfig geo{s.uniform(-1.45, 1.45), 7.292115e-5};
    const EulerAngles att{s.uniform(-pi, pi), s.uniform(-1.4, 1.4), s.uniform(-pi, pi)};
    const BodyRates w = earth_rate_body(geo, att);
    worst = std::max(worst,
                     std::abs(wrapped_diff(gyrocompass_full(w, att.roll, att.pitch), att.yaw)));
  }
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << "max yaw error " << io::fmt(worst) << " rad in " << io::fmt(dt) << " s";
  return {worst < 1e-9 && dt < 1.0, os.str()};
}

// --- criterion 2 -----------------------------------------------------------

Outcome ode_oracle_equivalence() {
  const auto t0 = Clock::now();
  rng::Stream s(777001);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    VehicleParams v;
    v.mass = s.uniform(20.0, 120.0);
    v.radius = s.uniform(0.1, 0.3);
    v.length = s.uniform(0.8, 2.2);
    v.z_gravity = -s.uniform(0.02, 0.1);
    v.z_buoyancy = s.uniform(0.02, 0.1);
    v.weight = v.mass * 9.81;
    v.buoyancy = v.weight;
    const double g_rp = v.z_buoyancy * v.buoyancy - v.z_gravity * v.weight;
    const double i_roll = 0.5 * v.mass * v.radius * v.radius;
    const double i_tr = v.mass * (3.0 * v.radius * v.radius + v.length * v.length) / 12.0;
    v.damping = {2.0 * s.uniform(0.05, 0.9) * std::sqrt(g_rp * i_roll),
                 2.0 * s.uniform(0.05, 0.9) * std::sqrt(g_rp * i_tr),
                 2.0 * s.uniform(0.05, 0.9) * std::sqrt(g_rp * i_tr)};
    const DynamicsDerived d = derive_dynamics(v);
    DisturbanceSpec spec;
    const double u = s.uniform01();
    spec.mode = u < 1.0 / 3 ? DisturbanceMode::impulse
                            : (u < 2.0 / 3 ? DisturbanceMode::step : DisturbanceMode::sinusoid);
    spec.axis = static_cast<Axis>(s.below(2));
    spec.amplitude = s.uniform(0.05, 2.0) * d.inertia(static_cast<int>(spec.axis));
    spec.frequency = s.uniform(0.2, 3.0);
    spec.phase = s.uniform(0.0, two_pi);
    const Response a = respond_analytic(d, spec, 60.0, 100.0);
    const Response n = respond_numeric(d, spec, 60.0, 100.0);
    for (std::size_t k = 0; k < a.angle.size(); ++k)
      worst = std::max(worst, std::abs(a.angle[k] - n.angle[k]));
  }
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << "200 configs, max |analytic - rk4| = " << io::fmt(worst) << " rad in " << io::fmt(dt)
     << " s";
  return {worst < 1e-6 && dt < 30.0, os.str()};
}

// --- criterion 3 -----------------------------------------------------------

double step_residues(double inertia, double damping, double restoring, double amp, double t) {
  const double w0 = std::sqrt(restoring / inertia);
  const double zeta = damping / (2.0 * std::sqrt(restoring * inertia));
  const double wd = w0 * std::sqrt(1.0 - zeta * zeta);
  const std::complex<double> s1(-zeta * w0, wd);
  const std::complex<double> r1 = 1.0 / (inertia * s1 * std::complex<double>(0.0, 2.0 * wd));
  return amp * (1.0 / restoring + 2.0 * (r1 * std::exp(s1 * t)).real());
}

Outcome step_formula() {
  double worst = 0.0;
  for (double zeta : {0.1, 0.3, 0.7}) {
    const double inertia = 1.7, restoring = 6.3;
    const double damping = 2.0 * zeta * std::sqrt(restoring * inertia);
    const DynamicsDerived d =
        DynamicsDerived::from_coefficients(inertia, damping, restoring, Axis::roll);
    DisturbanceSpec spec;
    spec.mode = DisturbanceMode::step;
    spec.amplitude = 0.9;
    const Response r = respond_analytic(d, spec, 40.0, 100.0);
    for (std::size_t i = 0; i < r.angle.size(); ++i) {
      const double t = static_cast<double>(i) / 100.0;
      worst = std::max(worst,
                       std::abs(r.angle[i] - step_residues(inertia, damping, restoring, 0.9, t)));
    }
  }
  std::ostringstream os;
  os << "max |closed form - transfer-function path| = " << io::fmt(worst) << " rad";
  return {worst < 1e-8, os.str()};
}

// --- criteria 4 & 5 --------------------------------------------------------

SnrScenario default_snr_scenario(double gamma) {
  RunConfig rc;
  SnrScenario sc;
  sc.geo = rc.geo;
  sc.gyro = rc.gyro_model();
  sc.vehicle = rc.vehicle;
  sc.gamma = gamma;
  sc.frequency_lo = rc.augment.frequency_lo;
  sc.frequency_hi = rc.augment.frequency_hi;
  sc.sample_rate = 100.0;
  sc.duration = 240.0;
  sc.trials = 16;
  sc.seed = rng::derive_seed(rc.master_seed, "acceptance/snr");
  return sc;
}

Outcome snr_slope() {
  const std::vector<double> times{0.02, 0.0632, 0.2, 0.632, 2.0, 6.32, 20.0};
  const auto curve = snr_vs_averaging(default_snr_scenario(0.0), times);
  const double slope = snr_slope_db_per_decade(curve);
  std::ostringstream os;
  os << "white-noise slope " << io::fmt(slope) << " dB/decade over 3 decades";
  return {std::abs(slope - 20.0) <= 1.0, os.str()};
}

Outcome negative_snr_regime() {
  std::vector<double> times;
  for (double t = 0.05; t <= 20.0; t *= 1.3) times.push_back(t);
  const auto curve = snr_vs_averaging(default_snr_scenario(10.0), times);
  bool negative_through_10s = true;
  double crossing = -1.0;
  for (const auto& [t, db] : curve) {
    if (t <= 10.0 && db >= 0.0) negative_through_10s = false;
    if (crossing < 0.0 && db >= 0.0) crossing = t;
  }
  std::ostringstream os;
  os << "SNR(10 s) region " << (negative_through_10s ? "negative" : "NOT negative")
     << ", 0 dB crossing "
     << (crossing < 0.0 ? "beyond grid" : io::fmt(crossing) + " s");
  return {negative_through_10s && (crossing < 0.0 || crossing >= 5.0), os.str()};
}

// --- criterion 6 -----------------------------------------------------------

Outcome table2_trends(const fs::path& outdir) {
  const auto t0 = Clock::now();
  RunConfig rc;  // documented desk-scale defaults: 72 x 20, 60 s @ 100 Hz
  const BenchReport rep = run_benchmark(rc, 2);
  const double dt = seconds_since(t0);

  fs::create_directories(outdir);
  io::write_text_file(outdir / "table2.csv", table2_csv(rep));
  io::write_text_file(outdir / "snr.csv", snr_csv(rep));
  io::write_text_file(outdir / "loss_curves.csv", loss_curves_csv(rep));

  std::ostringstream os;
  bool ok = true;
  // (a) nondecreasing in gamma for every method
  for (std::size_t m = 0; m < rep.methods.size(); ++m)
    for (std::size_t g = 1; g < rep.gammas.size(); ++g)
      if (rep.rmse_deg[m][g] < rep.rmse_deg[m][g - 1] - 1e-9) {
        ok = false;
        os << "[monotonicity broken: " << rep.methods[m] << " " << gamma_label(rep.gammas[g])
           << "] ";
      }
  // (b) learner strictly below every baseline in every column
  for (std::size_t g = 0; g < rep.gammas.size(); ++g)
    for (std::size_t m = 0; m + 1 < rep.methods.size(); ++m)
      if (!(rep.rmse_deg[4][g] < rep.rmse_deg[m][g])) {
        ok = false;
        os << "[learner not below " << rep.methods[m] << " at " << gamma_label(rep.gammas[g])
           << "] ";
      }
  // (c) baseline clustering at N/D within a factor of 3
  double lo = 1e300, hi = 0.0;
  for (int m = 0; m < 4; ++m) {
    lo = std::min(lo, rep.rmse_deg[m][0]);
    hi = std::max(hi, rep.rmse_deg[m][0]);
  }
  if (!(hi <= 3.0 * lo)) {
    ok = false;
    os << "[N/D baselines spread beyond 3x: " << io::fmt(lo) << ".." << io::fmt(hi) << "] ";
  }
  if (!(dt < 1800.0)) {
    ok = false;
    os << "[bench exceeded 30 min] ";
  }
  os << "rmse rows";
  for (std::size_t m = 0; m < rep.methods.size(); ++m) {
    os << " | " << rep.methods[m];
    for (std::size_t g = 0; g < rep.gammas.size(); ++g) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " %.2f", rep.rmse_deg[m][g]);
      os << buf;
    }
  }
  os << " | wall " << io::fmt(dt) << " s";
  return {ok, os.str()};
}

// --- criterion 7 -----------------------------------------------------------

Outcome gradient_check() {
  const auto t0 = Clock::now();
  AugmentConfig a;
  a.headings = AugmentConfig::uniform_headings(6);
  a.per_heading_count = 3;
  a.window_length = 600;
  a.gamma_lo = 0.2;
  a.gamma_hi = 2.0;
  a.seed = 90;
  GyroErrorModel g;
  g.noise_density.setConstant(deg_per_sqrt_hour_to_si(0.2));
  g.bias = {1e-5, -6e-6, 2e-6};
  const GeoConfig geo{deg_to_rad(32.0), 7.292115e-5};
  const LabeledDataset ds = build_dataset(a, geo, default_vehicle(), g, 100.0);
  std::vector<int> all(ds.items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  RegressorShape shape;
  shape.window_length = 600;
  shape.prepool = 4;
  shape.conv_kernels = 3;
  shape.conv_width = 7;
  shape.postpool = 3;
  shape.hidden = 10;
  Regressor m = detail::init_regressor(ds, all, shape, 3);

  auto batch_loss = [&](const std::vector<int>& ids) {
    detail::ForwardCache c;
    double acc = 0.0;
    for (int id : ids) {
      detail::forward_with_cache(m, ds.items[id].window, c);
      acc += loss({c.y[0], c.y[1]}, ds.items[id].heading);
    }
    return acc / static_cast<double>(ids.size());
  };

  rng::Stream pick(31415);
  double worst_rel = 0.0;
  int checked = 0;
  for (int batch = 0; batch < 10; ++batch) {
    std::vector<int> ids;
    for (int k = 0; k < 4; ++k) ids.push_back(static_cast<int>(pick.below(ds.items.size())));
    detail::Gradients grads;
    grads.resize_like(m);
    detail::ForwardCache c;
    for (int id : ids) {
      detail::forward_with_cache(m, ds.items[id].window, c);
      detail::backward_accumulate(m, c, ds.items[id].heading, grads);
    }
    grads.scale(1.0 / static_cast<double>(ids.size()));
    std::vector<std::pair<std::vector<double>*, std::vector<double>*>> tensors = {
        {&m.conv_w, &grads.conv_w}, {&m.conv_b, &grads.conv_b}, {&m.w1, &grads.w1},
        {&m.b1, &grads.b1},         {&m.w2, &grads.w2},         {&m.b2, &grads.b2}};
    for (int probe = 0; probe < 6; ++probe) {
      auto& [vals, gs] = tensors[pick.below(tensors.size())];
      const std::size_t i = pick.below(vals->size());
      const double saved = (*vals)[i];
      const double h = 1e-5;
      (*vals)[i] = saved + h;
      const double lp = batch_loss(ids);
      (*vals)[i] = saved - h;
      const double lm = batch_loss(ids);
      (*vals)[i] = saved;
      const double fd = (lp - lm) / (2.0 * h);
      const double an = (*gs)[i];
      const double denom = std::max(std::abs(fd), std::abs(an));
      if (denom > 1e-7) worst_rel = std::max(worst_rel, std::abs(an - fd) / denom);
      ++checked;
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << checked << " probes over 10 batches, worst relative error " << io::fmt(worst_rel)
     << " in " << io::fmt(dt) << " s";
  return {worst_rel < 1e-4 && dt < 10.0, os.str()};
}

// --- criterion 8 -----------------------------------------------------------

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(GCLAB_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome determinism(const fs::path& outdir) {
  // End-to-end bench run twice at a reduced grid, different worker counts;
  // the pipeline and file formats are identical to the full-scale run.
  fs::create_directories(outdir);
  const fs::path cfg = outdir / "det_config.json";
  io::write_text_file(cfg, R"({
  "augment": {"heading_count": 24, "per_heading_count": 6, "window_length": 2000},
  "train": {"epochs": 30},
  "bench": {"gammas": [0.0, 1.0], "split_fractions": [0.5, 0.25, 0.25],
            "snr_trials": 4, "snr_duration": 60.0,
            "snr_averaging_times": [0.1, 1.0, 5.0]}
})");
  const fs::path log = outdir / "det_log.txt";
  const fs::path a = outdir / "det_a";
  const fs::path b = outdir / "det_b";
  if (run_cli("bench --config " + cfg.string() + " --jobs 2 --out " + a.string(), log) != 0)
    return {false, "first bench run failed; see " + log.string()};
  if (run_cli("bench --config " + cfg.string() + " --jobs 1 --out " + b.string(), log) != 0)
    return {false, "second bench run failed; see " + log.string()};
  std::vector<std::string> files = {"table2.csv", "snr.csv", "checkpoint_g0.json",
                                    "checkpoint_g1.json"};
  for (const auto& f : files)
    if (io::read_text_file(a / f) != io::read_text_file(b / f))
      return {false, "byte mismatch in " + f};
  return {true, "table2.csv, snr.csv and checkpoints byte-identical across runs (jobs 2 vs 1)"};
}

// --- criterion 9 -----------------------------------------------------------

Outcome filter_sanity() {
  std::ostringstream os;
  bool ok = true;

  const auto fir = detail::fir_lowpass_taps(101, 0.0, 100.0);
  double fir_dc = 0.0;
  for (double h : fir) fir_dc += h;
  const auto sg = detail::savgol_kernel(51, 3);
  double sg_dc = 0.0;
  for (double h : sg) sg_dc += h;
  if (std::abs(fir_dc - 1.0) > 1e-10 || std::abs(sg_dc - 1.0) > 1e-10) ok = false;
  os << "dc gains fir " << io::fmt(fir_dc) << ", sg " << io::fmt(sg_dc);

  RateSeries constant = RateSeries::zeros(100.0, 4096);
  for (auto* ax : {&constant.p, &constant.q, &constant.r})
    std::fill(ax->begin(), ax->end(), 5.3e-5);
  for (FilterKind kind : {FilterKind::wiener, FilterKind::wavelet}) {
    FilterConfig fc;
    fc.kind = kind;
    const RateSeries out = denoise(constant, fc);
    double worst = 0.0;
    for (double v : out.p) worst = std::max(worst, std::abs(v - 5.3e-5));
    if (worst > 1e-10) {
      ok = false;
      os << " [" << filter_name(kind) << " broke a constant by " << io::fmt(worst) << "]";
    }
  }

  // 500 Monte-Carlo trials on the stationary+noise configuration: every
  // baseline must beat the unfiltered raw single-sample estimate.
  const GeoConfig geo{deg_to_rad(32.0), 7.292115e-5};
  GyroErrorModel gm;
  gm.noise_density.setConstant(deg_per_sqrt_hour_to_si(0.2));
  rng::Stream s(606);
  const FilterKind kinds[4] = {FilterKind::fir, FilterKind::savitzky_golay, FilterKind::wiener,
                               FilterKind::wavelet};
  double sum2[5] = {0, 0, 0, 0, 0};  // four baselines + unfiltered
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const double psi = s.uniform(-pi, pi);
    gm.seed = s.next_u64();
    const RateSeries w = measure(stationary_truth(geo, {0.0, 0.0, psi}, 60.0, 100.0), gm);
    for (int f = 0; f < 4; ++f) {
      FilterConfig fc;
      fc.kind = kinds[f];
      const double e = wrapped_diff(estimate_heading_filtered(w, fc), psi);
      sum2[f] += e * e;
    }
    const double raw = wrapped_diff(gyrocompass_leveled(w.at(w.size() - 1)), psi);
    sum2[4] += raw * raw;
  }
  const double raw_rmse = rad_to_deg(std::sqrt(sum2[4] / trials));
  os << "; unfiltered single-sample rmse " << io::fmt(raw_rmse) << " deg vs";
  for (int f = 0; f < 4; ++f) {
    const double r = rad_to_deg(std::sqrt(sum2[f] / trials));
    os << " " << filter_name(kinds[f]) << " " << io::fmt(r);
    if (!(r < raw_rmse)) {
      ok = false;
      os << " [not below unfiltered]";
    }
  }
  return {ok, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  int only = -1;
  fs::path outdir = fs::temp_directory_path() / "gclab_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    if (arg == "--out" && i + 1 < argc) outdir = argv[++i];
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "frames round trip", frames_round_trip},
      {2, "ode oracle equivalence", ode_oracle_equivalence},
      {3, "step response closed form vs transfer-function path", step_formula},
      {4, "snr slope +20 dB/decade", snr_slope},
      {5, "negative snr regime at gamma=10", negative_snr_regime},
      {6, "benchmark grid trends", [&] { return table2_trends(outdir); }},
      {7, "learner gradient check", gradient_check},
      {8, "bench determinism", [&] { return determinism(outdir); }},
      {9, "filter sanity", filter_sanity},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only > 0 && c.id != only) continue;
    Outcome out;
    const auto t0 = Clock::now();
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " — "
              << out.detail << " [" << io::fmt(dt) << " s]" << std::endl;
    if (!out.pass) ++failures;
  }
  return failures;
}
