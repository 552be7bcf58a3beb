#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "gclab/gclab.hpp"

namespace fs = std::filesystem;
using namespace gclab;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int jobs = 1;
};

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig rc;
  if (!opts.config_path.empty()) {
    if (!fs::exists(opts.config_path))
      throw input_error("config file not found: " + opts.config_path);
    rc = load_config(opts.config_path);
  } else {
    rc.validate();
  }
  if (opts.seed >= 0) rc.master_seed = static_cast<std::uint64_t>(opts.seed);
  if (!opts.out_dir.empty()) rc.output_dir = opts.out_dir;
  return rc;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Run-config JSON file");
  cmd->add_option("--seed", opts.seed, "Master seed override")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--jobs", opts.jobs, "Worker thread bound")->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts.out_dir, "Output directory");
}

std::string trajectory_csv(const Response& resp) {
  std::string out = "t,angle_rad,rate_rad_s\n";
  for (std::size_t i = 0; i < resp.angle.size(); ++i)
    out += io::fmt(static_cast<double>(i) / resp.sample_rate) + "," + io::fmt(resp.angle[i]) +
           "," + io::fmt(resp.rate[i]) + "\n";
  return out;
}

int cmd_simulate(const CommonOpts& opts, const std::string& mode_flag, double amplitude_flag,
                 double gamma_flag, double frequency_flag, const std::string& axis_flag) {
  RunConfig rc = resolve_config(opts);
  SimulateSetup sim = rc.simulate;
  if (!mode_flag.empty()) {
    sim.mode = io::mode_from_name(mode_flag);
    sim.all_modes = false;
  }
  if (!axis_flag.empty()) sim.axis = io::axis_from_name(axis_flag);
  if (amplitude_flag >= 0.0) sim.amplitude = amplitude_flag;
  if (gamma_flag >= 0.0) {
    sim.gamma = gamma_flag;
    sim.amplitude = -1.0;
  }
  if (frequency_flag > 0.0) sim.frequency = frequency_flag;

  const DynamicsDerived derived = derive_dynamics(rc.vehicle);
  const fs::path dir(rc.output_dir);
  std::vector<DisturbanceMode> modes;
  if (sim.all_modes)
    modes = {DisturbanceMode::impulse, DisturbanceMode::step, DisturbanceMode::sinusoid};
  else
    modes = {sim.mode};

  for (DisturbanceMode m : modes) {
    DisturbanceSpec spec;
    spec.mode = m;
    spec.axis = sim.axis;
    spec.amplitude = sim.amplitude >= 0.0
                         ? sim.amplitude
                         : sim.gamma * derived.inertia(static_cast<int>(sim.axis));
    spec.frequency = sim.frequency;
    spec.phase = sim.phase;
    spec.onset = sim.onset;
    const Response resp =
        respond_analytic(derived, spec, sim.duration, rc.gyro.sample_rate);
    if (resp.small_angle_exceeded())
      std::cerr << "warning: |" << axis_name(spec.axis) << "| exceeded 0.3 rad ("
                << io::fmt(resp.max_abs_angle) << " rad); small-angle model degraded\n";
    const fs::path file = dir / (std::string("simulate_") + mode_name(m) + ".csv");
    io::write_text_file(file, trajectory_csv(resp));
    std::cout << "wrote " << file.string() << "\n";
  }
  return 0;
}

int cmd_augment(const CommonOpts& opts) {
  RunConfig rc = resolve_config(opts);
  const LabeledDataset ds = build_dataset(rc.augment_with_seed(), rc.geo, rc.vehicle,
                                          rc.gyro_model(), rc.gyro.sample_rate, opts.jobs);
  const SplitIndices split = split_dataset(ds, rc.bench.f_train, rc.bench.f_val, rc.bench.f_test);
  const fs::path dir = fs::path(rc.output_dir) / "dataset";
  io::save_dataset(dir, ds, split);
  if (ds.small_angle_warnings > 0)
    std::cerr << "warning: " << ds.small_angle_warnings
              << " windows exceeded the 0.3 rad small-angle bound\n";
  std::cout << "wrote " << (dir / "meta.json").string() << " and split CSVs ("
            << ds.items.size() << " items)\n";
  return 0;
}

int cmd_train(const CommonOpts& opts) {
  RunConfig rc = resolve_config(opts);
  const fs::path dir = fs::path(rc.output_dir) / "dataset";
  if (!fs::exists(dir / "meta.json"))
    throw input_error("missing dataset (run augment first): " + (dir / "meta.json").string());
  auto [ds, split] = io::load_dataset(dir);
  RegressorShape shape = rc.shape;
  shape.window_length = ds.config.window_length;
  const TrainResult tr = train(ds, split, shape, rc.train_with_seed());
  const fs::path ckpt = fs::path(rc.output_dir) / "checkpoint.json";
  io::save_checkpoint(ckpt, tr.model);
  io::write_text_file(fs::path(rc.output_dir) / "metrics.csv", io::metrics_csv(tr.metrics));
  std::cout << "best epoch " << tr.best_epoch << ", validation RMSE "
            << io::fmt(tr.best_val_rmse_deg) << " deg\nwrote " << ckpt.string() << "\n";
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& checkpoint_flag) {
  RunConfig rc = resolve_config(opts);
  const fs::path dir = fs::path(rc.output_dir) / "dataset";
  if (!fs::exists(dir / "meta.json"))
    throw input_error("missing dataset (run augment first): " + (dir / "meta.json").string());
  const fs::path ckpt = checkpoint_flag.empty()
                            ? fs::path(rc.output_dir) / "checkpoint.json"
                            : fs::path(checkpoint_flag);
  if (!fs::exists(ckpt)) throw input_error("missing checkpoint (run train first): " + ckpt.string());
  auto [ds, split] = io::load_dataset(dir);
  const Regressor model = io::load_checkpoint(ckpt);

  std::string out = "method,rmse_deg\n";
  const FilterKind kinds[4] = {FilterKind::wavelet, FilterKind::wiener,
                               FilterKind::savitzky_golay, FilterKind::fir};
  const char* names[4] = {"wavelet", "wiener", "sg", "fir"};
  for (int f = 0; f < 4; ++f) {
    FilterConfig fc = rc.filter;
    fc.kind = kinds[f];
    out += std::string(names[f]) + "," +
           io::fmt(filter_rmse_deg(ds, split.test, fc, opts.jobs)) + "\n";
  }
  out += "learner," + io::fmt(evaluate(model, ds, split.test)) + "\n";
  io::write_text_file(fs::path(rc.output_dir) / "eval.csv", out);
  std::cout << out;
  return 0;
}

int cmd_bench(const CommonOpts& opts) {
  RunConfig rc = resolve_config(opts);
  const auto t0 = std::chrono::steady_clock::now();
  const BenchReport rep = run_benchmark(rc, opts.jobs);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path dir(rc.output_dir);
  io::write_text_file(dir / "table2.csv", table2_csv(rep));
  io::write_text_file(dir / "snr.csv", snr_csv(rep));
  io::write_text_file(dir / "loss_curves.csv", loss_curves_csv(rep));
  io::write_text_file(dir / "report.json", report_json(rep).dump(2) + "\n");
  if (rep.has_learner()) {
    for (std::size_t gi = 0; gi < rep.gammas.size(); ++gi) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_g%zu.json", gi);
      io::save_checkpoint(dir / name, rep.checkpoints[gi]);
    }
  }
  for (std::size_t gi = 0; gi < rep.gammas.size(); ++gi)
    if (rep.small_angle_warnings[gi] > 0)
      std::cerr << "warning: " << gamma_label(rep.gammas[gi]) << ": "
                << rep.small_angle_warnings[gi]
                << " windows exceeded the 0.3 rad small-angle bound\n";
  std::cout << table2_csv(rep);
  std::cout << "bench wall time: " << io::fmt(secs) << " s\nwrote " << (dir / "table2.csv").string()
            << ", snr.csv, loss_curves.csv, report.json, checkpoints\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gyrocompassing simulation and benchmarking workbench"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string mode_flag, axis_flag, checkpoint_flag;
  double amplitude_flag = -1.0, gamma_flag = -1.0, frequency_flag = 0.0;

  CLI::App* simulate = app.add_subcommand("simulate", "Write disturbance-response trajectories");
  add_common(simulate, opts);
  simulate->add_option("--mode", mode_flag, "impulse | step | sinusoid (default: all three)");
  simulate->add_option("--axis", axis_flag, "roll | pitch | yaw");
  simulate->add_option("--amplitude", amplitude_flag, "Forcing amplitude, N*m")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--gamma", gamma_flag, "Torque-to-inertia ratio (alternative to amplitude)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--frequency", frequency_flag, "Sinusoid frequency, rad/s")
      ->check(CLI::PositiveNumber);

  CLI::App* augment = app.add_subcommand("augment", "Build and write the labeled dataset");
  add_common(augment, opts);

  CLI::App* train_cmd = app.add_subcommand("train", "Train the heading regressor on a dataset");
  add_common(train_cmd, opts);

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate all methods on the test split");
  add_common(eval_cmd, opts);
  eval_cmd->add_option("--checkpoint", checkpoint_flag, "Checkpoint path override");

  CLI::App* bench = app.add_subcommand("bench", "Run the full gamma-grid benchmark");
  add_common(bench, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return cmd_simulate(opts, mode_flag, amplitude_flag, gamma_flag, frequency_flag, axis_flag);
    if (augment->parsed()) return cmd_augment(opts);
    if (train_cmd->parsed()) return cmd_train(opts);
    if (eval_cmd->parsed()) return cmd_eval(opts, checkpoint_flag);
    if (bench->parsed()) return cmd_bench(opts);
  } catch (const gclab::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
