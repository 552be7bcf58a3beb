#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "gclab/augment.hpp"
#include "gclab/errors.hpp"
#include "gclab/learner.hpp"
#include "gclab/rng.hpp"

namespace gclab::io {

using json = nlohmann::ordered_json;

/// 17-significant-digit decimal rendering; round-trips any double exactly
/// and is locale-independent.
inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

inline std::string fmt(int v) { return std::to_string(v); }

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw input_error("parse: bad floating-point field '" + std::string(s) + "'");
  return v;
}

inline long parse_long(std::string_view s) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw input_error("parse: bad integer field '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw input_error("io: cannot open for writing: " + path.string());
  f << content;
  if (!f) throw input_error("io: write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw input_error("io: missing file: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Dataset files: meta.json + one CSV per split with per-sample rows.

inline json disturbance_to_json(const DisturbanceSpec& d) {
  return json{{"mode", mode_name(d.mode)},
              {"axis", axis_name(d.axis)},
              {"amplitude", d.amplitude},
              {"frequency", d.frequency},
              {"phase", d.phase},
              {"onset", d.onset}};
}

inline DisturbanceMode mode_from_name(const std::string& s) {
  if (s == "impulse") return DisturbanceMode::impulse;
  if (s == "step") return DisturbanceMode::step;
  if (s == "sinusoid") return DisturbanceMode::sinusoid;
  throw input_error("io: unknown disturbance mode '" + s + "'");
}

inline Axis axis_from_name(const std::string& s) {
  if (s == "roll") return Axis::roll;
  if (s == "pitch") return Axis::pitch;
  if (s == "yaw") return Axis::yaw;
  throw input_error("io: unknown axis '" + s + "'");
}

inline DisturbanceSpec disturbance_from_json(const json& j) {
  DisturbanceSpec d;
  d.mode = mode_from_name(j.at("mode").get<std::string>());
  d.axis = axis_from_name(j.at("axis").get<std::string>());
  d.amplitude = j.at("amplitude").get<double>();
  d.frequency = j.at("frequency").get<double>();
  d.phase = j.at("phase").get<double>();
  d.onset = j.at("onset").get<double>();
  return d;
}

inline json dataset_meta_json(const LabeledDataset& ds, const SplitIndices& split) {
  json meta;
  meta["schema_version"] = 1;
  meta["sample_rate"] = ds.sample_rate;
  meta["geo"] = {{"latitude", ds.geo.latitude}, {"earth_rate", ds.geo.earth_rate}};
  meta["vehicle"] = {{"mass", ds.vehicle.mass},
                     {"radius", ds.vehicle.radius},
                     {"length", ds.vehicle.length},
                     {"z_gravity", ds.vehicle.z_gravity},
                     {"z_buoyancy", ds.vehicle.z_buoyancy},
                     {"weight", ds.vehicle.weight},
                     {"buoyancy", ds.vehicle.buoyancy},
                     {"damping", {ds.vehicle.damping(0), ds.vehicle.damping(1),
                                  ds.vehicle.damping(2)}}};
  json m_rows = json::array();
  for (int r = 0; r < 3; ++r)
    m_rows.push_back({ds.gyro.scale_misalignment(r, 0), ds.gyro.scale_misalignment(r, 1),
                      ds.gyro.scale_misalignment(r, 2)});
  meta["gyro"] = {{"scale_misalignment", m_rows},
                  {"bias", {ds.gyro.bias(0), ds.gyro.bias(1), ds.gyro.bias(2)}},
                  {"noise_density",
                   {ds.gyro.noise_density(0), ds.gyro.noise_density(1), ds.gyro.noise_density(2)}}};
  const AugmentConfig& c = ds.config;
  meta["augment"] = {{"gamma_lo", c.gamma_lo},
                     {"gamma_hi", c.gamma_hi},
                     {"weight_impulse", c.weight_impulse},
                     {"weight_step", c.weight_step},
                     {"weight_sinusoid", c.weight_sinusoid},
                     {"frequency_lo", c.frequency_lo},
                     {"frequency_hi", c.frequency_hi},
                     {"phase_lo", c.phase_lo},
                     {"phase_hi", c.phase_hi},
                     {"headings", c.headings},
                     {"per_heading_count", c.per_heading_count},
                     {"window_length", c.window_length},
                     {"include_yaw_axis", c.include_yaw_axis},
                     {"seed", c.seed}};
  meta["small_angle_warnings"] = ds.small_angle_warnings;
  json items = json::array();
  for (const DatasetItem& it : ds.items) {
    json ji = disturbance_to_json(it.disturbance);
    ji["id"] = it.id;
    ji["heading"] = it.heading;
    ji["gamma"] = it.gamma;
    ji["noise_seed"] = it.noise_seed;
    items.push_back(std::move(ji));
  }
  meta["items"] = std::move(items);
  meta["split"] = {{"train", split.train}, {"validation", split.validation},
                   {"test", split.test}};
  return meta;
}

inline std::string dataset_split_csv(const LabeledDataset& ds, const std::vector<int>& ids) {
  std::string out = "item_id,t,p,q,r,heading_label_rad,gamma,mode\n";
  for (int id : ids) {
    const DatasetItem& it = ds.items[id];
    const std::string tail = "," + fmt(it.heading) + "," + fmt(it.gamma) + "," +
                             mode_name(it.disturbance.mode) + "\n";
    for (std::size_t i = 0; i < it.window.size(); ++i) {
      out += fmt(it.id);
      out += ',';
      out += fmt(it.window.time(i));
      out += ',';
      out += fmt(it.window.p[i]);
      out += ',';
      out += fmt(it.window.q[i]);
      out += ',';
      out += fmt(it.window.r[i]);
      out += tail;
    }
  }
  return out;
}

inline void save_dataset(const std::filesystem::path& dir, const LabeledDataset& ds,
                         const SplitIndices& split) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "meta.json", dataset_meta_json(ds, split).dump(2) + "\n");
  write_text_file(dir / "train.csv", dataset_split_csv(ds, split.train));
  write_text_file(dir / "validation.csv", dataset_split_csv(ds, split.validation));
  write_text_file(dir / "test.csv", dataset_split_csv(ds, split.test));
}

inline void load_split_csv(const std::filesystem::path& path, LabeledDataset& ds) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw input_error("io: missing dataset file: " + path.string());
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != 8) throw input_error("io: bad dataset row in " + path.string());
    const long id = parse_long(cols[0]);
    DatasetItem& it = ds.items.at(static_cast<std::size_t>(id));
    it.window.p.push_back(parse_double(cols[2]));
    it.window.q.push_back(parse_double(cols[3]));
    it.window.r.push_back(parse_double(cols[4]));
  }
}

/// Load a dataset directory written by save_dataset.
inline std::pair<LabeledDataset, SplitIndices> load_dataset(const std::filesystem::path& dir) {
  const json meta = json::parse(read_text_file(dir / "meta.json"));
  LabeledDataset ds;
  ds.sample_rate = meta.at("sample_rate").get<double>();
  ds.geo.latitude = meta.at("geo").at("latitude").get<double>();
  ds.geo.earth_rate = meta.at("geo").at("earth_rate").get<double>();
  const json& v = meta.at("vehicle");
  ds.vehicle.mass = v.at("mass").get<double>();
  ds.vehicle.radius = v.at("radius").get<double>();
  ds.vehicle.length = v.at("length").get<double>();
  ds.vehicle.z_gravity = v.at("z_gravity").get<double>();
  ds.vehicle.z_buoyancy = v.at("z_buoyancy").get<double>();
  ds.vehicle.weight = v.at("weight").get<double>();
  ds.vehicle.buoyancy = v.at("buoyancy").get<double>();
  for (int i = 0; i < 3; ++i) ds.vehicle.damping(i) = v.at("damping").at(i).get<double>();
  const json& g = meta.at("gyro");
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col)
      ds.gyro.scale_misalignment(r, col) = g.at("scale_misalignment").at(r).at(col).get<double>();
  for (int i = 0; i < 3; ++i) {
    ds.gyro.bias(i) = g.at("bias").at(i).get<double>();
    ds.gyro.noise_density(i) = g.at("noise_density").at(i).get<double>();
  }
  const json& a = meta.at("augment");
  AugmentConfig& c = ds.config;
  c.gamma_lo = a.at("gamma_lo").get<double>();
  c.gamma_hi = a.at("gamma_hi").get<double>();
  c.weight_impulse = a.at("weight_impulse").get<double>();
  c.weight_step = a.at("weight_step").get<double>();
  c.weight_sinusoid = a.at("weight_sinusoid").get<double>();
  c.frequency_lo = a.at("frequency_lo").get<double>();
  c.frequency_hi = a.at("frequency_hi").get<double>();
  c.phase_lo = a.at("phase_lo").get<double>();
  c.phase_hi = a.at("phase_hi").get<double>();
  c.headings = a.at("headings").get<std::vector<double>>();
  c.per_heading_count = a.at("per_heading_count").get<int>();
  c.window_length = a.at("window_length").get<int>();
  c.include_yaw_axis = a.at("include_yaw_axis").get<bool>();
  c.seed = a.at("seed").get<std::uint64_t>();
  ds.small_angle_warnings = meta.at("small_angle_warnings").get<int>();

  ds.items.resize(meta.at("items").size());
  for (const json& ji : meta.at("items")) {
    const int id = ji.at("id").get<int>();
    DatasetItem& it = ds.items.at(id);
    it.id = id;
    it.heading = ji.at("heading").get<double>();
    it.gamma = ji.at("gamma").get<double>();
    it.noise_seed = ji.at("noise_seed").get<std::uint64_t>();
    it.disturbance = disturbance_from_json(ji);
    it.window.sample_rate = ds.sample_rate;
  }
  SplitIndices split;
  split.train = meta.at("split").at("train").get<std::vector<int>>();
  split.validation = meta.at("split").at("validation").get<std::vector<int>>();
  split.test = meta.at("split").at("test").get<std::vector<int>>();
  for (const auto& p : {dir / "train.csv", dir / "validation.csv", dir / "test.csv"})
    load_split_csv(p, ds);
  return {std::move(ds), std::move(split)};
}

// ---------------------------------------------------------------------------
// Regressor checkpoint with integrity hash.

inline json checkpoint_payload(const Regressor& m) {
  json j;
  j["format"] = "gclab-checkpoint";
  j["version"] = 1;
  j["shape"] = {{"window_length", m.shape.window_length}, {"prepool", m.shape.prepool},
                {"conv_kernels", m.shape.conv_kernels},   {"conv_width", m.shape.conv_width},
                {"postpool", m.shape.postpool},           {"hidden", m.shape.hidden}};
  j["standardization"] = {
      {"mean_p", m.mean_p}, {"mean_q", m.mean_q}, {"std_p", m.std_p}, {"std_q", m.std_q}};
  j["feature_norm"] = {{"mu", m.feat_mu}, {"sigma", m.feat_sigma}};
  j["params"] = {{"conv_w", m.conv_w}, {"conv_b", m.conv_b}, {"w1", m.w1},
                 {"b1", m.b1},         {"w2", m.w2},         {"b2", m.b2}};
  return j;
}

inline std::string checkpoint_string(const Regressor& m) {
  json j = checkpoint_payload(m);
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(rng::fnv1a64(j.dump())));
  j["integrity"] = hex;
  return j.dump(2) + "\n";
}

inline void save_checkpoint(const std::filesystem::path& path, const Regressor& m) {
  write_text_file(path, checkpoint_string(m));
}

inline Regressor load_checkpoint(const std::filesystem::path& path) {
  json j = json::parse(read_text_file(path));
  if (!j.contains("integrity")) throw integrity_error("checkpoint: missing integrity field");
  const std::string stored = j.at("integrity").get<std::string>();
  j.erase("integrity");
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(rng::fnv1a64(j.dump())));
  if (stored != hex)
    throw integrity_error("checkpoint: integrity hash mismatch in " + path.string());
  if (j.at("format").get<std::string>() != "gclab-checkpoint")
    throw integrity_error("checkpoint: unknown format");
  Regressor m;
  const json& s = j.at("shape");
  m.shape.window_length = s.at("window_length").get<int>();
  m.shape.prepool = s.at("prepool").get<int>();
  m.shape.conv_kernels = s.at("conv_kernels").get<int>();
  m.shape.conv_width = s.at("conv_width").get<int>();
  m.shape.postpool = s.at("postpool").get<int>();
  m.shape.hidden = s.at("hidden").get<int>();
  const json& st = j.at("standardization");
  m.mean_p = st.at("mean_p").get<double>();
  m.mean_q = st.at("mean_q").get<double>();
  m.std_p = st.at("std_p").get<double>();
  m.std_q = st.at("std_q").get<double>();
  m.feat_mu = j.at("feature_norm").at("mu").get<std::vector<double>>();
  m.feat_sigma = j.at("feature_norm").at("sigma").get<std::vector<double>>();
  const json& p = j.at("params");
  m.conv_w = p.at("conv_w").get<std::vector<double>>();
  m.conv_b = p.at("conv_b").get<std::vector<double>>();
  m.w1 = p.at("w1").get<std::vector<double>>();
  m.b1 = p.at("b1").get<std::vector<double>>();
  m.w2 = p.at("w2").get<std::vector<double>>();
  m.b2 = p.at("b2").get<std::vector<double>>();
  const auto f_n = static_cast<std::size_t>(m.shape.feature_count());
  if (m.feat_mu.size() != f_n || m.feat_sigma.size() != f_n ||
      m.w1.size() != static_cast<std::size_t>(m.shape.hidden) * f_n)
    throw integrity_error("checkpoint: tensor shapes inconsistent with declared shape");
  return m;
}

/// Per-epoch metrics CSV (columns: epoch, train_loss, val_rmse_deg).
inline std::string metrics_csv(const std::vector<EpochMetrics>& metrics) {
  std::string out = "epoch,train_loss,val_rmse_deg\n";
  for (const auto& m : metrics)
    out += fmt(m.epoch) + "," + fmt(m.train_loss) + "," + fmt(m.val_rmse_deg) + "\n";
  return out;
}

}  // namespace gclab::io
