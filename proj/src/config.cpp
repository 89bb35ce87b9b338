#include "slarev/config.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace slarev {

using nlohmann::json;

std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::Omni: return "omni";
    case DesignKind::MaxFix: return "maxFIX";
    case DesignKind::MinFix: return "minFIX";
    case DesignKind::MaxDrr: return "maxDRR";
    case DesignKind::MinDrr: return "minDRR";
    case DesignKind::MaxC50: return "maxC50";
    case DesignKind::MinC50: return "minC50";
  }
  return "?";
}

DesignKind design_kind_from_string(const std::string& label) {
  for (DesignKind k : {DesignKind::Omni, DesignKind::MaxFix, DesignKind::MinFix, DesignKind::MaxDrr,
                       DesignKind::MinDrr, DesignKind::MaxC50, DesignKind::MinC50})
    if (to_string(k) == label) return k;
  throw ConfigError("unknown beamformer label '" + label + "'");
}

std::string BeamformerCell::stem() const {
  if (kind == DesignKind::Omni) return "omni";
  return label() + "_N" + std::to_string(order);
}

std::vector<BeamformerCell> standard_cells(const std::vector<int>& orders) {
  std::vector<BeamformerCell> cells{{DesignKind::Omni, 0}};
  for (DesignKind k : {DesignKind::MaxFix, DesignKind::MinFix, DesignKind::MaxDrr, DesignKind::MinDrr,
                       DesignKind::MaxC50, DesignKind::MinC50})
    for (int n : orders) cells.push_back({k, n});
  return cells;
}

void ExperimentConfig::validate() const {
  if (absorptions.empty()) throw ConfigError("room.absorption: at least one value required");
  for (double a : absorptions) room_with(a).validate();
  placement.validate(room);
  sla.validate();
  sma.validate();
  if (sla.kind != ArrayKind::Loudspeaker || sma.kind != ArrayKind::Microphone)
    throw ConfigError("arrays: kinds are fixed to loudspeaker (sla) and microphone (sma)");
  if (sla.speed_of_sound != room.speed_of_sound || sma.speed_of_sound != room.speed_of_sound)
    throw ConfigError("speed_of_sound must agree between room and arrays");
  grid.validate();
  for (double a : absorptions)
    if (grid.duration() < image_max_time(a))
      throw ConfigError("grid: fft_length / sample_rate is shorter than the image-source horizon for absorption " +
                        std::to_string(a));
  if (cells.empty()) throw ConfigError("cells: at least one beamformer cell required");
  for (const auto& c : cells) {
    if (c.order < 0 || c.order > sla.sh_order)
      throw ConfigError("cells: order " + std::to_string(c.order) + " exceeds the SLA order");
    if (c.kind != DesignKind::Omni && c.order < 1)
      throw ConfigError("cells: designed beamformers need order >= 1");
  }
  if (!(max_time_factor > 0.0)) throw ConfigError("max_time_factor must be positive");
  if (max_time && !(*max_time > 0.0)) throw ConfigError("max_time must be positive");
  noise.validate(grid);
  if (!(pwd_frequency >= grid.band_low && pwd_frequency <= grid.band_high))
    throw ConfigError("pwd.frequency outside the simulation band");
  if (!(pwd_resolution_deg > 0.0)) throw ConfigError("pwd.resolution_deg must be positive");
  if (!(pwd_floor_db > 0.0)) throw ConfigError("pwd.floor_db must be positive");
  for (double t : {split.direct_window_s, split.clarity_window_s})
    if (!(t > 0.0)) throw ConfigError("time split windows must be positive");
}

RoomSpec ExperimentConfig::room_with(double absorption) const {
  RoomSpec r = room;
  r.absorption = absorption;
  return r;
}

std::string ExperimentConfig::case_name(double absorption) const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_a%.2f", absorption);
  return name + buf;
}

double ExperimentConfig::image_max_time(double absorption) const {
  if (max_time) return *max_time;
  return max_time_factor * room_with(absorption).sabine_rt();
}

namespace {

// Walks a JSON object and rejects keys outside the allowed set.
void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key + ": required");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, const std::string& where, T fallback) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

Vector3d get_vec3(const json& obj, const std::string& key, const std::string& where) {
  const auto v = get<std::vector<double>>(obj, key, where);
  if (v.size() != 3) throw ConfigError(where + "." + key + ": expected three numbers");
  return {v[0], v[1], v[2]};
}

ArrayPhysics parse_array(const json& j, const std::string& where, ArrayPhysics base) {
  allow_keys(j, where, {"radius", "order"});
  base.radius = get_or(j, "radius", where, base.radius);
  base.sh_order = get_or(j, "order", where, base.sh_order);
  return base;
}

NoiseSpec parse_noise(const json& j, std::vector<double>& sweep) {
  const std::string w = "noise";
  allow_keys(j, w, {"snr_db", "octave_centers", "realizations", "seed", "domain"});
  NoiseSpec s;
  if (j.contains("snr_db")) {
    if (j.at("snr_db").is_null()) {
      s.snr_db = NoiseSpec::disabled().snr_db;
    } else if (j.at("snr_db").is_array()) {
      sweep = get<std::vector<double>>(j, "snr_db", w);
      if (sweep.empty()) throw ConfigError("noise.snr_db: empty list");
      s.snr_db = sweep.front();
    } else {
      s.snr_db = get<double>(j, "snr_db", w);
    }
  }
  s.octave_centers = get_or(j, "octave_centers", w, s.octave_centers);
  s.realizations = get_or(j, "realizations", w, s.realizations);
  s.seed = get_or<std::uint64_t>(j, "seed", w, s.seed);
  const auto dom = get_or<std::string>(j, "domain", w, "normalized");
  if (dom == "normalized") s.domain = NoiseDomain::Normalized;
  else if (dom == "physical") s.domain = NoiseDomain::Physical;
  else throw ConfigError("noise.domain: expected 'normalized' or 'physical'");
  return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(root, "config", {"name", "room", "placement", "sla", "sma", "air_density", "grid",
                              "regularization_db", "max_time", "max_time_factor", "time_split",
                              "orders", "cells", "noise", "pwd"});
  ExperimentConfig cfg;
  cfg.name = get_or<std::string>(root, "name", "config", cfg.name);

  const json& room = root.contains("room") ? root.at("room") : throw ConfigError("config.room: required");
  allow_keys(room, "room", {"dimensions", "absorption", "speed_of_sound"});
  cfg.room.dimensions = get_vec3(room, "dimensions", "room");
  cfg.room.speed_of_sound = get_or(room, "speed_of_sound", "room", cfg.room.speed_of_sound);
  if (!room.contains("absorption")) throw ConfigError("room.absorption: required");
  if (room.at("absorption").is_array()) cfg.absorptions = get<std::vector<double>>(room, "absorption", "room");
  else cfg.absorptions = {get<double>(room, "absorption", "room")};
  if (!cfg.absorptions.empty()) cfg.room.absorption = cfg.absorptions.front();

  const json& pl = root.contains("placement") ? root.at("placement") : throw ConfigError("config.placement: required");
  allow_keys(pl, "placement", {"sla", "sma"});
  cfg.placement.sla_position = get_vec3(pl, "sla", "placement");
  cfg.placement.sma_position = get_vec3(pl, "sma", "placement");

  if (root.contains("sla")) cfg.sla = parse_array(root.at("sla"), "sla", cfg.sla);
  if (root.contains("sma")) cfg.sma = parse_array(root.at("sma"), "sma", cfg.sma);
  const double rho = get_or(root, "air_density", "config", cfg.sla.air_density);
  for (ArrayPhysics* a : {&cfg.sla, &cfg.sma}) {
    a->air_density = rho;
    a->speed_of_sound = cfg.room.speed_of_sound;
  }

  if (root.contains("grid")) {
    const json& g = root.at("grid");
    allow_keys(g, "grid", {"sample_rate", "fft_length", "band_low", "band_high"});
    cfg.grid.sample_rate = get_or(g, "sample_rate", "grid", cfg.grid.sample_rate);
    cfg.grid.fft_length = get_or(g, "fft_length", "grid", cfg.grid.fft_length);
    cfg.grid.band_low = get_or(g, "band_low", "grid", cfg.grid.band_low);
    cfg.grid.band_high = get_or(g, "band_high", "grid", cfg.grid.band_high);
  }
  cfg.regularization.snr_db = get_or(root, "regularization_db", "config", cfg.regularization.snr_db);
  if (root.contains("max_time")) cfg.max_time = get<double>(root, "max_time", "config");
  cfg.max_time_factor = get_or(root, "max_time_factor", "config", cfg.max_time_factor);

  if (root.contains("time_split")) {
    const json& t = root.at("time_split");
    allow_keys(t, "time_split", {"direct_window_s", "clarity_window_s", "peak_tolerance"});
    cfg.split.direct_window_s = get_or(t, "direct_window_s", "time_split", cfg.split.direct_window_s);
    cfg.split.clarity_window_s = get_or(t, "clarity_window_s", "time_split", cfg.split.clarity_window_s);
    cfg.split.peak_tolerance = get_or(t, "peak_tolerance", "time_split", cfg.split.peak_tolerance);
  }

  if (root.contains("cells")) {
    if (root.contains("orders")) throw ConfigError("config: give either 'orders' or 'cells', not both");
    const json& cells = root.at("cells");
    if (!cells.is_array()) throw ConfigError("cells: expected a list");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string w = "cells[" + std::to_string(i) + "]";
      allow_keys(cells[i], w, {"label", "order"});
      cfg.cells.push_back({design_kind_from_string(get<std::string>(cells[i], "label", w)),
                           get_or(cells[i], "order", w, 0)});
    }
  } else {
    cfg.cells = standard_cells(get_or(root, "orders", "config", std::vector<int>{2, 3, 4}));
  }

  if (root.contains("noise")) cfg.noise = parse_noise(root.at("noise"), cfg.snr_sweep_db);
  if (cfg.snr_sweep_db.empty()) cfg.snr_sweep_db = {cfg.noise.snr_db};

  if (root.contains("pwd")) {
    const json& p = root.at("pwd");
    allow_keys(p, "pwd", {"frequency", "resolution_deg", "floor_db"});
    cfg.pwd_frequency = get_or(p, "frequency", "pwd", cfg.pwd_frequency);
    cfg.pwd_resolution_deg = get_or(p, "resolution_deg", "pwd", cfg.pwd_resolution_deg);
    cfg.pwd_floor_db = get_or(p, "floor_db", "pwd", cfg.pwd_floor_db);
  }

  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_profile(ExperimentConfig& config, const std::string& profile) {
  if (profile == "paper") {
    config.grid.sample_rate = 48000.0;
    config.grid.fft_length = 1 << 17;
    config.noise.realizations = 20;
  } else if (profile == "desk") {
    config.grid.sample_rate = 16000.0;
    config.grid.fft_length = 1 << 15;
    config.noise.realizations = 10;
  } else {
    throw ConfigError("unknown profile '" + profile + "' (expected paper or desk)");
  }
  config.validate();
}

}  // namespace slarev
