#include "nanoexplore/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nanoexplore {

using json = nlohmann::ordered_json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::vector<std::string> split_dotted(std::string_view key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    parts.emplace_back(key.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

void merge_into(json& base, const json& user, const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + path + "'");
    json& slot = base[it.key()];
    // `arena` accepts a path, an inline document, or null; it is not merged.
    if (slot.is_object() && it.value().is_object() && path != "arena") {
      merge_into(slot, it.value(), path);
    } else {
      slot = it.value();
    }
  }
}

template <class T>
T get_as(const json& doc, const char* section, const char* key) {
  const std::string path = std::string(section) + "." + key;
  try {
    return doc.at(section).at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + path + "' has the wrong type");
  }
}

double num(const json& doc, const char* section, const char* key) {
  const json& v = doc.at(section).at(key);
  if (!v.is_number()) throw ConfigError(std::string("config key '") + section + "." + key + "' must be a number");
  return v.get<double>();
}

std::optional<DetectorModel> detector_from_config(const json& v, const char* path) {
  if (!v.is_string()) throw ConfigError(std::string(path) + " must be a detector token string");
  const std::string token = v.get<std::string>();
  if (token == "none") return std::nullopt;
  try {
    return detector_from_token(token);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(path) + ": " + e.what());
  }
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"schema_version", "1", "config schema version"},
      {"arena", "null", "arena document: null = built-in 6.5 x 5.5 m room with 6 objects, a path, or an inline object"},
      {"run.duration", "180", "mission length, s (3 minute flights)"},
      {"run.control_dt", "0.02", "control tick, s (50 Hz tracking rate)"},
      {"run.seed", "42", "seed of a single run"},
      {"run.start_x", "null", "start x, m (null = room center)"},
      {"run.start_y", "null", "start y, m (null = room center)"},
      {"run.start_heading_deg", "0", "start heading, degrees counter-clockwise from +x"},
      {"policy.kind", "pseudo-random", "pseudo-random | wall-following | spiral | rotate-and-measure"},
      {"policy.cruise_speed", "0.5", "mean flight speed, m/s (0.1 | 0.5 | 1.0 in the sweep)"},
      {"policy.trigger_dist", "1.0", "front obstacle distance that triggers a pseudo-random turn or ends a leg, m"},
      {"policy.wall_standoff", "0.5", "lateral distance held by wall-following and the outer spiral ring, m"},
      {"policy.spiral_step", "0.5", "spiral ring offset change per lap, m"},
      {"policy.scan_step_deg", "45", "rotate-and-measure sampling interval, degrees"},
      {"policy.leg_max", "2.0", "longest rotate-and-measure travel leg, m"},
      {"policy.turn_rate", "1.5", "in-place turn rate and yaw-rate clamp, rad/s"},
      {"policy.wall_gain", "1.5", "proportional standoff gain, rad/s per m"},
      {"policy.error_limit", "0.3", "standoff error clamp, m (bounds the approach angle when changing rings)"},
      {"policy.corner_margin", "0.1", "front <= standoff + margin starts a corner turn, m"},
      {"policy.capture_range", "1.0", "side reading beyond standoff + range counts as no wall, m"},
      {"policy.heading_tolerance", "0.05", "heading error that ends a turn, rad"},
      {"policy.random_turn_min_deg", "90", "smallest pseudo-random turn, degrees"},
      {"policy.random_turn_max_deg", "270", "largest pseudo-random turn (exclusive), degrees"},
      {"policy.side_guard", "0.2", "lateral reading that also counts as an obstacle for cruising, m"},
      {"policy.follow_side", "left", "wall kept on this side: left | right"},
      {"detector.model", "ssd-1.0", "ssd-1.0 (1.6 FPS, p 0.50) | ssd-0.75 (2.3 FPS, p 0.48) | ssd-0.5 (4.3 FPS, p 0.32) | none"},
      {"detector.fps", "null", "override inference rate, Hz"},
      {"detector.p_detect", "null", "override per-frame detection probability"},
      {"tof.max_range", "4.0", "ranging saturation distance, m"},
      {"tof.rate_hz", "20", "ranging refresh rate, Hz"},
      {"tof.noise_sigma", "0", "Gaussian ranging noise, m"},
      {"camera.fov_deg", "63.025", "horizontal field of view, degrees (1.1 rad)"},
      {"camera.max_range", "1.0", "largest distance at which an object can be recognised, m"},
      {"vehicle.radius", "0.05", "airframe radius for collision checks, m (10 cm diameter)"},
      {"vehicle.v_max", "1.0", "forward speed limit, m/s"},
      {"vehicle.omega_max", "2.0", "yaw-rate limit, rad/s"},
      {"grid.cell_size", "0.5", "occupancy cell edge, m (143 cells in the default room)"},
      {"grid.heatmap_saturation", "18", "dwell time rendered as white, s"},
      {"energy.p_motors", "7.32", "motor power, W"},
      {"energy.p_cf", "0.277", "flight controller electronics power, W"},
      {"energy.p_aideck", "0.134", "AI-deck power, W"},
      {"energy.p_multiranger", "0.286", "ranging deck power, W"},
      {"energy.p_total", "8.02", "measured total platform power, W"},
      {"sweep.policies", "[all four]", "policies in a sweep"},
      {"sweep.speeds", "[0.1, 0.5, 1.0]", "cruise speeds in a sweep, m/s"},
      {"sweep.detectors", "[\"ssd-1.0\"]", "detectors in a sweep (\"none\" allowed)"},
      {"sweep.runs_per_config", "5", "runs per (policy, speed, detector)"},
      {"sweep.base_seed", "2023", "base seed mixed into every run seed"},
      {"sweep.jobs", "1", "worker threads; results do not depend on it"},
  };
  return keys;
}

json default_config_json() {
  return json{
      {"schema_version", kSchemaVersion},
      {"arena", nullptr},
      {"run",
       {{"duration", 180.0},
        {"control_dt", 0.02},
        {"seed", 42},
        {"start_x", nullptr},
        {"start_y", nullptr},
        {"start_heading_deg", 0.0}}},
      {"policy",
       {{"kind", "pseudo-random"},
        {"cruise_speed", 0.5},
        {"trigger_dist", 1.0},
        {"wall_standoff", 0.5},
        {"spiral_step", 0.5},
        {"scan_step_deg", 45.0},
        {"leg_max", 2.0},
        {"turn_rate", 1.5},
        {"wall_gain", 1.5},
        {"error_limit", 0.3},
        {"corner_margin", 0.1},
        {"capture_range", 1.0},
        {"heading_tolerance", 0.05},
        {"random_turn_min_deg", 90.0},
        {"random_turn_max_deg", 270.0},
        {"side_guard", 0.2},
        {"follow_side", "left"}}},
      {"detector", {{"model", "ssd-1.0"}, {"fps", nullptr}, {"p_detect", nullptr}}},
      {"tof", {{"max_range", 4.0}, {"rate_hz", 20.0}, {"noise_sigma", 0.0}}},
      {"camera", {{"fov_deg", 1.1 / kDeg}, {"max_range", 1.0}}},
      {"vehicle", {{"radius", 0.05}, {"v_max", 1.0}, {"omega_max", 2.0}}},
      {"grid", {{"cell_size", 0.5}, {"heatmap_saturation", 18.0}}},
      {"energy",
       {{"p_motors", 7.32}, {"p_cf", 0.277}, {"p_aideck", 0.134}, {"p_multiranger", 0.286}, {"p_total", 8.02}}},
      {"sweep",
       {{"policies", {"pseudo-random", "wall-following", "spiral", "rotate-and-measure"}},
        {"speeds", {0.1, 0.5, 1.0}},
        {"detectors", {"ssd-1.0"}},
        {"runs_per_config", 5},
        {"base_seed", 2023},
        {"jobs", 1}}},
  };
}

void merge_config(json& base, const json& user) {
  if (!user.is_object()) throw ConfigError("config document must be a JSON object");
  merge_into(base, user, "");
}

void apply_override(json& doc, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  for (const std::string& part : split_dotted(key)) {
    if (!node->is_object() || !node->contains(part)) throw ConfigError("unknown config key '" + key + "'");
    node = &(*node)[part];
  }
  *node = value;
}

nlohmann::ordered_json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json user;
  try {
    user = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!user.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
  if (user.contains("schema_version") && user["schema_version"] != kSchemaVersion) {
    throw ConfigError("config file '" + path + "' has unsupported schema_version");
  }
  json doc = default_config_json();
  merge_config(doc, user);
  return doc;
}

ExperimentConfig parse_config(const json& doc, const std::string& base_dir) {
  if (doc.value("schema_version", 0) != kSchemaVersion) throw ConfigError("unsupported schema_version");
  ExperimentConfig out;
  RunConfig& run = out.run;

  try {
    const json& arena = doc.at("arena");
    if (arena.is_null()) {
      run.arena = default_arena();
    } else if (arena.is_string()) {
      std::filesystem::path p(arena.get<std::string>());
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      run.arena = load_arena_file(p.string());
    } else if (arena.is_object()) {
      run.arena = load_arena(arena.dump());
    } else {
      throw ConfigError("arena must be null, a path, or an inline document");
    }
  } catch (const ArenaError& e) {
    throw ConfigError(std::string("arena: ") + e.what());
  }

  run.duration = num(doc, "run", "duration");
  run.control_dt = num(doc, "run", "control_dt");
  run.seed = get_as<std::uint64_t>(doc, "run", "seed");
  const json& sx = doc.at("run").at("start_x");
  const json& sy = doc.at("run").at("start_y");
  if (sx.is_null() != sy.is_null()) throw ConfigError("run.start_x and run.start_y must be set together");
  if (!sx.is_null()) {
    run.start = StartPose{Vec2(num(doc, "run", "start_x"), num(doc, "run", "start_y")),
                          num(doc, "run", "start_heading_deg") * kDeg};
  } else if (num(doc, "run", "start_heading_deg") != 0.0) {
    run.start = StartPose{Vec2(run.arena.width / 2, run.arena.height / 2), num(doc, "run", "start_heading_deg") * kDeg};
  }

  PolicyConfig& pc = run.policy_cfg;
  try {
    run.policy = policy_from_string(get_as<std::string>(doc, "policy", "kind"));
    pc.follow_side = side_from_string(get_as<std::string>(doc, "policy", "follow_side"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  pc.cruise_speed = num(doc, "policy", "cruise_speed");
  pc.trigger_dist = num(doc, "policy", "trigger_dist");
  pc.wall_standoff = num(doc, "policy", "wall_standoff");
  pc.spiral_step = num(doc, "policy", "spiral_step");
  pc.scan_step = num(doc, "policy", "scan_step_deg") * kDeg;
  pc.leg_max = num(doc, "policy", "leg_max");
  pc.turn_rate = num(doc, "policy", "turn_rate");
  pc.wall_gain = num(doc, "policy", "wall_gain");
  pc.error_limit = num(doc, "policy", "error_limit");
  pc.corner_margin = num(doc, "policy", "corner_margin");
  pc.capture_range = num(doc, "policy", "capture_range");
  pc.heading_tolerance = num(doc, "policy", "heading_tolerance");
  pc.random_turn_min = num(doc, "policy", "random_turn_min_deg") * kDeg;
  pc.random_turn_max = num(doc, "policy", "random_turn_max_deg") * kDeg;
  pc.side_guard = num(doc, "policy", "side_guard");

  run.detector = detector_from_config(doc.at("detector").at("model"), "detector.model");
  const json& fps = doc.at("detector").at("fps");
  const json& p = doc.at("detector").at("p_detect");
  if (!fps.is_null() || !p.is_null()) {
    if (!run.detector) run.detector = DetectorModel{"custom", 1.6, 0.5, 0.0, 0.0};
    if (!fps.is_null()) run.detector->fps = num(doc, "detector", "fps");
    if (!p.is_null()) run.detector->p_detect = num(doc, "detector", "p_detect");
    run.detector->name = "custom";
  }

  run.tof.max_range = num(doc, "tof", "max_range");
  run.tof.rate_hz = num(doc, "tof", "rate_hz");
  run.tof.noise_sigma = num(doc, "tof", "noise_sigma");
  run.camera.fov = num(doc, "camera", "fov_deg") * kDeg;
  run.camera.max_detect_range = num(doc, "camera", "max_range");
  run.limits.radius = num(doc, "vehicle", "radius");
  run.limits.v_max = num(doc, "vehicle", "v_max");
  run.limits.omega_max = num(doc, "vehicle", "omega_max");
  run.cell_size = num(doc, "grid", "cell_size");
  out.heatmap.saturation = num(doc, "grid", "heatmap_saturation");
  if (!(out.heatmap.saturation > 0.0)) throw ConfigError("grid.heatmap_saturation must be > 0");
  run.energy = {num(doc, "energy", "p_motors"), num(doc, "energy", "p_cf"), num(doc, "energy", "p_aideck"),
                num(doc, "energy", "p_multiranger"), num(doc, "energy", "p_total")};

  SweepSpec& sw = out.sweep;
  sw.policies.clear();
  sw.speeds.clear();
  sw.detectors.clear();
  const json& sweep = doc.at("sweep");
  try {
    for (const auto& t : sweep.at("policies")) sw.policies.push_back(policy_from_string(t.get<std::string>()));
    for (const auto& v : sweep.at("speeds")) sw.speeds.push_back(v.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  } catch (const json::exception&) {
    throw ConfigError("sweep.policies / sweep.speeds have the wrong type");
  }
  for (const auto& d : sweep.at("detectors")) sw.detectors.push_back(detector_from_config(d, "sweep.detectors"));
  sw.runs_per_config = get_as<int>(doc, "sweep", "runs_per_config");
  sw.base_seed = get_as<std::uint64_t>(doc, "sweep", "base_seed");
  sw.jobs = get_as<int>(doc, "sweep", "jobs");

  try {
    validate(run);
    validate(sw);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  sw.base = run;
  return out;
}

}  // namespace nanoexplore
