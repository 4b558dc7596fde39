#include "nanoexplore/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "nanoexplore/random.hpp"

namespace nanoexplore {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

StartPose resolve_start(const RunConfig& cfg) {
  if (cfg.start) return *cfg.start;
  return {Vec2(cfg.arena.width / 2, cfg.arena.height / 2), 0.0};
}

void validate(const RunConfig& cfg) {
  validate(cfg.arena);
  validate(cfg.policy_cfg, cfg.tof.max_range);
  if (cfg.detector) validate(*cfg.detector);
  validate(cfg.energy);
  if (!(cfg.duration > 0.0)) throw std::invalid_argument("run.duration must be > 0");
  if (!(cfg.control_dt > 0.0)) throw std::invalid_argument("run.control_dt must be > 0");
  if (!(cfg.cell_size > 0.0)) throw std::invalid_argument("grid.cell_size must be > 0");
  if (!(cfg.tof.max_range > 0.0)) throw std::invalid_argument("tof.max_range must be > 0");
  if (!(cfg.tof.rate_hz > 0.0)) throw std::invalid_argument("tof.rate_hz must be > 0");
  if (!(cfg.tof.noise_sigma >= 0.0)) throw std::invalid_argument("tof.noise_sigma must be >= 0");
  if (!(cfg.camera.fov > 0.0 && cfg.camera.fov < std::numbers::pi)) {
    throw std::invalid_argument("camera.fov must lie in (0, 180) degrees");
  }
  if (!(cfg.camera.max_detect_range > 0.0)) throw std::invalid_argument("camera.max_range must be > 0");
  if (!(cfg.limits.radius > 0.0 && cfg.limits.v_max > 0.0 && cfg.limits.omega_max > 0.0)) {
    throw std::invalid_argument("vehicle limits must be > 0");
  }
  if (cfg.policy_cfg.cruise_speed > cfg.limits.v_max) {
    throw std::invalid_argument("policy.cruise_speed exceeds vehicle.v_max");
  }
  if (cfg.policy_cfg.turn_rate > cfg.limits.omega_max) {
    throw std::invalid_argument("policy.turn_rate exceeds vehicle.omega_max");
  }
  const StartPose start = resolve_start(cfg);
  VehicleState s;
  s.position = start.position;
  if (!in_free_space(cfg.arena, start.position) || check_collision(cfg.arena, s, cfg.limits.radius)) {
    throw std::invalid_argument("start pose is not in free space");
  }
}

namespace {

constexpr std::uint64_t kPolicyStream = 0x706f6c6963790001ULL;
constexpr std::uint64_t kTofStream = 0x746f660000000002ULL;
constexpr std::uint64_t kDetectStream = 0x6465746563740003ULL;

void append_row(std::string& out, double t, double x, double y, double heading, const Setpoint& sp) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", t, x, y, heading, sp.v_cmd, sp.omega_cmd);
  out += buf;
}

// Position as written to the log, so the log alone reproduces the grid.
double logged(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return std::strtod(buf, nullptr);
}

long long tick_count(double duration, double dt) {
  return static_cast<long long>(std::floor(duration / dt + 1e-9));
}

}  // namespace

RunResult run_single(const RunConfig& cfg, const RunObserver& observer) {
  validate(cfg);
  const Arena& arena = cfg.arena;
  const double dt = cfg.control_dt;
  const long long n_ticks = tick_count(cfg.duration, dt);
  const long long ticks_per_second = std::max(1LL, std::llround(1.0 / dt));

  Rng policy_rng(mix64(cfg.seed) ^ kPolicyStream);
  Rng tof_rng(mix64(cfg.seed) ^ kTofStream);
  Rng detect_rng(mix64(cfg.seed) ^ kDetectStream);

  PolicyConfig pcfg = cfg.policy_cfg;
  pcfg.spiral_limit = std::min(arena.width, arena.height) / 2 - cfg.limits.radius;
  TofRanger ranger(cfg.tof);
  PolicyState pstate = initial_policy_state(cfg.policy, pcfg);

  const StartPose start = resolve_start(cfg);
  VehicleState state;
  state.position = start.position;
  state.heading = normalize_angle(start.heading);

  RunResult result;
  result.grid = make_grid(arena.width, arena.height, cfg.cell_size);

  std::string row_buf;
  std::string& log = cfg.keep_trajectory ? result.trajectory_csv : row_buf;
  log = kTrajectoryHeader;
  std::uint64_t digest = fnv1a64(log);
  if (!cfg.keep_trajectory) log.clear();

  long long next_frame = 1;
  auto frame_tick = [&](long long n) {
    return static_cast<long long>(std::floor(frame_instant(*cfg.detector, n) / dt + 1e-9));
  };

  long long k = 0;
  for (;; ++k) {
    state.t = static_cast<double>(k) * dt;

    Setpoint sp;
    if (k < n_ticks) {
      const TofFrame& tof = ranger.read(arena, state, tof_rng);
      auto next = policy_step(cfg.policy, pstate, {tof, state.heading, dt}, pcfg, policy_rng);
      pstate = std::move(next.state);
      sp = clamp_setpoint(next.setpoint, cfg.limits);
      if (observer) observer({k, state, tof, pstate, sp});

      const std::size_t before = log.size();
      append_row(log, state.t, state.position.x(), state.position.y(), state.heading, sp);
      digest = fnv1a64(std::string_view(log).substr(before), digest);
      if (!cfg.keep_trajectory) log.clear();

      mark(result.grid, Vec2(logged(state.position.x()), logged(state.position.y())), dt, arena.width,
           arena.height);
      if ((k + 1) % ticks_per_second == 0) result.coverage_per_second.push_back(coverage(result.grid));
    }

    if (cfg.detector) {
      while (frame_instant(*cfg.detector, next_frame) <= cfg.duration + 1e-9 && frame_tick(next_frame) <= k) {
        const std::vector<int> visible = objects_in_fov(arena, state, cfg.camera);
        result.ledger = attempt_detection(*cfg.detector, visible, std::move(result.ledger),
                                          frame_instant(*cfg.detector, next_frame), detect_rng);
        ++next_frame;
      }
    }

    if (k >= n_ticks) break;

    state = step(state, sp, dt);
    state.t = static_cast<double>(k + 1) * dt;
    if (check_collision(arena, state, cfg.limits.radius)) {
      result.collision = {true, state.t, state.position};
      ++k;
      break;
    }
  }

  result.ticks = std::min(k, n_ticks);
  result.elapsed = static_cast<double>(result.ticks) * dt;
  result.coverage = coverage(result.grid);
  result.digest = digest;
  result.energy = mission_energy(cfg.energy, result.elapsed);
  if (!arena.objects.empty()) result.detection_rate = detection_rate(result.ledger, arena.objects.size());
  return result;
}

OccupancyGrid grid_from_trajectory(const std::string& trajectory_csv, double width, double height,
                                   double cell_size, double dt) {
  OccupancyGrid grid = make_grid(width, height, cell_size);
  std::istringstream in(trajectory_csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      if (line.rfind("t,", 0) == 0) continue;
    }
    if (line.empty()) continue;
    double t, x, y;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &y) != 3) {
      throw std::runtime_error("malformed trajectory row '" + line + "'");
    }
    mark(grid, Vec2(x, y), dt, width, height);
  }
  return grid;
}

std::string detections_csv(const Arena& arena, const DetectionLedger& ledger) {
  std::string out = "object_id,class,t_first_seen\n";
  for (int id : ledger.order) {
    auto it = std::find_if(arena.objects.begin(), arena.objects.end(),
                           [id](const TargetObject& o) { return o.id == id; });
    const std::string cls = it == arena.objects.end() ? "unknown" : std::string(to_string(it->cls));
    out += std::to_string(id) + "," + cls + "," + fixed(ledger.first_seen.at(id), 6) + "\n";
  }
  return out;
}

std::string summary_json(const RunConfig& cfg, const RunResult& result) {
  // Hand-rolled so numbers keep the fixed decimal format.
  std::string s = "{\n";
  s += "  \"policy\": \"" + std::string(to_string(cfg.policy)) + "\",\n";
  s += "  \"speed\": " + fixed(cfg.policy_cfg.cruise_speed, 3) + ",\n";
  s += "  \"detector\": \"" + detector_label(cfg.detector) + "\",\n";
  s += "  \"seed\": " + std::to_string(cfg.seed) + ",\n";
  s += "  \"duration\": " + fixed(cfg.duration, 3) + ",\n";
  s += "  \"elapsed\": " + fixed(result.elapsed, 3) + ",\n";
  s += "  \"coverage\": " + fixed(result.coverage, 6) + ",\n";
  s += "  \"detection_rate\": " + (result.detection_rate ? fixed(*result.detection_rate, 6) : "null") + ",\n";
  s += "  \"objects\": " + std::to_string(cfg.arena.objects.size()) + ",\n";
  s += "  \"collision\": " + std::string(result.collision.occurred ? "true" : "false") + ",\n";
  s += "  \"collision_time\": " + (result.collision.occurred ? fixed(result.collision.time, 3) : "null") + ",\n";
  s += "  \"energy_j\": " + fixed(result.energy.total, 3) + ",\n";
  s += "  \"aideck_share_pct\": " + fixed(100.0 * result.energy.aideck_share(), 2) + ",\n";
  s += "  \"frames_fired\": " + std::to_string(result.ledger.frames_fired) + ",\n";
  s += "  \"digest\": \"" + hex64(result.digest) + "\",\n";
  s += "  \"width\": " + fixed(cfg.arena.width, 3) + ",\n";
  s += "  \"height\": " + fixed(cfg.arena.height, 3) + ",\n";
  s += "  \"cell_size\": " + fixed(cfg.cell_size, 3) + ",\n";
  s += "  \"control_dt\": " + fixed(cfg.control_dt, 6) + "\n";
  s += "}\n";
  return s;
}

// ---- sweeps ----------------------------------------------------------------

void validate(const SweepSpec& spec) {
  if (spec.policies.empty()) throw std::invalid_argument("sweep.policies must be non-empty");
  if (spec.speeds.empty()) throw std::invalid_argument("sweep.speeds must be non-empty");
  if (spec.detectors.empty()) throw std::invalid_argument("sweep.detectors must be non-empty");
  if (spec.runs_per_config < 1) throw std::invalid_argument("sweep.runs_per_config must be >= 1");
  if (spec.jobs < 1) throw std::invalid_argument("sweep.jobs must be >= 1");
}

std::uint64_t derive_seed(std::uint64_t base_seed, PolicyKind policy, double speed, int run) {
  const std::string key = "policy=" + std::string(to_string(policy)) + ";speed=" + fixed(speed, 6);
  const std::uint64_t config_hash = fnv1a64(key);
  return mix64(base_seed ^ mix64(config_hash ^ mix64(static_cast<std::uint64_t>(run))));
}

std::string detector_label(const std::optional<DetectorModel>& detector) {
  return detector ? detector->name : "none";
}

namespace {

struct Job {
  PolicyKind policy;
  double speed;
  std::optional<DetectorModel> detector;
  int run;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);
  std::vector<Job> jobs;
  for (PolicyKind p : spec.policies) {
    for (double v : spec.speeds) {
      for (const auto& d : spec.detectors) {
        for (int r = 0; r < spec.runs_per_config; ++r) jobs.push_back({p, v, d, r});
      }
    }
  }

  std::vector<RunResult> results(jobs.size());
  std::vector<std::uint64_t> seeds(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      try {
        RunConfig cfg = spec.base;
        cfg.policy = job.policy;
        cfg.policy_cfg.cruise_speed = job.speed;
        cfg.detector = job.detector;
        cfg.seed = derive_seed(spec.base_seed, job.policy, job.speed, job.run);
        cfg.keep_trajectory = false;
        seeds[i] = cfg.seed;
        results[i] = run_single(cfg);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(SweepError(
              "run failed for policy=" + std::string(to_string(job.policy)) + " speed=" + fixed(job.speed, 3) +
              " detector=" + detector_label(job.detector) + " run=" + std::to_string(job.run) + ": " + e.what()));
        }
        next = jobs.size();
      }
    }
  };

  const int n_threads = std::min<int>(spec.jobs, static_cast<int>(jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const RunResult& r = results[i];
    out.rows.push_back({jobs[i].policy, jobs[i].speed, detector_label(jobs[i].detector), jobs[i].run, seeds[i],
                        r.coverage, r.detection_rate, r.collision.occurred, r.energy.total, r.digest});
  }

  const auto per_config = static_cast<std::size_t>(spec.runs_per_config);
  for (std::size_t start = 0; start < jobs.size(); start += per_config) {
    ConfigAggregate agg;
    agg.policy = jobs[start].policy;
    agg.speed = jobs[start].speed;
    agg.detector = detector_label(jobs[start].detector);
    agg.runs = spec.runs_per_config;

    std::vector<double> cov, det;
    agg.mean_grid = results[start].grid;
    agg.mean_grid.dwell.setZero();
    agg.mean_grid.visited.setConstant(false);
    std::size_t series_len = 0;
    for (std::size_t i = start; i < start + per_config; ++i) {
      const RunResult& r = results[i];
      cov.push_back(r.coverage);
      if (r.detection_rate) det.push_back(*r.detection_rate);
      if (r.collision.occurred) ++agg.collisions;
      agg.mean_grid.dwell += r.grid.dwell;
      agg.mean_grid.visited = agg.mean_grid.visited || r.grid.visited;
      series_len = std::max(series_len, r.coverage_per_second.size());
    }
    agg.mean_grid.dwell /= static_cast<double>(per_config);
    agg.coverage_mean = mean_of(cov);
    agg.coverage_var = var_of(cov);
    if (det.size() == per_config) {
      agg.detection_mean = mean_of(det);
      agg.detection_var = var_of(det);
    }
    for (std::size_t s = 0; s < series_len; ++s) {
      std::vector<double> at;
      for (std::size_t i = start; i < start + per_config; ++i) {
        const auto& series = results[i].coverage_per_second;
        // A run cut short by a collision keeps its final coverage.
        at.push_back(series.empty() ? 0.0 : series[std::min(s, series.size() - 1)]);
      }
      agg.series_mean.push_back(mean_of(at));
      agg.series_var.push_back(var_of(at));
    }
    out.aggregates.push_back(std::move(agg));
  }
  return out;
}

std::optional<double> DetectionTable::at(const std::string& detector, double speed, PolicyKind policy) const {
  auto it = cells.find({detector, speed, policy});
  if (it == cells.end()) return std::nullopt;
  return it->second;
}

DetectionTable aggregate_detection(const SweepResult& sweep) {
  DetectionTable table;
  auto add_unique = [](auto& vec, const auto& v) {
    if (std::find(vec.begin(), vec.end(), v) == vec.end()) vec.push_back(v);
  };
  for (const ConfigAggregate& a : sweep.aggregates) {
    if (a.detector == "none") continue;
    if (!a.detection_mean) {
      throw std::invalid_argument("detection rate undefined for policy=" + std::string(to_string(a.policy)) +
                                  " (arena has no objects)");
    }
    add_unique(table.detectors, a.detector);
    add_unique(table.speeds, a.speed);
    add_unique(table.policies, a.policy);
    table.cells[{a.detector, a.speed, a.policy}] = *a.detection_mean;
  }
  return table;
}

std::string sweep_runs_csv(const SweepResult& sweep) {
  std::string out = "policy,speed,detector,run,seed,coverage,detection_rate,collision,energy_j,digest\n";
  for (const SweepRow& r : sweep.rows) {
    out += std::string(to_string(r.policy)) + "," + fixed(r.speed, 3) + "," + r.detector + "," +
           std::to_string(r.run) + "," + std::to_string(r.seed) + "," + fixed(r.coverage, 6) + "," +
           (r.detection_rate ? fixed(*r.detection_rate, 6) : "") + "," + (r.collision ? "1" : "0") + "," +
           fixed(r.energy_j, 3) + "," + hex64(r.digest) + "\n";
  }
  return out;
}

std::string sweep_aggregate_csv(const SweepResult& sweep) {
  std::string out =
      "policy,speed,detector,runs,coverage_mean,coverage_var,detection_rate_mean,detection_rate_var,collisions\n";
  for (const ConfigAggregate& a : sweep.aggregates) {
    out += std::string(to_string(a.policy)) + "," + fixed(a.speed, 3) + "," + a.detector + "," +
           std::to_string(a.runs) + "," + fixed(a.coverage_mean, 6) + "," + fixed(a.coverage_var, 6) + "," +
           (a.detection_mean ? fixed(*a.detection_mean, 6) : "") + "," +
           (a.detection_var ? fixed(*a.detection_var, 6) : "") + "," + std::to_string(a.collisions) + "\n";
  }
  return out;
}

std::string sweep_series_csv(const SweepResult& sweep) {
  std::string out = "policy,speed,detector,t,coverage_mean,coverage_var\n";
  for (const ConfigAggregate& a : sweep.aggregates) {
    for (std::size_t s = 0; s < a.series_mean.size(); ++s) {
      out += std::string(to_string(a.policy)) + "," + fixed(a.speed, 3) + "," + a.detector + "," +
             fixed(static_cast<double>(s + 1), 3) + "," + fixed(a.series_mean[s], 6) + "," +
             fixed(a.series_var[s], 6) + "\n";
    }
  }
  return out;
}

std::string detection_table_csv(const DetectionTable& table) {
  std::string out = "detector,speed";
  for (PolicyKind p : table.policies) out += "," + std::string(to_string(p));
  out += "\n";
  for (const std::string& d : table.detectors) {
    for (double v : table.speeds) {
      out += d + "," + fixed(v, 3);
      for (PolicyKind p : table.policies) {
        const auto cell = table.at(d, v, p);
        out += "," + (cell ? fixed(*cell, 6) : std::string());
      }
      out += "\n";
    }
  }
  return out;
}

std::string coverage_table_csv(const SweepResult& sweep) {
  std::vector<PolicyKind> policies;
  std::vector<double> speeds;
  for (const ConfigAggregate& a : sweep.aggregates) {
    if (std::find(policies.begin(), policies.end(), a.policy) == policies.end()) policies.push_back(a.policy);
    if (std::find(speeds.begin(), speeds.end(), a.speed) == speeds.end()) speeds.push_back(a.speed);
  }
  std::string out = "policy";
  for (double v : speeds) out += ",speed_" + fixed(v, 3);
  out += "\n";
  for (PolicyKind p : policies) {
    out += std::string(to_string(p));
    for (double v : speeds) {
      // Averaged over detectors; coverage does not depend on the detector.
      double sum = 0.0;
      int n = 0;
      for (const ConfigAggregate& a : sweep.aggregates) {
        if (a.policy == p && a.speed == v) {
          sum += a.coverage_mean;
          ++n;
        }
      }
      out += "," + (n ? fixed(sum / n, 6) : std::string());
    }
    out += "\n";
  }
  return out;
}

}  // namespace nanoexplore
