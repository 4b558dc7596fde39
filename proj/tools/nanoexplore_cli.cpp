// Command-line driver: single missions, sweeps, reports and heatmaps.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage or config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nanoexplore/config.hpp"
#include "nanoexplore/harness.hpp"
#include "nanoexplore/metrics.hpp"

namespace fs = std::filesystem;
using namespace nanoexplore;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ArtifactError("missing artifact '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
  return out;
}

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
};

nlohmann::ordered_json build_config(const CommonOptions& common, const std::vector<std::string>& extra) {
  nlohmann::ordered_json doc =
      common.config_path.empty() ? default_config_json() : load_config_file(common.config_path);
  for (const auto& o : common.overrides) apply_override(doc, o);
  for (const auto& o : extra) apply_override(doc, o);
  return doc;
}

std::string config_dir(const CommonOptions& common) {
  if (common.config_path.empty()) return ".";
  const fs::path parent = fs::path(common.config_path).parent_path();
  return parent.empty() ? "." : parent.string();
}

std::string list_json(const std::string& csv, bool quote) {
  std::string out = "[";
  std::stringstream ss(csv);
  std::string item;
  bool first = true;
  while (std::getline(ss, item, ',')) {
    out += (first ? "" : ",") + (quote ? "\"" + item + "\"" : item);
    first = false;
  }
  return out + "]";
}

// ---- run -------------------------------------------------------------------

struct RunOptions {
  std::string policy, detector;
  double speed = -1, duration = -1;
  long long seed = -1;
};

int cmd_run(const CommonOptions& common, const RunOptions& opt) {
  std::vector<std::string> extra;
  if (!opt.policy.empty()) extra.push_back("policy.kind=\"" + opt.policy + "\"");
  if (opt.speed >= 0) extra.push_back("policy.cruise_speed=" + fixed(opt.speed, 6));
  if (!opt.detector.empty()) extra.push_back("detector.model=\"" + opt.detector + "\"");
  if (opt.seed >= 0) extra.push_back("run.seed=" + std::to_string(opt.seed));
  if (opt.duration >= 0) extra.push_back("run.duration=" + fixed(opt.duration, 6));
  const ExperimentConfig cfg = parse_config(build_config(common, extra), config_dir(common));

  const RunResult result = run_single(cfg.run);
  const fs::path out(common.out_dir);
  fs::create_directories(out);
  write_text(out / "trajectory.csv", result.trajectory_csv);
  write_text(out / "detections.csv", detections_csv(cfg.run.arena, result.ledger));
  export_heatmap(result.grid, (out / "heatmap").string(), cfg.heatmap);
  write_text(out / "summary.json", summary_json(cfg.run, result));

  std::cout << "policy " << to_string(cfg.run.policy) << " speed " << fixed(cfg.run.policy_cfg.cruise_speed, 3)
            << " detector " << detector_label(cfg.run.detector) << " seed " << cfg.run.seed << "\n"
            << "coverage " << fixed(100.0 * result.coverage, 2) << "% ("
            << result.grid.visited.count() << "/" << result.grid.cell_count() << " cells)\n";
  if (result.detection_rate) {
    std::cout << "detection rate " << fixed(100.0 * *result.detection_rate, 2) << "% ("
              << result.ledger.first_seen.size() << "/" << cfg.run.arena.objects.size() << ")\n";
  }
  std::cout << "energy " << fixed(result.energy.total, 3) << " J (AI-deck "
            << fixed(100.0 * result.energy.aideck_share(), 2) << "%)\n";
  if (result.collision.occurred) {
    std::cout << "collision at t=" << fixed(result.collision.time, 3) << " s\n";
  }
  std::cout << "digest " << hex64(result.digest) << "\nartifacts in " << out.string() << "\n";
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepOptions {
  int runs_per_config = -1;
  int jobs = -1;
  long long seed = -1;
  std::string policies, speeds, detectors;
};

std::string file_stem(const ConfigAggregate& a) {
  return std::string(to_string(a.policy)) + "_" + fixed(a.speed, 1) + "_" + a.detector;
}

int cmd_sweep(const CommonOptions& common, const SweepOptions& opt) {
  std::vector<std::string> extra;
  if (opt.runs_per_config >= 0) extra.push_back("sweep.runs_per_config=" + std::to_string(opt.runs_per_config));
  if (opt.jobs >= 0) extra.push_back("sweep.jobs=" + std::to_string(opt.jobs));
  if (opt.seed >= 0) extra.push_back("sweep.base_seed=" + std::to_string(opt.seed));
  if (!opt.policies.empty()) extra.push_back("sweep.policies=" + list_json(opt.policies, true));
  if (!opt.speeds.empty()) extra.push_back("sweep.speeds=" + list_json(opt.speeds, false));
  if (!opt.detectors.empty()) extra.push_back("sweep.detectors=" + list_json(opt.detectors, true));
  const ExperimentConfig cfg = parse_config(build_config(common, extra), config_dir(common));

  const SweepResult sweep = run_sweep(cfg.sweep);
  const fs::path out(common.out_dir);
  fs::create_directories(out / "heatmaps");
  write_text(out / "runs.csv", sweep_runs_csv(sweep));
  write_text(out / "aggregate.csv", sweep_aggregate_csv(sweep));
  write_text(out / "coverage_table.csv", coverage_table_csv(sweep));
  write_text(out / "series.csv", sweep_series_csv(sweep));
  bool has_detection = false;
  for (const auto& a : sweep.aggregates) has_detection |= a.detection_mean.has_value();
  if (has_detection) write_text(out / "detection_table.csv", detection_table_csv(aggregate_detection(sweep)));
  for (const auto& a : sweep.aggregates) {
    export_heatmap(a.mean_grid, (out / "heatmaps" / file_stem(a)).string(), cfg.heatmap);
  }

  std::cout << sweep.rows.size() << " runs, " << sweep.aggregates.size() << " configurations\n";
  for (const auto& a : sweep.aggregates) {
    std::printf("%-20s %.1f m/s %-9s coverage %6.2f%% (var %.4f)", std::string(to_string(a.policy)).c_str(),
                a.speed, a.detector.c_str(), 100.0 * a.coverage_mean, a.coverage_var);
    if (a.detection_mean) std::printf("  detection %6.2f%%", 100.0 * *a.detection_mean);
    if (a.collisions) std::printf("  collisions %d", a.collisions);
    std::printf("\n");
  }
  std::cout << "artifacts in " << out.string() << "\n";
  return kExitOk;
}

// ---- report ----------------------------------------------------------------

std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& name) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ArtifactError("empty artifact '" + name + "'");
  return rows;
}

int report_single(const fs::path& in, const fs::path& out) {
  nlohmann::json summary;
  try {
    summary = nlohmann::json::parse(read_text(in / "summary.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError("corrupt artifact '" + (in / "summary.json").string() + "': " + e.what());
  }
  double width, height, cell, dt;
  try {
    width = summary.at("width").get<double>();
    height = summary.at("height").get<double>();
    cell = summary.at("cell_size").get<double>();
    dt = summary.at("control_dt").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError("corrupt artifact '" + (in / "summary.json").string() + "': " + e.what());
  }

  const auto traj = parse_csv(read_text(in / "trajectory.csv"), "trajectory.csv");
  const auto dets = parse_csv(read_text(in / "detections.csv"), "detections.csv");

  OccupancyGrid grid = make_grid(width, height, cell);
  std::vector<std::pair<double, double>> series;
  try {
    for (std::size_t i = 1; i < traj.size(); ++i) {
      if (traj[i].size() < 3) throw ArtifactError("malformed trajectory row " + std::to_string(i));
      const double t = std::stod(traj[i][0]);
      mark(grid, Vec2(std::stod(traj[i][1]), std::stod(traj[i][2])), dt, width, height);
      series.emplace_back(t + dt, coverage(grid));
    }
  } catch (const std::invalid_argument&) {
    throw ArtifactError("corrupt artifact '" + (in / "trajectory.csv").string() + "'");
  } catch (const std::out_of_range&) {
    throw ArtifactError("trajectory leaves the room in '" + (in / "trajectory.csv").string() + "'");
  }

  std::string series_csv = "t,coverage\n";
  for (const auto& [t, c] : series) series_csv += fixed(t, 6) + "," + fixed(c, 6) + "\n";

  std::string markers = "object_id,class,t_first_seen,coverage\n";
  std::cout << "coverage over time: " << series.size() << " samples, final "
            << fixed(100.0 * (series.empty() ? 0.0 : series.back().second), 2) << "%\n";
  std::cout << "detections (" << dets.size() - 1 << "):\n";
  for (std::size_t i = 1; i < dets.size(); ++i) {
    if (dets[i].size() != 3) throw ArtifactError("malformed detections row " + std::to_string(i));
    double t_seen;
    try {
      t_seen = std::stod(dets[i][2]);
    } catch (const std::exception&) {
      throw ArtifactError("corrupt artifact '" + (in / "detections.csv").string() + "'");
    }
    double cov = 0.0;
    for (const auto& [t, c] : series) {
      if (t > t_seen + 1e-9) break;
      cov = c;
    }
    markers += dets[i][0] + "," + dets[i][1] + "," + dets[i][2] + "," + fixed(cov, 6) + "\n";
    std::cout << "  object " << dets[i][0] << " (" << dets[i][1] << ") at " << dets[i][2] << " s, coverage "
              << fixed(100.0 * cov, 2) << "%\n";
  }
  fs::create_directories(out);
  write_text(out / "coverage_series.csv", series_csv);
  write_text(out / "detection_markers.csv", markers);
  return kExitOk;
}

int report_sweep(const fs::path& in, const fs::path& out) {
  const auto agg = parse_csv(read_text(in / "aggregate.csv"), "aggregate.csv");
  const std::vector<std::string> expected{"policy", "speed", "detector", "runs", "coverage_mean", "coverage_var",
                                          "detection_rate_mean", "detection_rate_var", "collisions"};
  if (agg.front() != expected) throw ArtifactError("unexpected header in '" + (in / "aggregate.csv").string() + "'");

  std::string text;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %6s %-9s %4s %10s %10s %10s %10s %5s\n", "policy", "speed", "detector", "runs",
                "cov_mean", "cov_var", "det_mean", "det_var", "coll");
  text += buf;
  std::string table = "policy,speed,detector,runs,coverage_mean_pct,coverage_var,detection_rate_mean_pct,"
                      "detection_rate_var\n";
  for (std::size_t i = 1; i < agg.size(); ++i) {
    const auto& r = agg[i];
    if (r.size() != expected.size()) throw ArtifactError("malformed aggregate row " + std::to_string(i));
    double cov_mean, cov_var;
    try {
      cov_mean = std::stod(r[4]);
      cov_var = std::stod(r[5]);
    } catch (const std::exception&) {
      throw ArtifactError("corrupt aggregate row " + std::to_string(i));
    }
    const std::string det_mean = r[6].empty() ? "-" : fixed(100.0 * std::stod(r[6]), 2);
    std::snprintf(buf, sizeof buf, "%-20s %6s %-9s %4s %10s %10s %10s %10s %5s\n", r[0].c_str(), r[1].c_str(),
                  r[2].c_str(), r[3].c_str(), fixed(100.0 * cov_mean, 2).c_str(), fixed(cov_var, 6).c_str(),
                  det_mean.c_str(), r[7].empty() ? "-" : r[7].c_str(), r[8].c_str());
    text += buf;
    table += r[0] + "," + r[1] + "," + r[2] + "," + r[3] + "," + fixed(100.0 * cov_mean, 2) + "," + r[5] + "," +
             (r[6].empty() ? "" : fixed(100.0 * std::stod(r[6]), 2)) + "," + r[7] + "\n";
  }
  std::cout << text;
  fs::create_directories(out);
  write_text(out / "report.txt", text);
  write_text(out / "report.csv", table);
  return kExitOk;
}

int cmd_report(const std::string& in_dir, std::string out_dir) {
  const fs::path in(in_dir);
  if (!fs::is_directory(in)) throw ArtifactError("input directory '" + in_dir + "' does not exist");
  if (out_dir.empty()) out_dir = in_dir;
  if (fs::exists(in / "aggregate.csv")) return report_sweep(in, out_dir);
  return report_single(in, out_dir);
}

// ---- heatmap ---------------------------------------------------------------

int cmd_heatmap(const std::string& in_csv, std::string out_pgm, double saturation, int scale) {
  if (out_pgm.empty()) out_pgm = fs::path(in_csv).replace_extension(".pgm").string();
  const std::string text = read_text(in_csv);
  OccupancyGrid grid;
  try {
    grid = grid_from_dwell_csv(text);
  } catch (const std::runtime_error& e) {
    throw ArtifactError("corrupt dwell CSV '" + in_csv + "': " + e.what());
  }
  write_text(out_pgm, heatmap_pgm(grid, {saturation, scale}));
  std::cout << "wrote " << out_pgm << " (" << grid.cols() << "x" << grid.rows() << " cells)\n";
  return kExitOk;
}

std::string config_help() {
  std::string s = "\nConfig keys (JSON file via --config, or --set key=value):\n";
  char buf[512];
  for (const ConfigKey& k : config_keys()) {
    std::snprintf(buf, sizeof buf, "  %-28s default %-16s %s\n", k.key.c_str(), k.default_value.c_str(),
                  k.description.c_str());
    s += buf;
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nano-drone exploration and detection simulator"};
  app.footer(config_help());
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--set", common.overrides, "override a config key, e.g. policy.turn_rate=1.2");
    sub->add_option("--out", common.out_dir, "output directory");
  };

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "fly one mission and write its artifacts");
  add_common(run);
  run->add_option("--policy", run_opt.policy, "pseudo-random | wall-following | spiral | rotate-and-measure");
  run->add_option("--speed", run_opt.speed, "cruise speed, m/s");
  run->add_option("--detector", run_opt.detector, "ssd-1.0 | ssd-0.75 | ssd-0.5 | none");
  run->add_option("--seed", run_opt.seed, "run seed");
  run->add_option("--duration", run_opt.duration, "mission length, s");

  SweepOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand("sweep", "run every policy/speed/detector configuration");
  add_common(sweep);
  sweep->add_option("--runs-per-config", sweep_opt.runs_per_config, "runs per configuration");
  sweep->add_option("--jobs", sweep_opt.jobs, "worker threads");
  sweep->add_option("--seed", sweep_opt.seed, "base seed");
  sweep->add_option("--policies", sweep_opt.policies, "comma-separated policy tokens");
  sweep->add_option("--speeds", sweep_opt.speeds, "comma-separated speeds");
  sweep->add_option("--detectors", sweep_opt.detectors, "comma-separated detector tokens");

  std::string report_in, report_out;
  CLI::App* report = app.add_subcommand("report", "render tables and coverage-over-time series from artifacts");
  report->add_option("--in", report_in, "run or sweep output directory")->required();
  report->add_option("--out", report_out, "output directory (default: --in)");

  std::string heat_in, heat_out;
  double saturation = 18.0;
  int scale = 32;
  CLI::App* heatmap = app.add_subcommand("heatmap", "render a PGM heatmap from a dwell CSV");
  heatmap->add_option("--in", heat_in, "dwell CSV")->required();
  heatmap->add_option("--out", heat_out, "PGM path (default: input with .pgm)");
  heatmap->add_option("--saturation", saturation, "dwell seconds rendered white")->check(CLI::PositiveNumber);
  heatmap->add_option("--scale", scale, "pixels per cell edge")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(common, run_opt);
    if (*sweep) return cmd_sweep(common, sweep_opt);
    if (*report) return cmd_report(report_in, report_out);
    if (*heatmap) return cmd_heatmap(heat_in, heat_out, saturation, scale);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
