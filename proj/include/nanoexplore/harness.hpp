#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "nanoexplore/arena.hpp"
#include "nanoexplore/detection.hpp"
#include "nanoexplore/metrics.hpp"
#include "nanoexplore/policies.hpp"
#include "nanoexplore/sensing.hpp"
#include "nanoexplore/vehicle.hpp"

namespace nanoexplore {

struct StartPose {
  Vec2 position;
  double heading = 0.0;
};

struct RunConfig {
  Arena arena = default_arena();
  PolicyKind policy = PolicyKind::pseudo_random;
  PolicyConfig policy_cfg;
  std::optional<DetectorModel> detector = ssd_1_0();
  TofConfig tof;
  CameraModel camera;
  VehicleLimits limits;
  EnergyModel energy;
  double duration = 180.0;
  double control_dt = 0.02;
  double cell_size = 0.5;
  std::uint64_t seed = 42;
  std::optional<StartPose> start;  // room center, heading 0 when unset
  bool keep_trajectory = true;     // retain the CSV text in RunResult
};

StartPose resolve_start(const RunConfig& cfg);

// Throws std::invalid_argument on the first inconsistency.
void validate(const RunConfig& cfg);

// Per-tick view handed to an optional observer.
struct TickRecord {
  long long tick = 0;
  const VehicleState& state;
  const TofFrame& tof;
  const PolicyState& policy;
  const Setpoint& setpoint;
};

using RunObserver = std::function<void(const TickRecord&)>;

struct RunResult {
  double coverage = 0.0;
  OccupancyGrid grid;
  DetectionLedger ledger;
  std::optional<double> detection_rate;  // unset when the arena has no objects
  CollisionRecord collision;
  std::uint64_t digest = 0;  // FNV-1a of the trajectory CSV text
  EnergyBreakdown energy;
  double elapsed = 0.0;
  long long ticks = 0;
  std::vector<double> coverage_per_second;  // coverage at t = 1, 2, ... s
  std::string trajectory_csv;
};

inline constexpr const char* kTrajectoryHeader = "t,x,y,heading,v_cmd,omega_cmd\n";

// One mission: 50 Hz control (held ranging, policy, integration, collision
// check, grid mark) interleaved with detector frames at their own rate.
// Identical configs give identical digests.
RunResult run_single(const RunConfig& cfg, const RunObserver& observer = {});

// Replays a trajectory CSV into a fresh grid.
OccupancyGrid grid_from_trajectory(const std::string& trajectory_csv, double width, double height,
                                   double cell_size, double dt);

std::string detections_csv(const Arena& arena, const DetectionLedger& ledger);
std::string summary_json(const RunConfig& cfg, const RunResult& result);

// ---- sweeps ----------------------------------------------------------------

struct SweepSpec {
  std::vector<PolicyKind> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
  std::vector<double> speeds{0.1, 0.5, 1.0};
  std::vector<std::optional<DetectorModel>> detectors{ssd_1_0()};
  int runs_per_config = 5;
  std::uint64_t base_seed = 2023;
  RunConfig base;  // everything except policy, speed, detector and seed
  int jobs = 1;
};

void validate(const SweepSpec& spec);

// Seed of one run: splitmix-mixed base seed, (policy, speed) hash, and run
// index. Detectors share seeds so the same flights are compared.
std::uint64_t derive_seed(std::uint64_t base_seed, PolicyKind policy, double speed, int run);

std::string detector_label(const std::optional<DetectorModel>& detector);

struct SweepRow {
  PolicyKind policy;
  double speed = 0.0;
  std::string detector;
  int run = 0;
  std::uint64_t seed = 0;
  double coverage = 0.0;
  std::optional<double> detection_rate;
  bool collision = false;
  double energy_j = 0.0;
  std::uint64_t digest = 0;
};

struct ConfigAggregate {
  PolicyKind policy;
  double speed = 0.0;
  std::string detector;
  int runs = 0;
  double coverage_mean = 0.0;
  double coverage_var = 0.0;  // population variance
  std::optional<double> detection_mean;
  std::optional<double> detection_var;
  int collisions = 0;
  OccupancyGrid mean_grid;
  std::vector<double> series_mean;  // coverage at t = 1, 2, ... s
  std::vector<double> series_var;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<ConfigAggregate> aggregates;
};

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs every (policy, speed, detector) configuration `runs_per_config`
// times. Row order is fixed and independent of `jobs`.
SweepResult run_sweep(const SweepSpec& spec);

// Mean detection rate keyed by (detector, speed, policy).
struct DetectionTable {
  std::vector<std::string> detectors;
  std::vector<double> speeds;
  std::vector<PolicyKind> policies;
  std::map<std::tuple<std::string, double, PolicyKind>, double> cells;

  std::optional<double> at(const std::string& detector, double speed, PolicyKind policy) const;
};

// Throws std::invalid_argument if any run has no defined detection rate.
DetectionTable aggregate_detection(const SweepResult& sweep);

std::string sweep_runs_csv(const SweepResult& sweep);
std::string sweep_aggregate_csv(const SweepResult& sweep);
std::string sweep_series_csv(const SweepResult& sweep);
std::string detection_table_csv(const DetectionTable& table);
std::string coverage_table_csv(const SweepResult& sweep);

// Fixed-decimal formatting used by every artifact.
std::string fixed(double v, int decimals);
std::string hex64(std::uint64_t v);

}  // namespace nanoexplore
