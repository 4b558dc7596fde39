#pragma once

#include <optional>
#include <vector>

#include "nanoexplore/arena.hpp"
#include "nanoexplore/random.hpp"
#include "nanoexplore/vehicle.hpp"

namespace nanoexplore {

// Shared settings of the single-beam ranging bank (front, left, right, back).
struct TofConfig {
  double max_range = 4.0;   // m
  double rate_hz = 20.0;
  double noise_sigma = 0.0;  // m
};

// Beam mounts relative to the body heading.
namespace tof_mount {
inline constexpr double front = 0.0;
inline constexpr double left = 1.5707963267948966;
inline constexpr double right = -1.5707963267948966;
inline constexpr double back = 3.141592653589793;
}  // namespace tof_mount

struct TofFrame {
  double front = 0.0;
  double left = 0.0;
  double right = 0.0;
  double back = 0.0;
  double t = 0.0;

  bool operator==(const TofFrame&) const = default;
};

struct CameraModel {
  double fov = 1.1;               // rad, horizontal
  double max_detect_range = 1.0;  // m; a 10 cm object spans ~29 px here, ~15 px at 2 m
};

// One beam: min(raycast, max_range) plus optional noise, kept in
// [0.001, max_range].
double sample_beam(const Arena& arena, const VehicleState& state, double mount, const TofConfig& cfg,
                   Rng& rng);

// Fresh reading of all four beams at the vehicle's current pose.
TofFrame sample_tof(const Arena& arena, const VehicleState& state, const TofConfig& cfg, Rng& rng);

// Zero-order hold between ranging ticks. The sensor refreshes on every
// 1/rate_hz boundary; control ticks in between see the previous frame.
class TofRanger {
 public:
  explicit TofRanger(TofConfig cfg) : cfg_(cfg) {}

  const TofFrame& read(const Arena& arena, const VehicleState& state, Rng& rng);
  const TofConfig& config() const { return cfg_; }

 private:
  TofConfig cfg_;
  std::optional<TofFrame> held_;
  long long last_tick_ = -1;
};

std::vector<int> objects_in_fov(const Arena& arena, const VehicleState& state, const CameraModel& cam);

}  // namespace nanoexplore
