#include "nanoexplore/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nanoexplore {

double sample_beam(const Arena& arena, const VehicleState& state, double mount, const TofConfig& cfg,
                   Rng& rng) {
  double d = std::min(raycast(arena, state.position, state.heading + mount), cfg.max_range);
  if (cfg.noise_sigma > 0.0) d = rng.gaussian(d, cfg.noise_sigma);
  return std::clamp(d, 0.001, cfg.max_range);
}

TofFrame sample_tof(const Arena& arena, const VehicleState& state, const TofConfig& cfg, Rng& rng) {
  TofFrame f;
  f.front = sample_beam(arena, state, tof_mount::front, cfg, rng);
  f.left = sample_beam(arena, state, tof_mount::left, cfg, rng);
  f.right = sample_beam(arena, state, tof_mount::right, cfg, rng);
  f.back = sample_beam(arena, state, tof_mount::back, cfg, rng);
  f.t = state.t;
  return f;
}

const TofFrame& TofRanger::read(const Arena& arena, const VehicleState& state, Rng& rng) {
  // Tolerance absorbs k*dt*rate landing a hair below an integer.
  const auto tick = static_cast<long long>(std::floor(state.t * cfg_.rate_hz + 1e-9));
  if (!held_ || tick > last_tick_) {
    held_ = sample_tof(arena, state, cfg_, rng);
    last_tick_ = tick;
  }
  return *held_;
}

std::vector<int> objects_in_fov(const Arena& arena, const VehicleState& state, const CameraModel& cam) {
  std::vector<int> ids;
  for (const TargetObject& o : arena.objects) {
    const Vec2 rel = o.position - state.position;
    const double dist = rel.norm();
    if (dist > cam.max_detect_range) continue;
    const double bearing = std::atan2(rel.y(), rel.x());
    if (std::abs(normalize_angle(bearing - state.heading)) > 0.5 * cam.fov) continue;
    if (raycast(arena, state.position, bearing) <= dist - o.radius) continue;
    ids.push_back(o.id);
  }
  return ids;
}

}  // namespace nanoexplore
