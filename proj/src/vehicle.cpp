#include "nanoexplore/vehicle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace nanoexplore {

double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  r -= std::numbers::pi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (r >= std::numbers::pi) r -= two_pi;
  return r;
}

Setpoint clamp_setpoint(const Setpoint& sp, const VehicleLimits& limits) {
  return {std::clamp(sp.v_cmd, -limits.v_max, limits.v_max),
          std::clamp(sp.omega_cmd, -limits.omega_max, limits.omega_max)};
}

VehicleState step(const VehicleState& state, const Setpoint& sp, double dt) {
  assert(dt > 0.0);
  const double heading_mid = state.heading + 0.5 * sp.omega_cmd * dt;
  VehicleState next;
  next.position = state.position + sp.v_cmd * dt * Vec2(std::cos(heading_mid), std::sin(heading_mid));
  next.heading = normalize_angle(state.heading + sp.omega_cmd * dt);
  next.v = sp.v_cmd;
  next.omega = sp.omega_cmd;
  next.t = state.t + dt;
  return next;
}

bool check_collision(const Arena& arena, const VehicleState& state, double radius) {
  const Vec2& p = state.position;
  if (p.x() - radius < 0.0 || p.y() - radius < 0.0 || p.x() + radius > arena.width ||
      p.y() + radius > arena.height) {
    return true;
  }
  for (const Box& b : arena.obstacles) {
    const Vec2 closest = p.cwiseMax(b.min).cwiseMin(b.max);
    if ((p - closest).squaredNorm() < radius * radius) return true;
  }
  return false;
}

}  // namespace nanoexplore
