#pragma once

#include "nanoexplore/arena.hpp"

namespace nanoexplore {

struct VehicleState {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;  // [-pi, pi)
  double v = 0.0;        // forward speed, m/s
  double omega = 0.0;    // yaw rate, rad/s
  double t = 0.0;        // seconds since run start
};

// Commanded forward speed and yaw rate for one control tick.
struct Setpoint {
  double v_cmd = 0.0;
  double omega_cmd = 0.0;

  bool operator==(const Setpoint&) const = default;
};

struct VehicleLimits {
  double v_max = 1.0;
  double omega_max = 2.0;
  double radius = 0.05;  // 10 cm airframe
};

struct CollisionRecord {
  bool occurred = false;
  double time = 0.0;
  Vec2 position = Vec2::Zero();
};

// Wraps an angle into [-pi, pi).
double normalize_angle(double a);

Setpoint clamp_setpoint(const Setpoint& sp, const VehicleLimits& limits);

// Unicycle integration with the midpoint heading. Requires dt > 0 and the
// set-point already within limits.
VehicleState step(const VehicleState& state, const Setpoint& sp, double dt);

// True iff the disc of `radius` around the vehicle strictly intersects an
// obstacle or leaves the room. Touching is not a collision.
bool check_collision(const Arena& arena, const VehicleState& state, double radius);

}  // namespace nanoexplore
