#include "nanoexplore/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nanoexplore {

namespace {

// In-place rotation toward `target` along the shorter arc, never overshooting
// within one tick.
Setpoint rotate_toward(double heading, double target, const PolicyConfig& cfg, double dt) {
  const double err = normalize_angle(target - heading);
  const double mag = std::min(cfg.turn_rate, std::abs(err) / dt);
  return {0.0, std::copysign(mag, err)};
}

bool aligned_with(double heading, double target, const PolicyConfig& cfg) {
  return std::abs(normalize_angle(target - heading)) < cfg.heading_tolerance;
}

bool side_blocked(const TofFrame& tof, const PolicyConfig& cfg) {
  return std::min(tof.left, tof.right) <= cfg.side_guard;
}

struct FollowOutcome {
  PolicyStep<WallFollowState> step;
  bool corner_done = false;      // a tracked corner turn finished this tick
};

// Shared perimeter-following law; `standoff` is the lateral distance to hold.
FollowOutcome follow_wall(const WallFollowState& ps, const PolicyInput& in, const PolicyConfig& cfg,
                          double standoff) {
  WallFollowState s = ps;
  const TofFrame& tof = in.tof;
  const double sign = s.side == Side::left ? 1.0 : -1.0;

  if (s.mode == WallFollowState::Mode::corner_turn) {
    if (!aligned_with(in.heading, s.target_heading, cfg)) {
      return {{s, rotate_toward(in.heading, s.target_heading, cfg, in.dt)}, false};
    }
    s.mode = WallFollowState::Mode::follow;
    s.has_prev = false;
    s.error_rate = 0.0;
    const bool counted = s.tracking;
    return {{s, {cfg.cruise_speed, 0.0}}, counted};
  }

  if (tof.front <= standoff + cfg.corner_margin) {
    // Turn toward the more open side; on a tie keep the wall on the followed side.
    double turn;
    if (tof.left > tof.right) {
      turn = 1.0;
    } else if (tof.right > tof.left) {
      turn = -1.0;
    } else {
      turn = -sign;
    }
    s.mode = WallFollowState::Mode::corner_turn;
    s.target_heading = normalize_angle(in.heading + turn * std::numbers::pi / 2);
    return {{s, rotate_toward(in.heading, s.target_heading, cfg, in.dt)}, false};
  }

  const double side_reading = s.side == Side::left ? tof.left : tof.right;
  if (side_reading > standoff + cfg.capture_range) {
    s.tracking = false;
    s.has_prev = false;
    s.error_rate = 0.0;
    return {{s, {cfg.cruise_speed, 0.0}}, false};
  }

  s.tracking = true;
  const double error = std::clamp(side_reading - standoff, -cfg.error_limit, cfg.error_limit);
  if (s.has_prev && tof.t > s.prev_t) {
    s.error_rate = (error - s.prev_error) / (tof.t - s.prev_t);
  }
  if (!s.has_prev || tof.t > s.prev_t) {
    s.prev_error = error;
    s.prev_t = tof.t;
    s.has_prev = true;
  }
  const double u = cfg.wall_gain * error + cfg.wall_damping() * s.error_rate;
  const double omega = std::clamp(sign * u, -cfg.turn_rate, cfg.turn_rate);
  return {{s, {cfg.cruise_speed, omega}}, false};
}

std::size_t scan_count(const PolicyConfig& cfg) {
  return static_cast<std::size_t>(std::lround(2 * std::numbers::pi / cfg.scan_step));
}

RotateMeasureState fresh_scan(RotateMeasureState s) {
  s.mode = RotateMeasureState::Mode::scan;
  s.scan_started = false;
  s.scan_index = 0;
  s.scan_progress = 0.0;
  std::fill(s.scan_table.begin(), s.scan_table.end(), 0.0);
  return s;
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::pseudo_random: return "pseudo-random";
    case PolicyKind::wall_following: return "wall-following";
    case PolicyKind::spiral: return "spiral";
    case PolicyKind::rotate_and_measure: return "rotate-and-measure";
  }
  return "?";
}

PolicyKind policy_from_string(std::string_view token) {
  for (PolicyKind k : kAllPolicies) {
    if (to_string(k) == token) return k;
  }
  throw std::invalid_argument("unknown policy '" + std::string(token) +
                              "' (valid: pseudo-random, wall-following, spiral, rotate-and-measure)");
}

std::string_view to_string(Side side) { return side == Side::left ? "left" : "right"; }

Side side_from_string(std::string_view token) {
  if (token == "left") return Side::left;
  if (token == "right") return Side::right;
  throw std::invalid_argument("unknown side '" + std::string(token) + "' (valid: left, right)");
}

double PolicyConfig::wall_damping() const { return 2.0 * std::sqrt(wall_gain / cruise_speed); }

void validate(const PolicyConfig& cfg, double tof_max_range) {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) throw std::invalid_argument(std::string("policy.") + name + " must be > 0");
  };
  positive(cfg.cruise_speed, "cruise_speed");
  positive(cfg.trigger_dist, "trigger_dist");
  positive(cfg.wall_standoff, "wall_standoff");
  positive(cfg.spiral_step, "spiral_step");
  positive(cfg.scan_step, "scan_step");
  positive(cfg.leg_max, "leg_max");
  positive(cfg.turn_rate, "turn_rate");
  positive(cfg.wall_gain, "wall_gain");
  positive(cfg.error_limit, "error_limit");
  positive(cfg.corner_margin, "corner_margin");
  positive(cfg.capture_range, "capture_range");
  positive(cfg.heading_tolerance, "heading_tolerance");
  positive(cfg.side_guard, "side_guard");
  positive(cfg.spiral_limit, "spiral_limit");
  if (cfg.trigger_dist > tof_max_range) {
    throw std::invalid_argument("policy.trigger_dist must not exceed tof.max_range");
  }
  if (!(cfg.random_turn_min >= std::numbers::pi / 2 && cfg.random_turn_min < cfg.random_turn_max &&
        cfg.random_turn_max <= 3 * std::numbers::pi / 2)) {
    throw std::invalid_argument("policy random turn range must satisfy 90 <= min < max <= 270 degrees");
  }
  const double n = 2 * std::numbers::pi / cfg.scan_step;
  if (std::abs(n - std::round(n)) > 1e-9 || n < 2) {
    throw std::invalid_argument("policy.scan_step must divide a full turn");
  }
}

PolicyState initial_policy_state(PolicyKind kind, const PolicyConfig& cfg) {
  switch (kind) {
    case PolicyKind::pseudo_random: return PseudoRandomState{};
    case PolicyKind::wall_following: {
      WallFollowState s;
      s.side = cfg.follow_side;
      return s;
    }
    case PolicyKind::spiral: {
      SpiralState s;
      s.follow.side = cfg.follow_side;
      s.ring_offset = cfg.wall_standoff;
      return s;
    }
    case PolicyKind::rotate_and_measure: {
      RotateMeasureState s;
      s.scan_table.assign(scan_count(cfg), 0.0);
      return s;
    }
  }
  throw std::logic_error("unhandled policy kind");
}

PolicyStep<PseudoRandomState> pseudo_random_step(const PseudoRandomState& ps, const PolicyInput& in,
                                                 const PolicyConfig& cfg, Rng& rng) {
  PseudoRandomState s = ps;
  if (s.mode == PseudoRandomState::Mode::cruise) {
    if (in.tof.front > cfg.trigger_dist && !side_blocked(in.tof, cfg)) {
      return {s, {cfg.cruise_speed, 0.0}};
    }
    const double delta = rng.uniform(cfg.random_turn_min, cfg.random_turn_max);
    s.target_heading = normalize_angle(in.heading + delta);
    s.mode = PseudoRandomState::Mode::turning;
    return {s, rotate_toward(in.heading, s.target_heading, cfg, in.dt)};
  }
  if (aligned_with(in.heading, s.target_heading, cfg)) {
    s.mode = PseudoRandomState::Mode::cruise;
    return {s, {cfg.cruise_speed, 0.0}};
  }
  return {s, rotate_toward(in.heading, s.target_heading, cfg, in.dt)};
}

PolicyStep<WallFollowState> wall_following_step(const WallFollowState& ps, const PolicyInput& in,
                                                const PolicyConfig& cfg) {
  return follow_wall(ps, in, cfg, cfg.wall_standoff).step;
}

PolicyStep<SpiralState> spiral_step(const SpiralState& ps, const PolicyInput& in, const PolicyConfig& cfg) {
  SpiralState s = ps;
  FollowOutcome out = follow_wall(s.follow, in, cfg, s.ring_offset);
  s.follow = out.step.state;
  if (out.corner_done && ++s.corners_in_lap == 4) {
    s.corners_in_lap = 0;
    ++s.laps_completed;
    constexpr double eps = 1e-9;
    if (s.direction == SpiralState::Direction::in) {
      if (s.ring_offset + cfg.spiral_step > cfg.spiral_limit + eps) {
        s.direction = SpiralState::Direction::out;
        s.ring_offset = std::max(cfg.wall_standoff, s.ring_offset - cfg.spiral_step);
      } else {
        s.ring_offset += cfg.spiral_step;
      }
    } else if (s.ring_offset <= cfg.wall_standoff + eps) {
      // Back on the outermost ring: the cycle starts over from here.
      s.direction = SpiralState::Direction::in;
    } else {
      s.ring_offset = std::max(cfg.wall_standoff, s.ring_offset - cfg.spiral_step);
    }
    s.follow.has_prev = false;
    s.follow.error_rate = 0.0;
  }
  return {s, out.step.setpoint};
}

std::size_t freest_direction(const std::vector<double>& scan_table) {
  return static_cast<std::size_t>(std::max_element(scan_table.begin(), scan_table.end()) - scan_table.begin());
}

PolicyStep<RotateMeasureState> rotate_measure_step(const RotateMeasureState& ps, const PolicyInput& in,
                                                   const PolicyConfig& cfg) {
  RotateMeasureState s = ps;
  const std::size_t count = scan_count(cfg);
  if (s.scan_table.size() != count) s.scan_table.assign(count, 0.0);

  if (s.mode == RotateMeasureState::Mode::scan) {
    if (!s.scan_started) {
      s.scan_started = true;
      s.scan_start = in.heading;
      s.last_heading = in.heading;
      s.scan_progress = 0.0;
      s.scan_index = 0;
    } else {
      s.scan_progress += normalize_angle(in.heading - s.last_heading);
      s.last_heading = in.heading;
    }
    while (static_cast<std::size_t>(s.scan_index) < count &&
           s.scan_progress >= s.scan_index * cfg.scan_step - 1e-9) {
      s.scan_table[s.scan_index++] = in.tof.front;
    }
    if (static_cast<std::size_t>(s.scan_index) < count) return {s, {0.0, cfg.turn_rate}};

    const std::size_t best = freest_direction(s.scan_table);
    s.leg_heading = normalize_angle(s.scan_start + cfg.scan_step * static_cast<double>(best));
    s.leg_length = std::min(cfg.leg_max, s.scan_table[best] - cfg.wall_standoff);
    s.leg_travelled = 0.0;
    s.aligned = false;
    s.mode = RotateMeasureState::Mode::travel;
    ++s.scans_completed;
  }

  if (!s.aligned) {
    if (!aligned_with(in.heading, s.leg_heading, cfg)) {
      return {s, rotate_toward(in.heading, s.leg_heading, cfg, in.dt)};
    }
    s.aligned = true;
  }

  if (s.leg_travelled >= s.leg_length || in.tof.front <= cfg.trigger_dist || side_blocked(in.tof, cfg)) {
    return rotate_measure_step(fresh_scan(s), in, cfg);
  }

  const double err = normalize_angle(s.leg_heading - in.heading);
  const double omega = std::copysign(std::min(cfg.turn_rate, std::abs(err) / in.dt), err);
  s.leg_travelled = std::min(s.leg_travelled + cfg.cruise_speed * in.dt, std::max(cfg.leg_max, 0.0));
  return {s, {cfg.cruise_speed, omega}};
}

PolicyStep<PolicyState> policy_step(PolicyKind kind, const PolicyState& ps, const PolicyInput& in,
                                    const PolicyConfig& cfg, Rng& rng) {
  auto mismatch = [&] {
    return std::logic_error("policy state does not match kind '" + std::string(to_string(kind)) + "'");
  };
  switch (kind) {
    case PolicyKind::pseudo_random: {
      const auto* s = std::get_if<PseudoRandomState>(&ps);
      if (!s) throw mismatch();
      auto r = pseudo_random_step(*s, in, cfg, rng);
      return {r.state, r.setpoint};
    }
    case PolicyKind::wall_following: {
      const auto* s = std::get_if<WallFollowState>(&ps);
      if (!s) throw mismatch();
      auto r = wall_following_step(*s, in, cfg);
      return {r.state, r.setpoint};
    }
    case PolicyKind::spiral: {
      const auto* s = std::get_if<SpiralState>(&ps);
      if (!s) throw mismatch();
      auto r = spiral_step(*s, in, cfg);
      return {r.state, r.setpoint};
    }
    case PolicyKind::rotate_and_measure: {
      const auto* s = std::get_if<RotateMeasureState>(&ps);
      if (!s) throw mismatch();
      auto r = rotate_measure_step(*s, in, cfg);
      return {r.state, r.setpoint};
    }
  }
  throw std::logic_error("unhandled policy kind");
}

}  // namespace nanoexplore
