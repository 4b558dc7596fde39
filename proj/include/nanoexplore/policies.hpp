#pragma once

#include <numbers>
#include <string_view>
#include <variant>
#include <vector>

#include "nanoexplore/random.hpp"
#include "nanoexplore/sensing.hpp"
#include "nanoexplore/vehicle.hpp"

namespace nanoexplore {

enum class PolicyKind { pseudo_random, wall_following, spiral, rotate_and_measure };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::pseudo_random, PolicyKind::wall_following,
                                              PolicyKind::spiral, PolicyKind::rotate_and_measure};

// CLI/config tokens: pseudo-random, wall-following, spiral, rotate-and-measure.
std::string_view to_string(PolicyKind kind);
PolicyKind policy_from_string(std::string_view token);

enum class Side { left, right };

std::string_view to_string(Side side);
Side side_from_string(std::string_view token);

struct PolicyConfig {
  double cruise_speed = 0.5;               // m/s
  double trigger_dist = 1.0;               // front obstacle threshold, m
  double wall_standoff = 0.5;              // m
  double spiral_step = 0.5;                // ring offset change per lap, m
  double scan_step = std::numbers::pi / 4;  // rad between scan samples
  double leg_max = 2.0;                    // m
  double turn_rate = 1.5;                  // rad/s
  double wall_gain = 1.5;                  // rad/s per m of standoff error
  double error_limit = 0.3;                // standoff error is clamped to +-limit, m
  double corner_margin = 0.1;              // front <= standoff + margin starts a corner turn
  double capture_range = 1.0;              // side > standoff + capture_range: wall lost
  double heading_tolerance = 0.05;         // rad
  double random_turn_min = std::numbers::pi / 2;
  double random_turn_max = 3 * std::numbers::pi / 2;
  double side_guard = 0.2;                 // lateral clearance that also triggers avoidance, m
  Side follow_side = Side::left;
  double spiral_limit = 2.70;              // max ring offset, set from the room: min(w,h)/2 - radius

  // Derivative gain that critically damps the standoff loop at cruise speed.
  double wall_damping() const;
};

// Throws std::invalid_argument naming the first bad field.
void validate(const PolicyConfig& cfg, double tof_max_range);

// What the exploration task sees each control tick: the held ranging frame,
// the attitude estimate, and the control period.
struct PolicyInput {
  TofFrame tof;
  double heading = 0.0;
  double dt = 0.02;
};

struct PseudoRandomState {
  enum class Mode { cruise, turning };
  Mode mode = Mode::cruise;
  double target_heading = 0.0;
};

struct WallFollowState {
  enum class Mode { follow, corner_turn };
  Mode mode = Mode::follow;
  Side side = Side::left;
  double target_heading = 0.0;
  bool tracking = false;  // side wall inside the capture band
  bool has_prev = false;
  double prev_error = 0.0;
  double prev_t = 0.0;
  double error_rate = 0.0;  // m/s, from consecutive ranging frames
};

struct SpiralState {
  enum class Direction { in, out };
  WallFollowState follow;
  double ring_offset = 0.5;
  Direction direction = Direction::in;
  int corners_in_lap = 0;
  int laps_completed = 0;
};

struct RotateMeasureState {
  enum class Mode { scan, travel };
  Mode mode = Mode::scan;
  bool scan_started = false;
  double scan_start = 0.0;
  double scan_progress = 0.0;  // accumulated rotation since scan start
  double last_heading = 0.0;
  int scan_index = 0;
  std::vector<double> scan_table;
  double leg_heading = 0.0;
  double leg_length = 0.0;
  double leg_travelled = 0.0;
  bool aligned = false;
  int scans_completed = 0;
};

using PolicyState = std::variant<PseudoRandomState, WallFollowState, SpiralState, RotateMeasureState>;

template <class State>
struct PolicyStep {
  State state;
  Setpoint setpoint;
};

PolicyState initial_policy_state(PolicyKind kind, const PolicyConfig& cfg);

PolicyStep<PseudoRandomState> pseudo_random_step(const PseudoRandomState& ps, const PolicyInput& in,
                                                 const PolicyConfig& cfg, Rng& rng);

PolicyStep<WallFollowState> wall_following_step(const WallFollowState& ps, const PolicyInput& in,
                                                const PolicyConfig& cfg);

PolicyStep<SpiralState> spiral_step(const SpiralState& ps, const PolicyInput& in, const PolicyConfig& cfg);

PolicyStep<RotateMeasureState> rotate_measure_step(const RotateMeasureState& ps, const PolicyInput& in,
                                                   const PolicyConfig& cfg);

// Lowest index of the largest entry.
std::size_t freest_direction(const std::vector<double>& scan_table);

// Dispatch; throws std::logic_error if `ps` does not hold the state for `kind`.
PolicyStep<PolicyState> policy_step(PolicyKind kind, const PolicyState& ps, const PolicyInput& in,
                                    const PolicyConfig& cfg, Rng& rng);

}  // namespace nanoexplore
