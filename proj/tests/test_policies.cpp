#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nanoexplore/harness.hpp"
#include "nanoexplore/policies.hpp"

using namespace nanoexplore;

namespace {

constexpr double kPi = std::numbers::pi;

PolicyInput input(double front, double left, double right, double heading = 0.0, double t = 0.0) {
  PolicyInput in;
  in.tof = {front, left, right, 4.0, t};
  in.heading = heading;
  return in;
}

}  // namespace

TEST_CASE("pseudo-random cruises while the front is clear") {
  PolicyConfig cfg;
  Rng rng(1);
  const auto r = pseudo_random_step({}, input(1.5, 2.0, 2.0), cfg, rng);
  CHECK(r.state.mode == PseudoRandomState::Mode::cruise);
  CHECK(r.setpoint == Setpoint{0.5, 0.0});
}

TEST_CASE("pseudo-random turn target comes from the uniform draw") {
  PolicyConfig cfg;
  Rng rng(42);
  Rng peek = rng;
  const double u = peek.uniform();
  const auto r = pseudo_random_step({}, input(0.8, 2.0, 2.0, 0.4), cfg, rng);
  CHECK(r.state.mode == PseudoRandomState::Mode::turning);
  CHECK(r.state.target_heading == doctest::Approx(normalize_angle(0.4 + kPi / 2 + u * kPi)));
  CHECK(r.setpoint.v_cmd == 0.0);
  CHECK(std::abs(r.setpoint.omega_cmd) == doctest::Approx(cfg.turn_rate));
}

TEST_CASE("pseudo-random returns to cruise once aligned") {
  PolicyConfig cfg;
  Rng rng(1);
  PseudoRandomState s;
  s.mode = PseudoRandomState::Mode::turning;
  s.target_heading = 1.0;
  const auto r = pseudo_random_step(s, input(0.8, 2.0, 2.0, 1.0 - 0.01), cfg, rng);
  CHECK(r.state.mode == PseudoRandomState::Mode::cruise);
  CHECK(r.setpoint == Setpoint{0.5, 0.0});
}

TEST_CASE("pseudo-random turns always exceed 90 degrees") {
  PolicyConfig cfg;
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double h = normalize_angle(0.001 * i);
    const auto r = pseudo_random_step({}, input(0.5, 2.0, 2.0, h), cfg, rng);
    CHECK(std::abs(normalize_angle(r.state.target_heading - h)) >= kPi / 2 - 1e-12);
  }
}

TEST_CASE("wall-following proportional law") {
  PolicyConfig cfg;
  WallFollowState s;
  auto r = wall_following_step(s, input(3.0, 0.7, 2.0), cfg);
  CHECK(r.setpoint.v_cmd == 0.5);
  CHECK(r.setpoint.omega_cmd == doctest::Approx(0.3));

  r = wall_following_step(s, input(3.0, 0.5, 2.0), cfg);
  CHECK(r.setpoint.omega_cmd == 0.0);

  // Right-side following steers the other way.
  s.side = Side::right;
  r = wall_following_step(s, input(3.0, 2.0, 0.7), cfg);
  CHECK(r.setpoint.omega_cmd == doctest::Approx(-0.3));
}

TEST_CASE("wall-following corner turns toward the larger reading") {
  PolicyConfig cfg;
  auto r = wall_following_step({}, input(0.55, 0.5, 3.2, 0.0), cfg);
  CHECK(r.state.mode == WallFollowState::Mode::corner_turn);
  CHECK(r.state.target_heading == doctest::Approx(-kPi / 2));
  CHECK(r.setpoint.v_cmd == 0.0);
  CHECK(r.setpoint.omega_cmd < 0.0);

  r = wall_following_step({}, input(0.55, 3.2, 0.5, 0.0), cfg);
  CHECK(r.state.target_heading == doctest::Approx(kPi / 2));
}

TEST_CASE("wall-following holds the standoff on a straight wall") {
  // Fly east along the south wall of the default room, starting 0.3 m off track.
  RunConfig cfg;
  cfg.policy = PolicyKind::wall_following;
  cfg.detector.reset();
  cfg.duration = 8.0;
  cfg.start = StartPose{Vec2(0.8, 0.8), 0.0};
  cfg.policy_cfg.follow_side = Side::right;
  bool settled = false;
  double worst_after = 0.0;
  run_single(cfg, [&](const TickRecord& r) {
    if (r.state.position.x() > 5.5) return;
    const double off = std::abs(r.state.position.y() - 0.5);
    if (settled) worst_after = std::max(worst_after, off);
    if (off < 0.01) settled = true;
  });
  CHECK(settled);
  CHECK(worst_after < 0.02);
}

TEST_CASE("spiral rings") {
  PolicyConfig cfg;
  cfg.spiral_limit = 5.5 / 2 - 0.05;
  SpiralState s = std::get<SpiralState>(initial_policy_state(PolicyKind::spiral, cfg));
  CHECK(s.ring_offset == 0.5);
  CHECK(s.direction == SpiralState::Direction::in);

  // Drive corner turns directly: a tracked corner starts when the front is
  // close and ends once aligned.
  auto corner = [&](SpiralState st) {
    st.follow.tracking = true;
    double h = 0.0;
    auto r = spiral_step(st, input(0.1, 0.2, 3.0, h), cfg);
    st = r.state;
    h = st.follow.target_heading;
    r = spiral_step(st, input(3.0, 0.2, 3.0, h), cfg);
    return r.state;
  };

  std::vector<double> rings{s.ring_offset};
  for (int lap = 0; lap < 12; ++lap) {
    for (int c = 0; c < 4; ++c) s = corner(s);
    rings.push_back(s.ring_offset);
  }
  const std::vector<double> expect{0.5, 1.0, 1.5, 2.0, 2.5, 2.0, 1.5, 1.0, 0.5, 0.5, 1.0, 1.5, 2.0};
  REQUIRE(rings.size() == expect.size());
  for (std::size_t i = 0; i < rings.size(); ++i) CHECK(rings[i] == doctest::Approx(expect[i]));
}

TEST_CASE("spiral ring offsets in a full run are palindromic per cycle") {
  RunConfig cfg;
  cfg.policy = PolicyKind::spiral;
  cfg.policy_cfg.cruise_speed = 1.0;
  cfg.detector.reset();
  std::vector<double> seq;
  run_single(cfg, [&](const TickRecord& r) {
    const auto& sp = std::get<SpiralState>(r.policy);
    if (seq.empty() || seq.back() != sp.ring_offset) seq.push_back(sp.ring_offset);
    CHECK(sp.ring_offset >= 0.5 - 1e-12);
    CHECK(sp.ring_offset <= 5.5 / 2);
  });
  // 0.5 1.0 1.5 2.0 2.5 2.0 1.5 1.0 0.5 (then 1.0 again)
  REQUIRE(seq.size() >= 9);
  const std::vector<double> cycle{0.5, 1.0, 1.5, 2.0, 2.5, 2.0, 1.5, 1.0, 0.5};
  for (std::size_t i = 0; i < cycle.size(); ++i) CHECK(seq[i] == doctest::Approx(cycle[i]));
}

TEST_CASE("freest direction") {
  CHECK(freest_direction({0.6, 1.2, 4.0, 2.0, 1.1, 0.9, 3.3, 2.8}) == 2);
  CHECK(freest_direction(std::vector<double>(8, 1.0)) == 0);
  CHECK(freest_direction({1.0, 3.0, 3.0}) == 1);
}

TEST_CASE("rotate-and-measure scans eight entries and plans a leg") {
  PolicyConfig cfg;
  RotateMeasureState s = std::get<RotateMeasureState>(initial_policy_state(PolicyKind::rotate_and_measure, cfg));
  const std::vector<double> ranges{0.6, 1.2, 4.0, 2.0, 1.1, 0.9, 3.3, 2.8};
  double heading = 0.0;
  int ticks = 0;
  while (s.mode == RotateMeasureState::Mode::scan && ticks < 1000) {
    // Front reading of the sector we are currently facing.
    const double progress = s.scan_started ? s.scan_progress + normalize_angle(heading - s.last_heading) : 0.0;
    const auto sector = static_cast<std::size_t>(std::floor(progress / cfg.scan_step + 1e-9)) % 8;
    auto r = rotate_measure_step(s, input(ranges[sector], 2.0, 2.0, heading), cfg);
    s = r.state;
    if (s.mode == RotateMeasureState::Mode::scan) {
      CHECK(r.setpoint.v_cmd == 0.0);
      heading = normalize_angle(heading + r.setpoint.omega_cmd * 0.02);
    }
    ++ticks;
  }
  REQUIRE(s.mode == RotateMeasureState::Mode::travel);
  CHECK(s.scans_completed == 1);
  REQUIRE(s.scan_table.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(s.scan_table[i] == ranges[i]);
  CHECK(s.leg_heading == doctest::Approx(2 * kPi / 4));
  CHECK(s.leg_length == doctest::Approx(2.0));  // min(2.0, 4.0 - 0.5)
}

TEST_CASE("rotate-and-measure leg length uses the recorded distance") {
  PolicyConfig cfg;
  RotateMeasureState s = std::get<RotateMeasureState>(initial_policy_state(PolicyKind::rotate_and_measure, cfg));
  double heading = 0.0;
  for (int k = 0; k < 400 && s.mode == RotateMeasureState::Mode::scan; ++k) {
    auto r = rotate_measure_step(s, input(1.8, 2.0, 2.0, heading), cfg);
    s = r.state;
    heading = normalize_angle(heading + r.setpoint.omega_cmd * 0.02);
  }
  REQUIRE(s.mode == RotateMeasureState::Mode::travel);
  CHECK(s.leg_length == doctest::Approx(1.3));
  CHECK(s.leg_heading == doctest::Approx(0.0));
}

TEST_CASE("rotate-and-measure travel ends at the obstacle trigger") {
  PolicyConfig cfg;
  RotateMeasureState s = std::get<RotateMeasureState>(initial_policy_state(PolicyKind::rotate_and_measure, cfg));
  s.mode = RotateMeasureState::Mode::travel;
  s.aligned = true;
  s.leg_length = 2.0;
  s.leg_heading = 0.0;
  auto r = rotate_measure_step(s, input(2.0, 2.0, 2.0), cfg);
  CHECK(r.state.mode == RotateMeasureState::Mode::travel);
  CHECK(r.setpoint.v_cmd == 0.5);
  CHECK(r.state.leg_travelled == doctest::Approx(0.01));
  r = rotate_measure_step(r.state, input(0.9, 2.0, 2.0), cfg);
  CHECK(r.state.mode == RotateMeasureState::Mode::scan);
  CHECK(r.setpoint.v_cmd == 0.0);
}

TEST_CASE("dispatch") {
  PolicyConfig cfg;
  Rng rng(3);
  const PolicyInput in = input(2.0, 0.6, 1.5, 0.2);
  for (PolicyKind k : kAllPolicies) {
    const auto r = policy_step(k, initial_policy_state(k, cfg), in, cfg, rng);
    CHECK(std::isfinite(r.setpoint.v_cmd));
    CHECK(std::abs(r.setpoint.v_cmd) <= cfg.cruise_speed);
    CHECK(std::abs(r.setpoint.omega_cmd) <= cfg.turn_rate);
  }
  Rng a(9), b(9);
  const auto direct = pseudo_random_step({}, in, cfg, a);
  const auto via = policy_step(PolicyKind::pseudo_random, PseudoRandomState{}, in, cfg, b);
  CHECK(via.setpoint == direct.setpoint);

  const auto spiral = policy_step(PolicyKind::spiral, initial_policy_state(PolicyKind::spiral, cfg), in, cfg, rng);
  CHECK(std::holds_alternative<SpiralState>(spiral.state));

  CHECK_THROWS_AS(policy_step(PolicyKind::spiral, PseudoRandomState{}, in, cfg, rng), std::logic_error);
}

TEST_CASE("set-points stay inside the clamps over whole runs") {
  for (PolicyKind k : kAllPolicies) {
    for (double v : {0.1, 0.5, 1.0}) {
      RunConfig cfg;
      cfg.policy = k;
      cfg.policy_cfg.cruise_speed = v;
      cfg.duration = 60.0;
      cfg.detector.reset();
      run_single(cfg, [&](const TickRecord& r) {
        CHECK(std::abs(r.setpoint.v_cmd) <= v);
        CHECK(std::abs(r.setpoint.omega_cmd) <= cfg.policy_cfg.turn_rate);
        if (const auto* rm = std::get_if<RotateMeasureState>(&r.policy)) {
          CHECK(rm->scan_index <= 8);
          CHECK(rm->leg_travelled <= cfg.policy_cfg.leg_max);
        }
      });
    }
  }
}

TEST_CASE("rotate-and-measure records exactly eight entries per scan") {
  RunConfig cfg;
  cfg.policy = PolicyKind::rotate_and_measure;
  cfg.detector.reset();
  int scans = 0;
  RotateMeasureState::Mode prev = RotateMeasureState::Mode::scan;
  run_single(cfg, [&](const TickRecord& r) {
    const auto& s = std::get<RotateMeasureState>(r.policy);
    if (prev == RotateMeasureState::Mode::scan && s.mode == RotateMeasureState::Mode::travel) {
      ++scans;
      CHECK(s.scan_index == 8);
      for (double d : s.scan_table) CHECK(d > 0.0);
    }
    prev = s.mode;
  });
  CHECK(scans > 3);
}

TEST_CASE("policy config validation") {
  PolicyConfig cfg;
  CHECK_NOTHROW(validate(cfg, 4.0));
  cfg.trigger_dist = 5.0;
  CHECK_THROWS_AS(validate(cfg, 4.0), std::invalid_argument);
  cfg = {};
  cfg.scan_step = 1.0;
  CHECK_THROWS_AS(validate(cfg, 4.0), std::invalid_argument);
  cfg = {};
  cfg.random_turn_min = 0.5;
  CHECK_THROWS_AS(validate(cfg, 4.0), std::invalid_argument);
  cfg = {};
  cfg.cruise_speed = 0.0;
  CHECK_THROWS_AS(validate(cfg, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(policy_from_string("bogus"), std::invalid_argument);
  for (PolicyKind k : kAllPolicies) CHECK(policy_from_string(to_string(k)) == k);
}
