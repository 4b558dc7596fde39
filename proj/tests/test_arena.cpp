#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nanoexplore/arena.hpp"
#include "oracles.hpp"

using namespace nanoexplore;

namespace {

Arena empty_room() {
  Arena a;
  a.width = 6.5;
  a.height = 5.5;
  return a;
}

Arena room_with_box() {
  Arena a = empty_room();
  a.obstacles.push_back({Vec2(2, 2), Vec2(3, 3)});
  return a;
}

}  // namespace

TEST_CASE("raycast hits the room walls") {
  const Arena a = empty_room();
  CHECK(raycast(a, Vec2(1.0, 2.75), 0.0) == doctest::Approx(5.5).epsilon(1e-12));
  CHECK(raycast(a, Vec2(3.25, 2.75), std::numbers::pi / 2) == doctest::Approx(2.75).epsilon(1e-12));
  CHECK(raycast(a, Vec2(3.25, 2.75), std::numbers::pi) == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(raycast(a, Vec2(3.25, 2.75), -std::numbers::pi / 2) == doctest::Approx(2.75).epsilon(1e-12));
}

TEST_CASE("raycast stops at the first box face") {
  const Arena a = room_with_box();
  const double d = raycast(a, Vec2(1, 2.5), 0.0);
  CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(d - oracle::dense_raycast(a, Vec2(1, 2.5), 0.0)) <= 2e-3);
  // Pointing away from the box sees the west wall.
  CHECK(raycast(a, Vec2(1, 2.5), std::numbers::pi) == doctest::Approx(1.0));
}

TEST_CASE("raycast rejects origins outside free space") {
  const Arena a = room_with_box();
  CHECK_THROWS_AS(raycast(a, Vec2(2.5, 2.5), 0.0), InvalidOrigin);
  CHECK_THROWS_AS(raycast(a, Vec2(-0.1, 2.0), 0.0), InvalidOrigin);
  CHECK_THROWS_AS(raycast(a, Vec2(7.0, 2.0), 0.0), InvalidOrigin);
}

TEST_CASE("in_free_space") {
  const Arena a = room_with_box();
  CHECK(in_free_space(a, Vec2(3.25, 2.75)) == true);
  CHECK(in_free_space(a, Vec2(-0.1, 2.0)) == false);
  CHECK(in_free_space(a, Vec2(2.5, 2.5)) == false);
  // Boundaries are not free.
  CHECK(in_free_space(a, Vec2(0.0, 2.0)) == false);
  CHECK(in_free_space(a, Vec2(2.0, 2.5)) == false);
}

TEST_CASE("ray_box_entry") {
  const Box b{Vec2(2, 2), Vec2(3, 3)};
  CHECK(ray_box_entry(b, Vec2(1, 2.5), Vec2(1, 0)) == doctest::Approx(1.0));
  CHECK(std::isinf(ray_box_entry(b, Vec2(1, 2.5), Vec2(-1, 0))));
  CHECK(std::isinf(ray_box_entry(b, Vec2(1, 3.5), Vec2(1, 0))));
  // Grazing along a face does not penetrate.
  CHECK(std::isinf(ray_box_entry(b, Vec2(1, 3.0), Vec2(1, 0))));
}

TEST_CASE("raycast agrees with the dense-stepping oracle on random arenas") {
  std::mt19937_64 g(1234);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  int worst_case = -1;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Arena a = oracle::random_arena(g, 5);
    const Vec2 o = oracle::random_free_point(a, g);
    const double h = ang(g);
    const double err = std::abs(raycast(a, o, h) - oracle::dense_raycast(a, o, h));
    if (err > worst) {
      worst = err;
      worst_case = i;
    }
  }
  INFO("worst case " << worst_case);
  CHECK(worst <= 2e-3);
}

TEST_CASE("a corner clipped over less than a millimetre still stops the ray") {
  Arena a;
  a.width = 6.0;
  a.height = 4.0;
  a.objects.clear();
  a.obstacles = {{Vec2(1.699420, 1.207619), Vec2(2.988400, 1.359900)}};
  const Vec2 o(2.829943656, 1.855298169);
  const double h = -1.261397469;
  const double d = raycast(a, o, h);
  // Enters through the top face, just inside the right edge.
  CHECK(d == doctest::Approx((1.359900 - o.y()) / std::sin(h)).epsilon(1e-12));
  CHECK((o + d * Vec2(std::cos(h), std::sin(h))).x() > 2.988400 - 1e-3);
  CHECK(std::abs(d - oracle::dense_raycast(a, o, h)) <= 2e-3);
}

TEST_CASE("raycast properties") {
  std::mt19937_64 g(99);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 2000; ++i) {
    Arena a = oracle::random_arena(g, 4);
    const Vec2 o = oracle::random_free_point(a, g);
    const double h = ang(g);
    const double d = raycast(a, o, h);

    const double far = std::max({std::hypot(o.x(), o.y()), std::hypot(a.width - o.x(), o.y()),
                                 std::hypot(o.x(), a.height - o.y()), std::hypot(a.width - o.x(), a.height - o.y())});
    CHECK(d <= far + 1e-12);

    const Vec2 back = o + (d - 1e-3) * Vec2(std::cos(h), std::sin(h));
    CHECK(in_free_space(a, back));

    // Adding an obstacle never lengthens a ray.
    const Arena before = a;
    const Arena extra = oracle::random_arena(g, 1);
    if (!extra.obstacles.empty()) {
      Box b = extra.obstacles.front();
      b.max = b.max.cwiseMin(Vec2(a.width, a.height));
      b.min = b.min.cwiseMin(b.max - Vec2(0.05, 0.05));
      a.obstacles.push_back(b);
      if (in_free_space(a, o)) CHECK(raycast(a, o, h) <= raycast(before, o, h));
    }
  }
}

TEST_CASE("default arena") {
  const Arena a = default_arena();
  CHECK(a.width == 6.5);
  CHECK(a.height == 5.5);
  CHECK(a.obstacles.empty());
  REQUIRE(a.objects.size() == 6);
  int bottles = 0;
  for (const auto& o : a.objects) bottles += o.cls == ObjectClass::bottle;
  CHECK(bottles == 3);
  CHECK_NOTHROW(validate(a));
}

TEST_CASE("arena documents round-trip") {
  const Arena a = load_arena(arena_to_json(default_arena()));
  const Arena d = default_arena();
  REQUIRE(a.objects.size() == d.objects.size());
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    CHECK(a.objects[i].id == d.objects[i].id);
    CHECK(a.objects[i].cls == d.objects[i].cls);
    CHECK(a.objects[i].position == d.objects[i].position);
    CHECK(a.objects[i].radius == d.objects[i].radius);
  }
}

TEST_CASE("arena validation reports the field path") {
  const char* inside = R"({"width": 6.5, "height": 5.5,
    "obstacles": [{"min": [2, 2], "max": [3, 3]}],
    "objects": [{"id": 1, "class": "bottle", "pos": [2.5, 2.5], "radius": 0.05}]})";
  try {
    load_arena(inside);
    FAIL("expected ArenaError");
  } catch (const ArenaError& e) {
    CHECK(e.path() == "objects[0].pos");
  }

  CHECK_NOTHROW(load_arena(R"({"width": 6.5, "height": 5.5, "objects": []})"));
  CHECK_THROWS_AS(load_arena(R"({"width": -1, "height": 5.5})"), ArenaError);
  CHECK_THROWS_AS(load_arena(R"({"height": 5.5})"), ArenaError);
  CHECK_THROWS_AS(load_arena(R"({"width": 6.5, "height": 5.5, "obstacles": [{"min": [3, 3], "max": [2, 4]}]})"),
                  ArenaError);
  CHECK_THROWS_AS(load_arena(R"({"width": 6.5, "height": 5.5, "objects": [{"id": 1, "class": "cup", "pos": [1, 1]}]})"),
                  ArenaError);
  CHECK_THROWS_AS(load_arena("{not json"), ArenaError);
}
