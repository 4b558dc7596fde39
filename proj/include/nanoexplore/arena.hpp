#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nanoexplore {

// Planar position in meters. Frame origin is the room's south-west corner,
// x east, y north; headings are counter-clockwise from +x.
using Vec2 = Eigen::Vector2d;

// Axis-aligned solid rectangle.
struct Box {
  Vec2 min;
  Vec2 max;
};

enum class ObjectClass { bottle, tin_can };

std::string_view to_string(ObjectClass c);
ObjectClass object_class_from_string(std::string_view token);

struct TargetObject {
  int id = 0;
  ObjectClass cls = ObjectClass::bottle;
  Vec2 position = Vec2::Zero();
  double radius = 0.05;
};

struct Arena {
  double width = 6.5;
  double height = 5.5;
  std::vector<Box> obstacles;
  std::vector<TargetObject> objects;
};

// Validation failure; `path()` names the offending document field, e.g.
// "objects[2].pos".
class ArenaError : public std::runtime_error {
 public:
  ArenaError(std::string path, const std::string& what);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class InvalidOrigin : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool in_free_space(const Arena& arena, const Vec2& p);

// Exact distance from `origin` along (cos heading, sin heading) to the first
// obstacle face or room wall. Throws InvalidOrigin unless origin is in free
// space.
double raycast(const Arena& arena, const Vec2& origin, double heading);

// Ray/box slab test. Returns the entry distance of a ray that penetrates the
// box (entry < exit), or +inf. `origin` must lie outside the box.
double ray_box_entry(const Box& box, const Vec2& origin, const Vec2& dir);

// Throws ArenaError on the first violated invariant.
void validate(const Arena& arena);

// 6.5 x 5.5 m empty room, two objects near the center, four near the corners.
Arena default_arena();

Arena load_arena(std::string_view json_text);
Arena load_arena_file(const std::string& path);
std::string arena_to_json(const Arena& arena);

}  // namespace nanoexplore
