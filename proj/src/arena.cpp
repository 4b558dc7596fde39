#include "nanoexplore/arena.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nanoexplore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Faces count as solid.
bool touches(const Box& b, const Vec2& p) {
  return p.x() >= b.min.x() && p.x() <= b.max.x() && p.y() >= b.min.y() && p.y() <= b.max.y();
}

std::string index_path(const char* field, std::size_t i) {
  return std::string(field) + "[" + std::to_string(i) + "]";
}

double require_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw ArenaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ArenaError(path, "must be finite");
  return v;
}

Vec2 require_point(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ArenaError(path, "expected [x, y]");
  return {require_number(j[0], path + "[0]"), require_number(j[1], path + "[1]")};
}

}  // namespace

ArenaError::ArenaError(std::string path, const std::string& what)
    : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

std::string_view to_string(ObjectClass c) {
  return c == ObjectClass::bottle ? "bottle" : "tin_can";
}

ObjectClass object_class_from_string(std::string_view token) {
  if (token == "bottle") return ObjectClass::bottle;
  if (token == "tin_can") return ObjectClass::tin_can;
  throw std::invalid_argument("unknown object class '" + std::string(token) +
                              "' (expected bottle | tin_can)");
}

bool in_free_space(const Arena& arena, const Vec2& p) {
  if (!(p.x() > 0.0 && p.x() < arena.width && p.y() > 0.0 && p.y() < arena.height)) return false;
  return std::none_of(arena.obstacles.begin(), arena.obstacles.end(),
                      [&](const Box& b) { return touches(b, p); });
}

double ray_box_entry(const Box& box, const Vec2& origin, const Vec2& dir) {
  double t_enter = -kInf;
  double t_exit = kInf;
  for (int axis = 0; axis < 2; ++axis) {
    const double o = origin[axis];
    const double d = dir[axis];
    const double lo = box.min[axis];
    const double hi = box.max[axis];
    if (d == 0.0) {
      if (o <= lo || o >= hi) return kInf;
      continue;
    }
    double t0 = (lo - o) / d;
    double t1 = (hi - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter < t_exit && t_enter >= 0.0) return t_enter;
  return kInf;
}

double raycast(const Arena& arena, const Vec2& origin, double heading) {
  if (!in_free_space(arena, origin)) {
    throw InvalidOrigin("raycast origin (" + std::to_string(origin.x()) + ", " +
                        std::to_string(origin.y()) + ") is not in free space");
  }
  const Vec2 dir(std::cos(heading), std::sin(heading));

  // Exit through the room walls; the origin is strictly inside the room.
  double best = kInf;
  const Vec2 room_max(arena.width, arena.height);
  for (int axis = 0; axis < 2; ++axis) {
    if (dir[axis] > 0.0) {
      best = std::min(best, (room_max[axis] - origin[axis]) / dir[axis]);
    } else if (dir[axis] < 0.0) {
      best = std::min(best, -origin[axis] / dir[axis]);
    }
  }
  for (const Box& b : arena.obstacles) best = std::min(best, ray_box_entry(b, origin, dir));
  return best;
}

void validate(const Arena& arena) {
  if (!(std::isfinite(arena.width) && arena.width > 0.0)) throw ArenaError("width", "must be > 0");
  if (!(std::isfinite(arena.height) && arena.height > 0.0)) throw ArenaError("height", "must be > 0");
  for (std::size_t i = 0; i < arena.obstacles.size(); ++i) {
    const Box& b = arena.obstacles[i];
    const std::string path = index_path("obstacles", i);
    if (!(b.min.x() < b.max.x() && b.min.y() < b.max.y())) {
      throw ArenaError(path, "min must be < max on both axes");
    }
    if (b.min.x() < 0.0 || b.min.y() < 0.0 || b.max.x() > arena.width || b.max.y() > arena.height) {
      throw ArenaError(path, "obstacle extends outside the room");
    }
  }
  std::set<int> ids;
  for (std::size_t i = 0; i < arena.objects.size(); ++i) {
    const TargetObject& o = arena.objects[i];
    const std::string path = index_path("objects", i);
    if (!(o.radius > 0.0)) throw ArenaError(path + ".radius", "must be > 0");
    if (!ids.insert(o.id).second) throw ArenaError(path + ".id", "duplicate object id");
    if (!in_free_space(arena, o.position)) {
      throw ArenaError(path + ".pos", "object must lie in free space");
    }
  }
}

Arena default_arena() {
  Arena a;
  a.width = 6.5;
  a.height = 5.5;
  a.objects = {
      {1, ObjectClass::bottle, {2.9, 2.75}, 0.05},
      {2, ObjectClass::tin_can, {3.6, 2.75}, 0.05},
      {3, ObjectClass::bottle, {0.8, 0.8}, 0.05},
      {4, ObjectClass::tin_can, {5.7, 0.8}, 0.05},
      {5, ObjectClass::bottle, {0.8, 4.7}, 0.05},
      {6, ObjectClass::tin_can, {5.7, 4.7}, 0.05},
  };
  return a;
}

Arena load_arena(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArenaError("<document>", e.what());
  }
  if (!doc.is_object()) throw ArenaError("<document>", "expected a JSON object");

  Arena arena;
  arena.obstacles.clear();
  arena.objects.clear();
  if (!doc.contains("width")) throw ArenaError("width", "missing");
  if (!doc.contains("height")) throw ArenaError("height", "missing");
  arena.width = require_number(doc["width"], "width");
  arena.height = require_number(doc["height"], "height");

  if (doc.contains("obstacles")) {
    const auto& obs = doc["obstacles"];
    if (!obs.is_array()) throw ArenaError("obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string path = index_path("obstacles", i);
      if (!obs[i].is_object() || !obs[i].contains("min") || !obs[i].contains("max")) {
        throw ArenaError(path, "expected {min:[x,y], max:[x,y]}");
      }
      arena.obstacles.push_back(
          {require_point(obs[i]["min"], path + ".min"), require_point(obs[i]["max"], path + ".max")});
    }
  }

  if (doc.contains("objects")) {
    const auto& objs = doc["objects"];
    if (!objs.is_array()) throw ArenaError("objects", "expected an array");
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const std::string path = index_path("objects", i);
      const auto& o = objs[i];
      if (!o.is_object()) throw ArenaError(path, "expected an object");
      TargetObject t;
      if (!o.contains("id") || !o["id"].is_number_integer()) throw ArenaError(path + ".id", "expected an integer");
      t.id = o["id"].get<int>();
      if (!o.contains("class") || !o["class"].is_string()) throw ArenaError(path + ".class", "expected a string");
      try {
        t.cls = object_class_from_string(o["class"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ArenaError(path + ".class", e.what());
      }
      if (!o.contains("pos")) throw ArenaError(path + ".pos", "missing");
      t.position = require_point(o["pos"], path + ".pos");
      if (o.contains("radius")) t.radius = require_number(o["radius"], path + ".radius");
      arena.objects.push_back(t);
    }
  }

  validate(arena);
  return arena;
}

Arena load_arena_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArenaError("<file>", "cannot open arena document '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_arena(ss.str());
}

std::string arena_to_json(const Arena& arena) {
  nlohmann::ordered_json doc;
  doc["width"] = arena.width;
  doc["height"] = arena.height;
  doc["obstacles"] = nlohmann::ordered_json::array();
  for (const Box& b : arena.obstacles) {
    doc["obstacles"].push_back({{"min", {b.min.x(), b.min.y()}}, {"max", {b.max.x(), b.max.y()}}});
  }
  doc["objects"] = nlohmann::ordered_json::array();
  for (const TargetObject& o : arena.objects) {
    doc["objects"].push_back({{"id", o.id},
                              {"class", std::string(to_string(o.cls))},
                              {"pos", {o.position.x(), o.position.y()}},
                              {"radius", o.radius}});
  }
  return doc.dump(2);
}

}  // namespace nanoexplore
