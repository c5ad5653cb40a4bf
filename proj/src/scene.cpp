#include "colayout/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace colayout {

using nlohmann::json;

namespace {

constexpr std::array<Side, 4> kSides = {Side::Front, Side::Back, Side::Left, Side::Right};

bool contains_any(std::string_view label, std::initializer_list<std::string_view> keys) {
  return std::any_of(keys.begin(), keys.end(),
                     [&](std::string_view k) { return label.find(k) != std::string_view::npos; });
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + "." + key + ": missing field");
  return *it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

template <std::size_t N>
std::array<double, N> as_numbers(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != N) {
    throw ParseError(where + ": expected an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = as_number(j[i], where + "[" + std::to_string(i) + "]");
  return out;
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

void check_positive(double v, const std::string& what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw ValidationError(what + " must be finite and > 0");
  }
}

}  // namespace

SideSet SideSet::defaults_for_label(std::string_view label) {
  std::string lower(label);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  SideSet s;
  if (contains_any(lower, {"cabinet", "drawer", "shelf", "wardrobe", "dresser", "nightstand",
                           "closet", "fridge", "refrigerator", "tv", "television"})) {
    return s.insert(Side::Front);
  }
  if (contains_any(lower, {"bed", "sofa", "couch"})) {
    return s.insert(Side::Front).insert(Side::Left).insert(Side::Right);
  }
  return SideSet::all();
}

std::string_view side_name(Side s) {
  switch (s) {
    case Side::Front: return "front";
    case Side::Back: return "back";
    case Side::Left: return "left";
    case Side::Right: return "right";
  }
  return "front";
}

std::optional<Side> parse_side(std::string_view name) {
  for (Side s : kSides) {
    if (side_name(s) == name) return s;
  }
  return std::nullopt;
}

const SceneObject* Scene::find(std::string_view id) const {
  auto it = std::find_if(objects.begin(), objects.end(),
                         [&](const SceneObject& o) { return o.id == id; });
  return it == objects.end() ? nullptr : &*it;
}

std::optional<std::size_t> Scene::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Scene::labels() const {
  std::vector<std::string> out;
  out.reserve(objects.size());
  for (const auto& o : objects) out.push_back(o.label);
  return out;
}

void validate(const Scene& scene) {
  check_positive(scene.room.width, "room.width");
  check_positive(scene.room.height, "room.height");
  check_positive(scene.robot.r_b, "robot.r_b");
  check_positive(scene.robot.d_max, "robot.d_max");
  if (scene.robot.seed_hint) {
    const Vec2 h = *scene.robot.seed_hint;
    if (!std::isfinite(h.x) || !std::isfinite(h.y)) {
      throw ValidationError("robot.seed_hint must be finite");
    }
  }
  if (scene.objects.empty()) throw ValidationError("objects: scene must contain at least one object");

  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    if (o.id.empty()) throw ValidationError(where + ".id must be non-empty");
    if (!seen.insert(o.id).second) throw ValidationError(where + ".id: duplicate id '" + o.id + "'");
    const Pose2& p = o.footprint.pose;
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.theta)) {
      throw ValidationError(where + ".pose must be finite");
    }
    check_positive(o.footprint.hx, where + ".half_extents[0]");
    check_positive(o.footprint.hy, where + ".half_extents[1]");
    if (!scene.room.contains(p.position())) {
      throw ValidationError(where + ".pose: center of '" + o.id + "' lies outside the room");
    }
  }
}

Scene scene_from_json(const json& j) {
  check_format_version(j, "scene");
  Scene s;
  const json& room = require(j, "room", "scene");
  s.room.width = as_number(require(room, "width", "room"), "room.width");
  s.room.height = as_number(require(room, "height", "room"), "room.height");

  const json& robot = require(j, "robot", "scene");
  s.robot.r_b = as_number(require(robot, "r_b", "robot"), "robot.r_b");
  s.robot.d_max = as_number(require(robot, "d_max", "robot"), "robot.d_max");
  if (auto it = robot.find("seed_hint"); it != robot.end() && !it->is_null()) {
    const auto h = as_numbers<2>(*it, "robot.seed_hint");
    s.robot.seed_hint = Vec2{h[0], h[1]};
  }

  const json& objects = require(j, "objects", "scene");
  if (!objects.is_array()) throw ParseError("scene.objects: expected an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const json& jo = objects[i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    SceneObject o;
    o.id = as_string(require(jo, "id", where), where + ".id");
    o.label = as_string(require(jo, "label", where), where + ".label");
    const auto pose = as_numbers<3>(require(jo, "pose", where), where + ".pose");
    const auto half = as_numbers<2>(require(jo, "half_extents", where), where + ".half_extents");
    o.footprint = OrientedRect{{pose[0], pose[1], normalize_angle(pose[2])}, half[0], half[1]};
    if (auto it = jo.find("interaction_sides"); it != jo.end()) {
      if (!it->is_array()) throw ParseError(where + ".interaction_sides: expected an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        const std::string name = as_string((*it)[k], where + ".interaction_sides");
        auto side = parse_side(name);
        if (!side) throw ParseError(where + ".interaction_sides: unknown side '" + name + "'");
        o.interaction_sides.insert(*side);
      }
    } else {
      o.interaction_sides = SideSet::defaults_for_label(o.label);
    }
    if (auto it = jo.find("movable"); it != jo.end()) {
      if (!it->is_boolean()) throw ParseError(where + ".movable: expected a boolean");
      o.movable = it->get<bool>();
    }
    s.objects.push_back(std::move(o));
  }
  validate(s);
  return s;
}

json scene_to_json(const Scene& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) {
    json sides = json::array();
    for (Side side : kSides) {
      if (o.interaction_sides.contains(side)) sides.push_back(side_name(side));
    }
    const Pose2& p = o.footprint.pose;
    objects.push_back({{"id", o.id},
                       {"label", o.label},
                       {"pose", {p.x, p.y, p.theta}},
                       {"half_extents", {o.footprint.hx, o.footprint.hy}},
                       {"interaction_sides", sides},
                       {"movable", o.movable}});
  }
  json hint = nullptr;
  if (scene.robot.seed_hint) hint = {scene.robot.seed_hint->x, scene.robot.seed_hint->y};
  return {{"format_version", kFormatVersion},
          {"room", {{"width", scene.room.width}, {"height", scene.room.height}}},
          {"robot", {{"r_b", scene.robot.r_b}, {"d_max", scene.robot.d_max}, {"seed_hint", hint}}},
          {"objects", objects}};
}

Scene load_scene(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    return scene_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  write_json_file(scene_to_json(scene), path);
}

Layout layout_from_json(const json& j) {
  check_format_version(j, "layout");
  const json& poses = require(j, "poses", "layout");
  if (!poses.is_array()) throw ParseError("layout.poses: expected an array");
  Layout layout;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const std::string where = "poses[" + std::to_string(i) + "]";
    const std::string id = as_string(require(poses[i], "id", where), where + ".id");
    const auto p = as_numbers<3>(require(poses[i], "pose", where), where + ".pose");
    if (!layout.emplace(id, Pose2{p[0], p[1], normalize_angle(p[2])}).second) {
      throw ValidationError(where + ".id: duplicate id '" + id + "'");
    }
  }
  return layout;
}

json layout_to_json(const Layout& layout) {
  json poses = json::array();
  for (const auto& [id, p] : layout) poses.push_back({{"id", id}, {"pose", {p.x, p.y, p.theta}}});
  return {{"format_version", kFormatVersion}, {"poses", poses}};
}

Layout current_layout(const Scene& scene) {
  Layout layout;
  for (const auto& o : scene.objects) {
    if (o.movable) layout.emplace(o.id, o.footprint.pose);
  }
  return layout;
}

Scene apply_layout(const Scene& scene, const Layout& layout) {
  for (const auto& [id, pose] : layout) {
    const SceneObject* o = scene.find(id);
    if (o == nullptr) throw LookupError("layout names unknown object '" + id + "'");
    if (!o->movable) throw LookupError("layout names immovable object '" + id + "'");
  }
  Scene out = scene;
  for (auto& o : out.objects) {
    if (!o.movable) continue;
    auto it = layout.find(o.id);
    if (it == layout.end()) throw LookupError("layout is missing movable object '" + o.id + "'");
    o.footprint.pose = it->second;
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": invalid JSON");
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void check_format_version(const json& j, std::string_view what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  auto it = j.find("format_version");
  if (it == j.end()) return;
  if (!it->is_number_integer() || it->get<int>() != kFormatVersion) {
    throw ParseError(std::string(what) + ".format_version: unsupported version " + it->dump());
  }
}

}  // namespace colayout
