#include "colayout/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace colayout {

using nlohmann::json;

namespace {

double read_number(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ParseError(std::string("config.") + key + ": expected a number");
  return it->get<double>();
}

}  // namespace

void ObjectiveConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("config.alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("config.beta must be >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("config.gamma must be >= 0");
  if (!(collision_penalty > 0.0) || !std::isfinite(collision_penalty)) {
    throw ValidationError("config.collision_penalty must be > 0");
  }
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw ValidationError("config.resolution must be > 0");
  }
}

ObjectiveConfig ObjectiveConfig::from_json(const json& j) {
  check_format_version(j, "config");
  ObjectiveConfig c;
  c.alpha = read_number(j, "alpha", c.alpha);
  c.beta = read_number(j, "beta", c.beta);
  c.gamma = read_number(j, "gamma", c.gamma);
  c.collision_penalty = read_number(j, "collision_penalty", c.collision_penalty);
  c.resolution = read_number(j, "resolution", c.resolution);
  c.validate();
  return c;
}

json ObjectiveConfig::to_json() const {
  return {{"alpha", alpha},
          {"beta", beta},
          {"gamma", gamma},
          {"collision_penalty", collision_penalty},
          {"resolution", resolution}};
}

void TaskSet::validate(const Scene& scene) const {
  for (const Task& t : tasks) {
    for (const Waypoint& w : t.waypoints) {
      if (const auto* id = std::get_if<std::string>(&w); id && scene.find(*id) == nullptr) {
        throw ValidationError("task '" + t.name + "' names unknown object '" + *id + "'");
      }
    }
  }
}

TaskSet TaskSet::from_json(const json& j) {
  check_format_version(j, "tasks");
  auto it = j.find("tasks");
  if (it == j.end() || !it->is_array()) throw ParseError("tasks.tasks: expected an array");
  TaskSet ts;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& jt = (*it)[i];
    const std::string where = "tasks[" + std::to_string(i) + "]";
    if (!jt.is_object() || !jt.contains("name") || !jt["name"].is_string() ||
        !jt.contains("waypoints") || !jt["waypoints"].is_array()) {
      throw ParseError(where + ": expected {\"name\": string, \"waypoints\": [...]}");
    }
    Task t;
    t.name = jt["name"].get<std::string>();
    for (const json& w : jt["waypoints"]) {
      if (w.is_string()) {
        t.waypoints.emplace_back(w.get<std::string>());
      } else if (w.is_array() && w.size() == 2 && w[0].is_number() && w[1].is_number()) {
        t.waypoints.emplace_back(Vec2{w[0].get<double>(), w[1].get<double>()});
      } else {
        throw ParseError(where + ".waypoints: expected an object id or [x, y]");
      }
    }
    ts.tasks.push_back(std::move(t));
  }
  return ts;
}

json TaskSet::to_json() const {
  json arr = json::array();
  for (const Task& t : tasks) {
    json wps = json::array();
    for (const Waypoint& w : t.waypoints) {
      if (const auto* id = std::get_if<std::string>(&w)) {
        wps.push_back(*id);
      } else {
        const Vec2 p = std::get<Vec2>(w);
        wps.push_back({p.x, p.y});
      }
    }
    arr.push_back({{"name", t.name}, {"waypoints", wps}});
  }
  return {{"tasks", arr}};
}

json Evaluation::to_json() const {
  return {{"human", human},
          {"robot", robot},
          {"motion", motion},
          {"penetration", penetration},
          {"total", total},
          {"accessible_cells", accessible_cells},
          {"no_access", no_access},
          {"robot_per_object", robot_per_object},
          {"human_per_edge", human_per_edge}};
}

double human_edge_cost(const Scene& scene, const KeptEdge& edge, const RelationStats& stats) {
  const SceneObject* a = scene.find(edge.a);
  const SceneObject* b = scene.find(edge.b);
  if (a == nullptr || b == nullptr) throw LookupError("kept edge names an object missing from the scene");
  const auto* ps = stats.pair(a->label, b->label);
  if (ps == nullptr || ps->total() == 0) return 0.5;
  const double peak = ps->max_density(stats.bin_width());
  const double d = norm(a->footprint.pose.position() - b->footprint.pose.position());
  return 1.0 - ps->density(d, stats.bin_width()) / peak;
}

double human_term(const Scene& scene, const std::vector<KeptEdge>& edges, const RelationStats& stats) {
  double sum = 0.0;
  for (const KeptEdge& e : edges) sum += human_edge_cost(scene, e, stats);
  return sum;
}

double human_term(const Scene& scene, const Layout& layout, const FunctionalGroups& groups,
                  const RelationStats& stats) {
  return human_term(apply_layout(scene, layout), groups.kept_edges, stats);
}

RobotTerm robot_term(const Scene& scene, const SceneFields& fields, double alpha,
                     const std::vector<std::string>& objects) {
  RobotTerm out;
  const bool all = objects.empty();
  auto wanted = [&](const std::string& id) {
    return all || std::find(objects.begin(), objects.end(), id) != objects.end();
  };
  if (!fields.region) {
    out.no_access = true;
    for (const auto& o : scene.objects) {
      if (wanted(o.id)) out.per_object[o.id] = 0.0;
    }
    return out;
  }
  const AccessibleRegion& region = *fields.region;
  out.accessible_cells = region.count;
  const double cell_area = fields.free.resolution() * fields.free.resolution();
  const double d_max = scene.robot.d_max;

  for (const auto& o : scene.objects) {
    if (!wanted(o.id)) continue;
    const CellWindow w = reach_window(o.footprint, d_max, fields.free);
    double sum = 0.0;
    for (int iy = w.y0; iy <= w.y1; ++iy) {
      for (int ix = w.x0; ix <= w.x1; ++ix) {
        const std::size_t i = fields.free.index(ix, iy);
        if (region.mask[i] == 0) continue;
        const double fi = interaction_value(fields.free.center(ix, iy), o, d_max);
        // Only the reach band contributes.
        if (fi == 0.0) continue;
        sum += fi + alpha * fields.free[i];
      }
    }
    const double term = -sum * cell_area;
    out.per_object[o.id] = term;
    out.total += term;
  }
  return out;
}

RobotTerm robot_term(const Scene& scene, const Layout& layout, const ObjectiveConfig& config) {
  const Scene laid = apply_layout(scene, layout);
  return robot_term(laid, compute_fields(laid, config.resolution), config.alpha);
}

std::optional<Vec2> approach_point(const Scene& scene, const SceneFields& fields,
                                   const std::string& object_id) {
  const SceneObject* o = scene.find(object_id);
  if (o == nullptr) throw LookupError("unknown object '" + object_id + "'");
  if (!fields.region) return std::nullopt;
  const CellWindow w = reach_window(o->footprint, scene.robot.d_max, fields.free);
  std::optional<Vec2> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int iy = w.y0; iy <= w.y1; ++iy) {
    for (int ix = w.x0; ix <= w.x1; ++ix) {
      if (!fields.region->contains(ix, iy)) continue;
      const Vec2 q = fields.free.center(ix, iy);
      if (!(interaction_value(q, *o, scene.robot.d_max) > 0.0)) continue;
      const double d = norm(q - o->footprint.pose.position());
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
  }
  return best;
}

double motion_cost(const Scene& scene, const SceneFields& fields, const TaskSet& tasks) {
  const double unreachable = 4.0 * 2.0 * (scene.room.width + scene.room.height);
  double total = 0.0;
  for (const Task& t : tasks.tasks) {
    std::vector<std::optional<Vec2>> points;
    for (const Waypoint& w : t.waypoints) {
      if (const auto* id = std::get_if<std::string>(&w)) {
        points.push_back(approach_point(scene, fields, *id));
      } else {
        points.emplace_back(std::get<Vec2>(w));
      }
    }
    for (std::size_t k = 1; k < points.size(); ++k) {
      if (!fields.region || !points[k - 1] || !points[k]) {
        total += unreachable;
        continue;
      }
      try {
        total += shortest_path(*fields.region, *points[k - 1], *points[k]);
      } catch (const LookupError&) {
        total += unreachable;
      }
    }
  }
  return total;
}

double motion_cost(const Scene& scene, const Layout& layout, const TaskSet& tasks, double resolution) {
  const Scene laid = apply_layout(scene, layout);
  return motion_cost(laid, compute_fields(laid, resolution), tasks);
}

double penetration(const Scene& scene) {
  double total = 0.0;
  const auto& objs = scene.objects;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    total += room_protrusion(objs[i].footprint, scene.room);
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      total += std::max(0.0, -rect_separation(objs[i].footprint, objs[j].footprint));
    }
  }
  return total;
}

bool is_feasible(const Scene& scene) {
  const auto& objs = scene.objects;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    if (room_protrusion(objs[i].footprint, scene.room) > 0.0) return false;
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      if (!(rect_separation(objs[i].footprint, objs[j].footprint) > 0.0)) return false;
    }
  }
  return true;
}

Objective::Objective(const RelationStats& stats, ObjectiveConfig config, std::vector<KeptEdge> edges,
                     std::optional<TaskSet> tasks, std::vector<std::string> robot_objects)
    : stats_(&stats), config_(config), edges_(std::move(edges)), tasks_(std::move(tasks)),
      robot_objects_(std::move(robot_objects)) {
  config_.validate();
}

Evaluation Objective::operator()(const Scene& scene) const {
  Evaluation ev;
  for (const KeptEdge& e : edges_) ev.human_per_edge.push_back(human_edge_cost(scene, e, *stats_));
  for (double h : ev.human_per_edge) ev.human += h;

  const SceneFields fields = compute_fields(scene, config_.resolution);
  RobotTerm rt = robot_term(scene, fields, config_.alpha, robot_objects_);
  ev.robot = rt.total;
  ev.robot_per_object = std::move(rt.per_object);
  ev.accessible_cells = rt.accessible_cells;
  ev.no_access = rt.no_access;

  if (tasks_) ev.motion = motion_cost(scene, fields, *tasks_);
  ev.penetration = penetration(scene);
  ev.total = ev.human + config_.beta * ev.robot + config_.gamma * ev.motion +
             config_.collision_penalty * ev.penetration;
  return ev;
}

Evaluation evaluate(const Scene& scene, const Layout& layout, const FunctionalGroups& groups,
                    const RelationStats& stats, const ObjectiveConfig& config, const TaskSet* tasks) {
  std::optional<TaskSet> ts;
  if (tasks != nullptr) ts = *tasks;
  return Objective(stats, config, groups.kept_edges, ts)(apply_layout(scene, layout));
}

}  // namespace colayout
