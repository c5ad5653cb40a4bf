#include "colayout/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace colayout {

using nlohmann::json;

namespace {

json percent_json(const Percent& p) {
  if (p.infinite) return "∞";
  return p.value;
}

std::string percent_text(const Percent& p) {
  if (p.infinite) return "∞";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.2f%%", p.value);
  return buf;
}

std::string number_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.4f", v);
  return buf;
}

}  // namespace

json SceneMetrics::to_json() const {
  json j = {{"accessible_area", accessible_area},
            {"accessible_cells", accessible_cells},
            {"reachable_ids", reachable_ids},
            {"reachable_count", reachable_ids.size()},
            {"robot_term", robot_term}};
  j["human_term"] = human_term ? json(*human_term) : json(nullptr);
  j["motion_cost"] = motion_cost ? json(*motion_cost) : json(nullptr);
  return j;
}

std::set<std::string> reachable_objects(const Scene& scene, const SceneFields& fields) {
  std::set<std::string> out;
  if (!fields.region) return out;
  const double d_max = scene.robot.d_max;
  for (const auto& o : scene.objects) {
    const CellWindow w = reach_window(o.footprint, d_max, fields.free);
    bool found = false;
    for (int iy = w.y0; iy <= w.y1 && !found; ++iy) {
      for (int ix = w.x0; ix <= w.x1 && !found; ++ix) {
        if (!fields.region->contains(ix, iy)) continue;
        found = interaction_value(fields.free.center(ix, iy), o, d_max) > 0.0;
      }
    }
    if (found) out.insert(o.id);
  }
  return out;
}

std::set<std::string> reachable_objects(const Scene& scene, const Layout& layout,
                                        const ObjectiveConfig& config) {
  const Scene laid = apply_layout(scene, layout);
  return reachable_objects(laid, compute_fields(laid, config.resolution));
}

SceneMetrics compute_metrics(const Scene& scene, const ObjectiveConfig& config,
                             const FunctionalGroups* groups, const RelationStats* stats,
                             const TaskSet* tasks) {
  const SceneFields fields = compute_fields(scene, config.resolution);
  SceneMetrics m;
  if (fields.region) {
    m.accessible_cells = fields.region->count;
    m.accessible_area = fields.region->area();
  }
  m.reachable_ids = reachable_objects(scene, fields);
  m.robot_term = robot_term(scene, fields, config.alpha).total;
  if (groups != nullptr && stats != nullptr) m.human_term = human_term(scene, groups->kept_edges, *stats);
  if (tasks != nullptr) m.motion_cost = motion_cost(scene, fields, *tasks);
  return m;
}

Percent percent_change(double before, double after) {
  if (before == 0.0) return after == 0.0 ? Percent{0.0, false} : Percent{0.0, true};
  return {100.0 * (after - before) / std::abs(before), false};
}

MetricsDelta compare(const SceneMetrics& before, const SceneMetrics& after) {
  MetricsDelta d;
  d.accessible_area_pct = percent_change(before.accessible_area, after.accessible_area);
  d.reachable_pct = percent_change(static_cast<double>(before.reachable_ids.size()),
                                   static_cast<double>(after.reachable_ids.size()));
  d.accessible_area = after.accessible_area - before.accessible_area;
  d.reachable = static_cast<long>(after.reachable_ids.size()) - static_cast<long>(before.reachable_ids.size());
  d.robot_term = after.robot_term - before.robot_term;
  if (before.human_term && after.human_term) d.human_term = *after.human_term - *before.human_term;
  if (before.motion_cost && after.motion_cost) d.motion_cost = *after.motion_cost - *before.motion_cost;
  return d;
}

MetricsDelta compare(const Scene& scene, const Layout& before, const Layout& after,
                     const ObjectiveConfig& config, const FunctionalGroups* groups,
                     const RelationStats* stats, const TaskSet* tasks) {
  return compare(compute_metrics(apply_layout(scene, before), config, groups, stats, tasks),
                 compute_metrics(apply_layout(scene, after), config, groups, stats, tasks));
}

json MetricsDelta::to_json() const {
  json j = {{"accessible_area_pct", percent_json(accessible_area_pct)},
            {"reachable_pct", percent_json(reachable_pct)},
            {"accessible_area_delta", accessible_area},
            {"reachable_delta", reachable},
            {"robot_term_delta", robot_term}};
  j["human_term_delta"] = human_term ? json(*human_term) : json(nullptr);
  j["motion_cost_delta"] = motion_cost ? json(*motion_cost) : json(nullptr);
  return j;
}

std::string MetricsDelta::table() const {
  std::ostringstream os;
  auto row = [&](const char* name, const std::string& v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-22s %s\n", name, v.c_str());
    os << buf;
  };
  row("accessible area", percent_text(accessible_area_pct) + " (" + number_text(accessible_area) + " m^2)");
  row("reachable objects", percent_text(reachable_pct) + " (" + std::to_string(reachable) + ")");
  row("robot term", number_text(robot_term));
  row("human term", human_term ? number_text(*human_term) : "n/a");
  row("motion cost", motion_cost ? number_text(*motion_cost) + " m" : "n/a");
  return os.str();
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw ValidationError("quartiles of an empty set");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

}  // namespace colayout
