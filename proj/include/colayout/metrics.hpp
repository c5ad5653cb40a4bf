#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colayout/field.hpp"
#include "colayout/grouping.hpp"
#include "colayout/objective.hpp"
#include "colayout/relations.hpp"
#include "colayout/scene.hpp"

namespace colayout {

struct SceneMetrics {
  double accessible_area = 0.0;  ///< m^2
  std::size_t accessible_cells = 0;
  std::set<std::string> reachable_ids;
  double robot_term = 0.0;
  std::optional<double> human_term;
  std::optional<double> motion_cost;

  nlohmann::json to_json() const;
};

/// Objects with an interactive face approachable from the accessible region:
/// some accessible cell lies within reach and sees a positive interaction value.
std::set<std::string> reachable_objects(const Scene& scene, const SceneFields& fields);
std::set<std::string> reachable_objects(const Scene& scene, const Layout& layout,
                                        const ObjectiveConfig& config);

/// Metrics of a laid-out scene. The human term needs both groups and stats;
/// the motion cost needs tasks.
SceneMetrics compute_metrics(const Scene& scene, const ObjectiveConfig& config,
                             const FunctionalGroups* groups = nullptr,
                             const RelationStats* stats = nullptr, const TaskSet* tasks = nullptr);

/// Relative change in percent; `infinite` when the baseline is zero and the
/// new value is not.
struct Percent {
  double value = 0.0;
  bool infinite = false;
};
Percent percent_change(double before, double after);

struct MetricsDelta {
  Percent accessible_area_pct;
  Percent reachable_pct;
  double accessible_area = 0.0;  ///< absolute delta, m^2
  long reachable = 0;
  double robot_term = 0.0;
  std::optional<double> human_term;
  std::optional<double> motion_cost;

  nlohmann::json to_json() const;
  /// Two-column human-readable summary.
  std::string table() const;
};

MetricsDelta compare(const SceneMetrics& before, const SceneMetrics& after);
MetricsDelta compare(const Scene& scene, const Layout& before, const Layout& after,
                     const ObjectiveConfig& config, const FunctionalGroups* groups = nullptr,
                     const RelationStats* stats = nullptr, const TaskSet* tasks = nullptr);

struct Quartiles {
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};
/// Linear-interpolation quartiles; throws on empty input.
Quartiles quartiles(std::vector<double> values);

}  // namespace colayout
