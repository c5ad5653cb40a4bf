#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "colayout/field.hpp"
#include "colayout/grouping.hpp"
#include "colayout/relations.hpp"
#include "colayout/scene.hpp"

namespace colayout {

struct ObjectiveConfig {
  double alpha = 0.1;              ///< open-space weight inside the robot term
  double beta = 1.0;               ///< robot-term weight
  double gamma = 0.0;              ///< motion-cost weight; 0 disables
  double collision_penalty = 10.0; ///< per meter of penetration
  double resolution = 0.05;        ///< grid cell size in meters

  void validate() const;
  static ObjectiveConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// A task waypoint is either an object id or a point in the room.
using Waypoint = std::variant<std::string, Vec2>;

struct Task {
  std::string name;
  std::vector<Waypoint> waypoints;
};

struct TaskSet {
  std::vector<Task> tasks;

  /// Throws ValidationError when a waypoint names an unknown object.
  void validate(const Scene& scene) const;
  static TaskSet from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RobotTerm {
  double total = 0.0;
  std::map<std::string, double> per_object;
  std::size_t accessible_cells = 0;
  bool no_access = false;  ///< no free cell anywhere; every term is 0
};

struct Evaluation {
  double human = 0.0;
  double robot = 0.0;
  double motion = 0.0;
  double penetration = 0.0;
  double total = 0.0;
  std::map<std::string, double> robot_per_object;
  std::vector<double> human_per_edge;  ///< in kept-edge order
  std::size_t accessible_cells = 0;
  bool no_access = false;

  nlohmann::json to_json() const;
};

/// Per-edge human cost: 1 - density / max density at the current center
/// distance; 0.5 for label pairs without statistics.
double human_edge_cost(const Scene& scene, const KeptEdge& edge, const RelationStats& stats);
double human_term(const Scene& scene, const std::vector<KeptEdge>& edges, const RelationStats& stats);
double human_term(const Scene& scene, const Layout& layout, const FunctionalGroups& groups,
                  const RelationStats& stats);

/// Robot term from precomputed fields. `objects` restricts which objects
/// contribute; empty means all.
RobotTerm robot_term(const Scene& scene, const SceneFields& fields, double alpha,
                     const std::vector<std::string>& objects = {});
RobotTerm robot_term(const Scene& scene, const Layout& layout, const ObjectiveConfig& config);

/// Summed grid path lengths over every task's consecutive waypoints. A leg
/// that cannot be traveled costs four room perimeters.
double motion_cost(const Scene& scene, const SceneFields& fields, const TaskSet& tasks);
double motion_cost(const Scene& scene, const Layout& layout, const TaskSet& tasks,
                   double resolution = 0.05);

/// Accessible cell from which a robot can work on `object_id`, nearest to
/// its center, or nullopt.
std::optional<Vec2> approach_point(const Scene& scene, const SceneFields& fields,
                                   const std::string& object_id);

/// Sum of pairwise penetration depths plus every footprint's protrusion
/// through the walls.
double penetration(const Scene& scene);
/// Strictly positive pairwise separations and every footprint inside the room.
bool is_feasible(const Scene& scene);

/// Reusable objective over laid-out scenes.
class Objective {
 public:
  Objective(const RelationStats& stats, ObjectiveConfig config, std::vector<KeptEdge> edges,
            std::optional<TaskSet> tasks = std::nullopt, std::vector<std::string> robot_objects = {});

  Evaluation operator()(const Scene& scene) const;
  const ObjectiveConfig& config() const { return config_; }

 private:
  const RelationStats* stats_;
  ObjectiveConfig config_;
  std::vector<KeptEdge> edges_;
  std::optional<TaskSet> tasks_;
  std::vector<std::string> robot_objects_;
};

Evaluation evaluate(const Scene& scene, const Layout& layout, const FunctionalGroups& groups,
                    const RelationStats& stats, const ObjectiveConfig& config,
                    const TaskSet* tasks = nullptr);

}  // namespace colayout
