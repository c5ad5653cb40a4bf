#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colayout/grouping.hpp"
#include "colayout/objective.hpp"
#include "colayout/relations.hpp"
#include "colayout/scene.hpp"

namespace colayout {

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Per-coordinate box; infinite entries leave a coordinate unbounded.
struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  static Bounds unbounded(std::size_t n);
  std::size_t size() const { return lower.size(); }
  double clamp(std::size_t k, double v) const;
  std::vector<double> clamp(std::span<const double> x) const;
};

// --- adaptive simulated annealing ---------------------------------------------

struct AsaConfig {
  double t0 = 1.0;
  double cooling = 0.97;           ///< geometric, in (0, 1)
  int steps_per_temp = 10;         ///< coordinate sweeps per temperature level
  long reanneal_interval = 2000;   ///< evaluations between step-size updates
  double target_accept = 0.5;
  std::vector<double> step_sizes;  ///< initial; empty means 10% of each bound range (1.0 if unbounded)
  std::uint64_t seed = 0;
  long max_evals = 20000;

  void validate(std::size_t n) const;
};

struct AsaTracePoint {
  long evals = 0;
  double temperature = 0.0;
  double current_f = 0.0;
  double best_f = 0.0;
  double accept_rate = 0.0;
};

struct AsaResult {
  std::vector<double> x;
  double f = 0.0;
  long evals = 0;
  long proposals = 0;
  long accepted = 0;
  long downhill_proposals = 0;
  long downhill_rejected = 0;  ///< always 0: Metropolis accepts every downhill move
  std::vector<double> final_steps;
  std::vector<AsaTracePoint> trace;
};

/// Coordinate-wise annealing: each proposal moves one coordinate by
/// uniform(-s_k, s_k), clamped to bounds, and is accepted by the Metropolis
/// rule. Every `reanneal_interval` evaluations each s_k is rescaled by
/// (acceptance rate / target) clamped to [0.5, 2]. Returns the best point
/// ever visited. Throws std::invalid_argument if f(x0) is not finite.
AsaResult asa_minimize(const ObjectiveFn& f, std::span<const double> x0, const Bounds& bounds,
                       const AsaConfig& config);

// --- CMA-ES -------------------------------------------------------------------

struct CmaConfig {
  double sigma0 = 0.3;
  int lambda = 0;  ///< 0 means 4 + floor(3 ln n)
  int mu = 0;      ///< 0 means lambda / 2
  long max_evals = 10000;
  double tol_f = 1e-10;
  double max_condition = 1e14;
  /// Restarts from x0 with a doubled population after a run stops early
  /// (tol_f, condition, or sigma) while budget remains.
  int restarts = 9;
  std::uint64_t seed = 0;
};

struct CmaGeneration {
  long evals = 0;
  double best_f = 0.0;      ///< best ever so far
  double sigma = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double asymmetry = 0.0;   ///< max |C - C^T| before re-symmetrization
};

struct CmaResult {
  std::vector<double> x;
  double f = 0.0;
  long evals = 0;
  int restarts = 0;
  std::string stop_reason;  ///< why the last run ended
  std::vector<CmaGeneration> trace;
};

/// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and rank-one
/// plus rank-mu covariance updates, restarted with doubled population
/// (IPOP) while budget remains. Non-finite objective values rank last.
/// x0 is evaluated first, so the result is never worse than the start.
CmaResult cma_minimize(const ObjectiveFn& f, std::span<const double> x0, const CmaConfig& config);

// --- hierarchical scene rearrangement -----------------------------------------

enum class Strategy { Asa, Cma, AsaThenCma };
Strategy parse_strategy(const std::string& name);
std::string strategy_name(Strategy s);

struct OptimizeOptions {
  Strategy strategy = Strategy::AsaThenCma;
  std::uint64_t seed = 0;
  long stage1_evals = 2000;   ///< per functional group
  long stage2_evals = 10000;
  double asa_share = 0.7;     ///< budget fraction for ASA in asa+cma
  double working_margin = 1.0;
  double translation_step = 0.5;
  double rotation_step = 0.8;
  double cma_sigma = 0.15;
  bool snap_theta = false;

  static OptimizeOptions from_json(const nlohmann::json& j, OptimizeOptions base);
  static OptimizeOptions from_json(const nlohmann::json& j) { return from_json(j, OptimizeOptions()); }
  nlohmann::json to_json() const;
};

/// One decision unit of the flat layout vector: either a single object pose
/// (x, y, theta) or a rigid transform of a frozen group, parameterized by the
/// group's new pivot and an added heading (cx, cy, dtheta).
struct LayoutUnit {
  std::vector<std::string> ids;
  std::vector<Pose2> base_poses;  ///< group members before the transform
  Vec2 pivot;
  bool rigid = false;
};

/// Maps flat vectors to layouts. Three coordinates per unit, in unit order.
class LayoutCodec {
 public:
  LayoutCodec(Layout base, std::vector<LayoutUnit> units);

  std::size_t dimension() const { return 3 * units_.size(); }
  std::vector<double> initial() const;
  Layout decode(std::span<const double> x) const;
  const std::vector<LayoutUnit>& units() const { return units_; }

 private:
  Layout base_;
  std::vector<LayoutUnit> units_;
};

struct StageReport {
  std::string name;
  std::vector<std::string> objects;
  long evals = 0;
  double initial_f = 0.0;
  double best_f = 0.0;
  bool feasible = false;
  std::vector<std::pair<long, double>> curve;  ///< (evals, best f) at each improvement
};

struct OptimizeReport {
  bool success = false;
  std::string status;
  std::vector<StageReport> stages;
  Evaluation before;
  Evaluation after;
  bool theta_snapped = false;
};

struct OptimizeResult {
  Layout layout;
  OptimizeReport report;
};

/// Two-stage rearrangement: every multi-member functional group is first
/// optimized on its own sub-scene inside its inflated bounding box, then the
/// groups move as rigid bodies together with the singletons against the full
/// objective. Returns the best feasible layout seen, or the input layout with
/// success = false when none was feasible.
OptimizeResult optimize_scene(const Scene& scene, const FunctionalGroups& groups,
                              const RelationStats& stats, const ObjectiveConfig& config,
                              const OptimizeOptions& options, const TaskSet* tasks = nullptr);

nlohmann::json report_to_json(const OptimizeReport& report);

}  // namespace colayout
