#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "colayout/optimize.hpp"

namespace colayout {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundPenalty = 10.0;

/// Wraps the scene objective for a solver: clamps into the box (with a
/// quadratic penalty for the excess) and remembers the best feasible point.
class TrackedObjective {
 public:
  TrackedObjective(const Scene& scene, const LayoutCodec& codec, const Objective& objective,
                   const Bounds& bounds)
      : scene_(scene), codec_(codec), objective_(objective), bounds_(bounds) {}

  double operator()(std::span<const double> x) {
    const std::vector<double> xc = bounds_.clamp(x);
    double excess = 0.0;
    for (std::size_t k = 0; k < xc.size(); ++k) excess += (x[k] - xc[k]) * (x[k] - xc[k]);
    const Scene laid = apply_layout(scene_, codec_.decode(xc));
    const Evaluation ev = objective_(laid);
    ++evals_;
    const double f = ev.total + kBoundPenalty * excess;
    if (f < best_f_) {
      best_f_ = f;
      curve_.emplace_back(evals_, f);
    }
    if (ev.penetration == 0.0 && ev.total < best_feasible_f_ && is_feasible(laid)) {
      best_feasible_f_ = ev.total;
      best_feasible_x_ = xc;
    }
    return f;
  }

  long evals() const { return evals_; }
  double best_f() const { return best_f_; }
  bool has_feasible() const { return !best_feasible_x_.empty(); }
  double best_feasible_f() const { return best_feasible_f_; }
  const std::vector<double>& best_feasible_x() const { return best_feasible_x_; }
  const std::vector<std::pair<long, double>>& curve() const { return curve_; }

 private:
  const Scene& scene_;
  const LayoutCodec& codec_;
  const Objective& objective_;
  const Bounds& bounds_;
  long evals_ = 0;
  double best_f_ = kInf;
  double best_feasible_f_ = kInf;
  std::vector<double> best_feasible_x_;
  std::vector<std::pair<long, double>> curve_;
};

std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t stage) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stage + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Typical uphill move size from a few single-coordinate probes; used as the
/// initial annealing temperature.
double probe_temperature(const ObjectiveFn& f, std::span<const double> x0, const Bounds& bounds,
                         std::span<const double> steps, long& used) {
  const double f0 = f(x0);
  ++used;
  std::vector<double> deltas;
  for (std::size_t k = 0; k < x0.size(); ++k) {
    for (double dir : {-1.0, 1.0}) {
      std::vector<double> y(x0.begin(), x0.end());
      y[k] = bounds.clamp(k, y[k] + dir * 0.5 * steps[k]);
      const double fy = f(y);
      ++used;
      if (std::isfinite(fy) && fy != f0) deltas.push_back(std::abs(fy - f0));
    }
  }
  if (deltas.empty()) return 1e-2;
  std::nth_element(deltas.begin(), deltas.begin() + deltas.size() / 2, deltas.end());
  return std::max(deltas[deltas.size() / 2], 1e-4);
}

void run_strategy(const ObjectiveFn& f, std::vector<double> x0, const Bounds& bounds,
                  std::vector<double> steps, long budget, const OptimizeOptions& opt,
                  std::uint64_t seed) {
  const std::size_t n = x0.size();
  long asa_budget = 0;
  if (opt.strategy == Strategy::Asa) asa_budget = budget;
  if (opt.strategy == Strategy::AsaThenCma) {
    asa_budget = static_cast<long>(std::llround(static_cast<double>(budget) * opt.asa_share));
  }
  long used = 0;
  std::vector<double> start = std::move(x0);
  if (asa_budget > 0) {
    AsaConfig asa;
    asa.t0 = probe_temperature(f, start, bounds, steps, used);
    asa.steps_per_temp = 2;
    const long remaining = std::max(1L, asa_budget - used);
    const double levels = std::max(1.0, static_cast<double>(remaining) / (asa.steps_per_temp * n));
    asa.cooling = std::clamp(std::exp(std::log(1e-3) / levels), 0.5, 0.999999);
    asa.reanneal_interval = std::max(50L, remaining / 8);
    asa.step_sizes = std::move(steps);
    asa.seed = seed;
    asa.max_evals = remaining;
    const AsaResult r = asa_minimize(f, start, bounds, asa);
    used += r.evals;
    start = r.x;
  }
  const long cma_budget = budget - used;
  if (opt.strategy != Strategy::Asa && cma_budget > 1) {
    CmaConfig cma;
    cma.sigma0 = opt.cma_sigma;
    cma.max_evals = cma_budget;
    cma.seed = seed ^ 0xC3A5C85C97CB3127ULL;
    cma.tol_f = 1e-10;
    cma_minimize(f, start, cma);
  }
}

std::vector<double> unit_steps(const LayoutCodec& codec, const OptimizeOptions& opt) {
  std::vector<double> steps;
  for (std::size_t u = 0; u < codec.units().size(); ++u) {
    steps.insert(steps.end(), {opt.translation_step, opt.translation_step, opt.rotation_step});
  }
  return steps;
}

Layout snap_headings(const Layout& layout) {
  Layout out = layout;
  const double quarter = 0.5 * std::numbers::pi;
  for (auto& [id, p] : out) p.theta = normalize_angle(std::round(p.theta / quarter) * quarter);
  return out;
}

json stage_to_json(const StageReport& s) {
  json curve = json::array();
  for (const auto& [e, f] : s.curve) curve.push_back({e, f});
  return {{"name", s.name},   {"objects", s.objects}, {"evals", s.evals}, {"initial_f", s.initial_f},
          {"best_f", s.best_f}, {"feasible", s.feasible}, {"best_f_curve", curve}};
}

}  // namespace

Strategy parse_strategy(const std::string& name) {
  if (name == "asa") return Strategy::Asa;
  if (name == "cma") return Strategy::Cma;
  if (name == "asa+cma") return Strategy::AsaThenCma;
  throw std::invalid_argument("unknown strategy '" + name + "' (expected asa, cma or asa+cma)");
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Asa: return "asa";
    case Strategy::Cma: return "cma";
    case Strategy::AsaThenCma: return "asa+cma";
  }
  return "asa+cma";
}

OptimizeOptions OptimizeOptions::from_json(const json& j, OptimizeOptions base) {
  auto num = [&](const char* key, auto& field) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number()) throw ParseError(std::string("optimizer.") + key + ": expected a number");
      field = it->get<std::remove_reference_t<decltype(field)>>();
    }
  };
  num("stage1_evals", base.stage1_evals);
  num("stage2_evals", base.stage2_evals);
  num("asa_share", base.asa_share);
  num("working_margin", base.working_margin);
  num("translation_step", base.translation_step);
  num("rotation_step", base.rotation_step);
  num("cma_sigma", base.cma_sigma);
  if (auto it = j.find("strategy"); it != j.end()) base.strategy = parse_strategy(it->get<std::string>());
  if (auto it = j.find("snap_theta"); it != j.end()) base.snap_theta = it->get<bool>();
  if (base.stage1_evals < 0 || base.stage2_evals < 0) throw ValidationError("optimizer budgets must be >= 0");
  if (!(base.asa_share >= 0.0 && base.asa_share <= 1.0)) throw ValidationError("optimizer.asa_share must lie in [0, 1]");
  return base;
}

json OptimizeOptions::to_json() const {
  return {{"strategy", strategy_name(strategy)},
          {"seed", seed},
          {"stage1_evals", stage1_evals},
          {"stage2_evals", stage2_evals},
          {"asa_share", asa_share},
          {"working_margin", working_margin},
          {"translation_step", translation_step},
          {"rotation_step", rotation_step},
          {"cma_sigma", cma_sigma},
          {"snap_theta", snap_theta}};
}

LayoutCodec::LayoutCodec(Layout base, std::vector<LayoutUnit> units)
    : base_(std::move(base)), units_(std::move(units)) {
  for (const auto& u : units_) {
    if (u.ids.empty() || u.ids.size() != u.base_poses.size()) {
      throw std::invalid_argument("layout unit needs one base pose per id");
    }
    if (!u.rigid && u.ids.size() != 1) throw std::invalid_argument("a free unit holds exactly one object");
  }
}

std::vector<double> LayoutCodec::initial() const {
  std::vector<double> x;
  x.reserve(dimension());
  for (const auto& u : units_) {
    if (u.rigid) {
      x.insert(x.end(), {u.pivot.x, u.pivot.y, 0.0});
    } else {
      const Pose2& p = u.base_poses.front();
      x.insert(x.end(), {p.x, p.y, p.theta});
    }
  }
  return x;
}

Layout LayoutCodec::decode(std::span<const double> x) const {
  if (x.size() != dimension()) throw std::invalid_argument("layout vector has the wrong dimension");
  Layout out = base_;
  for (std::size_t u = 0; u < units_.size(); ++u) {
    const LayoutUnit& unit = units_[u];
    const double a = x[3 * u], b = x[3 * u + 1], t = x[3 * u + 2];
    if (unit.rigid) {
      const Vec2 shift{a - unit.pivot.x, b - unit.pivot.y};
      for (std::size_t m = 0; m < unit.ids.size(); ++m) {
        out[unit.ids[m]] = transform_pose(unit.base_poses[m], unit.pivot, t, shift);
      }
    } else {
      out[unit.ids.front()] = Pose2{a, b, normalize_angle(t)};
    }
  }
  return out;
}

OptimizeResult optimize_scene(const Scene& scene, const FunctionalGroups& groups,
                              const RelationStats& stats, const ObjectiveConfig& config,
                              const OptimizeOptions& options, const TaskSet* tasks) {
  config.validate();
  std::optional<TaskSet> task_copy;
  if (tasks != nullptr) {
    tasks->validate(scene);
    task_copy = *tasks;
  }

  const Layout input = current_layout(scene);
  const Objective full(stats, config, groups.kept_edges, task_copy);

  OptimizeResult result;
  result.report.before = full(scene);
  Layout working = input;
  std::uint64_t stage = 0;

  // Stage 1: each group on its own sub-scene (members plus fixed structure).
  for (std::size_t g = 0; g < groups.groups.size(); ++g) {
    const auto& members = groups.groups[g];
    if (members.size() < 2) continue;
    Scene sub{scene.room, {}, scene.robot};
    std::vector<LayoutUnit> units;
    Aabb box{{kInf, kInf}, {-kInf, -kInf}};
    for (const auto& o : scene.objects) {
      const bool member = std::find(members.begin(), members.end(), o.id) != members.end();
      if (!member && o.movable) continue;
      sub.objects.push_back(o);
      if (!member) continue;
      const Aabb b = bounding_box(o.footprint);
      box.lo = {std::min(box.lo.x, b.lo.x), std::min(box.lo.y, b.lo.y)};
      box.hi = {std::max(box.hi.x, b.hi.x), std::max(box.hi.y, b.hi.y)};
      if (o.movable) units.push_back({{o.id}, {o.footprint.pose}, {}, false});
    }
    ++stage;
    if (units.empty()) continue;

    std::vector<KeptEdge> internal;
    for (const auto& e : groups.kept_edges) {
      if (groups.group_of(e.a) == static_cast<int>(g)) internal.push_back(e);
    }
    const Objective local(stats, config, internal, std::nullopt, members);
    const LayoutCodec codec(current_layout(sub), units);
    Bounds bounds = Bounds::unbounded(codec.dimension());
    const double m = options.working_margin;
    for (std::size_t u = 0; u < units.size(); ++u) {
      bounds.lower[3 * u] = std::max(0.0, box.lo.x - m);
      bounds.upper[3 * u] = std::min(scene.room.width, box.hi.x + m);
      bounds.lower[3 * u + 1] = std::max(0.0, box.lo.y - m);
      bounds.upper[3 * u + 1] = std::min(scene.room.height, box.hi.y + m);
    }
    TrackedObjective tracked(sub, codec, local, bounds);
    const ObjectiveFn fn = [&](std::span<const double> x) { return tracked(x); };
    const std::vector<double> x0 = codec.initial();

    StageReport rep;
    rep.name = "group";
    rep.objects = members;
    rep.initial_f = local(sub).total;
    run_strategy(fn, x0, bounds, unit_steps(codec, options), options.stage1_evals, options,
                 stage_seed(options.seed, stage));
    rep.evals = tracked.evals();
    rep.best_f = tracked.best_f();
    rep.feasible = tracked.has_feasible();
    rep.curve = tracked.curve();
    if (tracked.has_feasible()) {
      for (const auto& [id, pose] : codec.decode(tracked.best_feasible_x())) {
        if (working.contains(id)) working[id] = pose;
      }
    }
    result.report.stages.push_back(std::move(rep));
  }

  // Stage 2: frozen groups move rigidly, singletons move freely.
  const Scene staged = apply_layout(scene, working);
  std::vector<LayoutUnit> units;
  std::vector<std::string> stage2_ids;
  for (std::size_t g = 0; g < groups.groups.size(); ++g) {
    const auto& members = groups.groups[g];
    bool all_movable = true;
    for (const auto& id : members) all_movable = all_movable && staged.find(id)->movable;
    if (members.size() >= 2) {
      if (!all_movable) continue;
      LayoutUnit u;
      u.rigid = true;
      u.ids = members;
      for (const auto& id : members) {
        u.base_poses.push_back(staged.find(id)->footprint.pose);
        u.pivot = u.pivot + staged.find(id)->footprint.pose.position();
      }
      u.pivot = (1.0 / static_cast<double>(members.size())) * u.pivot;
      units.push_back(std::move(u));
    } else if (all_movable) {
      units.push_back({members, {staged.find(members.front())->footprint.pose}, {}, false});
    } else {
      continue;
    }
    stage2_ids.insert(stage2_ids.end(), members.begin(), members.end());
  }

  Layout best = input;
  double best_total = kInf;
  bool found = false;
  if (is_feasible(scene)) {
    best_total = result.report.before.total;
    found = true;
  }

  ++stage;
  if (!units.empty()) {
    const LayoutCodec codec(working, units);
    Bounds bounds = Bounds::unbounded(codec.dimension());
    for (std::size_t u = 0; u < units.size(); ++u) {
      bounds.lower[3 * u] = 0.0;
      bounds.upper[3 * u] = scene.room.width;
      bounds.lower[3 * u + 1] = 0.0;
      bounds.upper[3 * u + 1] = scene.room.height;
    }
    TrackedObjective tracked(scene, codec, full, bounds);
    const ObjectiveFn fn = [&](std::span<const double> x) { return tracked(x); };

    StageReport rep;
    rep.name = "scene";
    rep.objects = stage2_ids;
    rep.initial_f = full(staged).total;
    run_strategy(fn, codec.initial(), bounds, unit_steps(codec, options), options.stage2_evals,
                 options, stage_seed(options.seed, stage));
    rep.evals = tracked.evals();
    rep.best_f = tracked.best_f();
    rep.feasible = tracked.has_feasible();
    rep.curve = tracked.curve();
    result.report.stages.push_back(std::move(rep));

    if (tracked.has_feasible() && tracked.best_feasible_f() < best_total) {
      best = codec.decode(tracked.best_feasible_x());
      best_total = tracked.best_feasible_f();
      found = true;
    }
  } else if (is_feasible(staged)) {
    const double t = full(staged).total;
    if (t < best_total) {
      best = working;
      best_total = t;
      found = true;
    }
  }

  if (!found) {
    result.layout = input;
    result.report.success = false;
    result.report.status = "infeasible: no collision-free layout found";
    result.report.after = result.report.before;
    return result;
  }

  if (options.snap_theta) {
    const Layout snapped = snap_headings(best);
    const Scene s = apply_layout(scene, snapped);
    if (is_feasible(s)) {
      best = snapped;
      result.report.theta_snapped = true;
    }
  }
  result.layout = best;
  result.report.success = true;
  result.report.status = "ok";
  result.report.after = full(apply_layout(scene, best));
  return result;
}

json report_to_json(const OptimizeReport& r) {
  json stages = json::array();
  for (const auto& s : r.stages) stages.push_back(stage_to_json(s));
  return {{"success", r.success},   {"status", r.status},
          {"stages", stages},       {"before", r.before.to_json()},
          {"after", r.after.to_json()}, {"theta_snapped", r.theta_snapped}};
}

}  // namespace colayout
