// colayout: analyze, optimize, and render furniture layouts for robot access.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "colayout/error.hpp"
#include "colayout/field.hpp"
#include "colayout/grouping.hpp"
#include "colayout/metrics.hpp"
#include "colayout/objective.hpp"
#include "colayout/optimize.hpp"
#include "colayout/relations.hpp"
#include "colayout/render.hpp"
#include "colayout/scene.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace colayout;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kInfeasible = 3 };

struct Globals {
  std::optional<double> resolution;
  std::optional<std::uint64_t> seed;
  std::string config;
};

struct Settings {
  ObjectiveConfig objective;
  OptimizeOptions optimizer;
};

Settings load_settings(const Globals& g) {
  Settings s;
  if (!g.config.empty()) {
    const json j = read_json_file(g.config);
    s.objective = ObjectiveConfig::from_json(j);
    if (auto it = j.find("optimizer"); it != j.end()) s.optimizer = OptimizeOptions::from_json(*it);
  }
  if (g.resolution) {
    s.objective.resolution = *g.resolution;
    s.objective.validate();
  }
  if (g.seed) s.optimizer.seed = *g.seed;
  return s;
}

void write_text(const std::string& text, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(j, path);
  }
}

json groups_json(const FunctionalGroups& groups) {
  json edges = json::array();
  for (const auto& e : groups.kept_edges) edges.push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
  return {{"groups", groups.groups}, {"kept_edges", edges}};
}

struct Relations {
  RelationStats stats;
  SemanticTable semantic;
};

std::optional<Relations> load_relations(const std::string& stats, const std::string& semantic) {
  if (stats.empty() && semantic.empty()) return std::nullopt;
  if (stats.empty() || semantic.empty()) throw ValidationError("--stats and --semantic must be given together");
  return Relations{RelationStats::load(stats), SemanticTable::load(semantic)};
}

std::vector<fs::path> json_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Applies `fn` to every item on a few worker threads; results keep input order.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, Fn fn) {
  using R = decltype(fn(items.front()));
  std::vector<R> out(items.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < items.size(); i += workers) out[i] = fn(items[i]);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

// --- analyze -------------------------------------------------------------------

struct AnalyzeArgs {
  std::string scene, stats, semantic, tasks, field, out;
};

int cmd_analyze(const Globals& g, const AnalyzeArgs& a) {
  const Settings s = load_settings(g);
  const Scene scene = load_scene(a.scene);
  const auto rel = load_relations(a.stats, a.semantic);
  std::optional<TaskSet> tasks;
  if (!a.tasks.empty()) {
    tasks = TaskSet::from_json(read_json_file(a.tasks));
    tasks->validate(scene);
  }
  json out = {{"format_version", kFormatVersion}};
  std::optional<FunctionalGroups> groups;
  if (rel) {
    groups = extract_groups(build_graph(scene, rel->semantic, rel->stats), 2, s.optimizer.seed);
    out.update(groups_json(*groups));
  }
  const SceneMetrics m = compute_metrics(scene, s.objective, groups ? &*groups : nullptr,
                                         rel ? &rel->stats : nullptr, tasks ? &*tasks : nullptr);
  out["metrics"] = m.to_json();
  if (!a.field.empty()) {
    const SceneFields fields = compute_fields(scene, s.objective.resolution);
    write_pgm(free_space(fields.sdf, scene.robot.r_b), a.field);
  }
  emit(out, a.out);
  return kOk;
}

// --- optimize ------------------------------------------------------------------

struct OptimizeArgs {
  std::string scene, stats, semantic, tasks, strategy, out, report, scene_out;
  bool snap_theta = false;
};

int cmd_optimize(const Globals& g, const OptimizeArgs& a) {
  Settings s = load_settings(g);
  if (!a.strategy.empty()) s.optimizer.strategy = parse_strategy(a.strategy);
  if (a.snap_theta) s.optimizer.snap_theta = true;
  const Scene scene = load_scene(a.scene);
  const auto rel = load_relations(a.stats, a.semantic);
  if (!rel) throw ValidationError("optimize requires --stats and --semantic");
  std::optional<TaskSet> tasks;
  if (!a.tasks.empty()) {
    tasks = TaskSet::from_json(read_json_file(a.tasks));
    tasks->validate(scene);
  }
  const FunctionalGroups groups = extract_groups(build_graph(scene, rel->semantic, rel->stats), 2, s.optimizer.seed);
  const OptimizeResult result =
      optimize_scene(scene, groups, rel->stats, s.objective, s.optimizer, tasks ? &*tasks : nullptr);

  const Scene before = scene;
  const Scene after = apply_layout(scene, result.layout);
  const TaskSet* tp = tasks ? &*tasks : nullptr;
  json report = {{"format_version", kFormatVersion},
                 {"scene", fs::path(a.scene).filename().string()},
                 {"config", s.objective.to_json()},
                 {"optimizer", s.optimizer.to_json()},
                 {"seed", s.optimizer.seed},
                 {"strategy", strategy_name(s.optimizer.strategy)}};
  report.update(groups_json(groups));
  report["result"] = report_to_json(result.report);
  report["metrics"] = {{"before", compute_metrics(before, s.objective, &groups, &rel->stats, tp).to_json()},
                       {"after", compute_metrics(after, s.objective, &groups, &rel->stats, tp).to_json()}};

  if (!a.out.empty()) write_json_file(layout_to_json(result.layout), a.out);
  if (!a.scene_out.empty()) save_scene(after, a.scene_out);
  if (!a.report.empty()) write_json_file(report, a.report);
  if (a.out.empty() && a.report.empty()) std::cout << layout_to_json(result.layout).dump(2) << '\n';
  if (!result.report.success) {
    std::cerr << "colayout: " << result.report.status << '\n';
    return kInfeasible;
  }
  return kOk;
}

// --- stats-build ---------------------------------------------------------------

struct StatsArgs {
  std::string corpus, out;
  double bin_width = 0.25;
};

int cmd_stats_build(const StatsArgs& a) {
  if (!fs::is_directory(a.corpus)) throw ValidationError("--corpus: not a directory: " + a.corpus);
  const auto files = json_files(a.corpus);
  const auto scenes = parallel_map(files, [](const fs::path& p) { return load_scene(p); });
  const RelationStats stats = stats_build(scenes, a.bin_width);
  emit(stats.to_json(), a.out);
  return kOk;
}

// --- compare -------------------------------------------------------------------

struct CompareArgs {
  std::string before, after, scene, stats, semantic, out;
  bool table = false;
};

Scene scene_or_layout(const fs::path& path, const std::optional<Scene>& base) {
  const json j = read_json_file(path);
  if (j.contains("room")) return scene_from_json(j);
  if (!base) throw ValidationError(path.string() + ": layout files need --scene");
  return apply_layout(*base, layout_from_json(j));
}

json percent_token(const Percent& p) {
  if (p.infinite) return "∞";
  return p.value;
}

int cmd_compare(const Globals& g, const CompareArgs& a) {
  const Settings s = load_settings(g);
  std::optional<Scene> base;
  if (!a.scene.empty()) base = load_scene(a.scene);
  const auto rel = load_relations(a.stats, a.semantic);

  auto metrics_pair = [&](const fs::path& bp, const fs::path& ap) {
    const Scene before = scene_or_layout(bp, base);
    const Scene after = scene_or_layout(ap, base);
    std::optional<FunctionalGroups> groups;
    if (rel) groups = extract_groups(build_graph(before, rel->semantic, rel->stats), 2, s.optimizer.seed);
    const FunctionalGroups* gp = groups ? &*groups : nullptr;
    const RelationStats* sp = rel ? &rel->stats : nullptr;
    return std::pair{compute_metrics(before, s.objective, gp, sp), compute_metrics(after, s.objective, gp, sp)};
  };

  if (fs::is_directory(a.before) || fs::is_directory(a.after)) {
    if (!fs::is_directory(a.before) || !fs::is_directory(a.after)) {
      throw ValidationError("compare: both arguments must be directories or both files");
    }
    std::vector<std::string> names;
    for (const auto& p : json_files(a.before)) {
      if (fs::exists(fs::path(a.after) / p.filename())) names.push_back(p.filename().string());
    }
    if (names.empty()) throw ValidationError("compare: no scene pairs with matching file names");
    const auto deltas = parallel_map(names, [&](const std::string& n) {
      const auto [mb, ma] = metrics_pair(fs::path(a.before) / n, fs::path(a.after) / n);
      return compare(mb, ma);
    });
    json pairs = json::array();
    std::vector<double> area, reach;
    std::size_t area_inf = 0, reach_inf = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
      json d = deltas[i].to_json();
      d["name"] = names[i];
      pairs.push_back(d);
      if (deltas[i].accessible_area_pct.infinite) ++area_inf; else area.push_back(deltas[i].accessible_area_pct.value);
      if (deltas[i].reachable_pct.infinite) ++reach_inf; else reach.push_back(deltas[i].reachable_pct.value);
    }
    auto q_json = [](const std::vector<double>& v, std::size_t inf) {
      json j = {{"infinite", inf}, {"count", v.size()}};
      if (!v.empty()) {
        const Quartiles q = quartiles(v);
        j["q25"] = q.q25;
        j["median"] = q.median;
        j["q75"] = q.q75;
      }
      return j;
    };
    const json out = {{"format_version", kFormatVersion},
                      {"pairs", pairs},
                      {"accessible_area_pct", q_json(area, area_inf)},
                      {"reachable_pct", q_json(reach, reach_inf)}};
    emit(out, a.out);
    return kOk;
  }

  const auto [mb, ma] = metrics_pair(a.before, a.after);
  const MetricsDelta d = compare(mb, ma);
  const json out = {{"format_version", kFormatVersion},
                    {"before", mb.to_json()},
                    {"after", ma.to_json()},
                    {"delta", d.to_json()}};
  if (a.table || a.out.empty()) std::cout << d.table();
  if (!a.out.empty()) write_json_file(out, a.out);
  return kOk;
}

// --- render --------------------------------------------------------------------

struct RenderArgs {
  std::string scene, layout, stats, semantic, out;
  double scale = 100.0;
};

int cmd_render(const Globals& g, const RenderArgs& a) {
  const Settings s = load_settings(g);
  Scene scene = load_scene(a.scene);
  if (!a.layout.empty()) scene = apply_layout(scene, layout_from_json(read_json_file(a.layout)));
  const auto rel = load_relations(a.stats, a.semantic);
  std::optional<FunctionalGroups> groups;
  if (rel) groups = extract_groups(build_graph(scene, rel->semantic, rel->stats), 2, s.optimizer.seed);
  const SceneFields fields = compute_fields(scene, s.objective.resolution);
  RenderStyle style;
  style.scale = a.scale;
  const std::string svg = render_svg(scene, fields.region ? &*fields.region : nullptr,
                                     reachable_objects(scene, fields), groups ? &*groups : nullptr, style);
  if (a.out.empty()) {
    std::cout << svg;
  } else {
    write_text(svg, a.out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Furniture layout analysis and rearrangement for robot accessibility"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--resolution", g.resolution, "Grid cell size in meters")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--config", g.config, "Objective/optimizer config JSON")->check(CLI::ExistingFile);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Print functional groups and accessibility metrics");
  analyze->add_option("scene", an.scene, "Scene JSON")->required();
  analyze->add_option("--stats", an.stats, "Relation statistics JSON");
  analyze->add_option("--semantic", an.semantic, "Semantic table JSON");
  analyze->add_option("--tasks", an.tasks, "Task set JSON");
  analyze->add_option("--field", an.field, "Write the free-space field as PGM");
  analyze->add_option("--out", an.out, "Write JSON here instead of stdout");

  OptimizeArgs op;
  auto* optimize = app.add_subcommand("optimize", "Rearrange a scene");
  optimize->add_option("scene", op.scene, "Scene JSON")->required();
  optimize->add_option("--stats", op.stats, "Relation statistics JSON")->required();
  optimize->add_option("--semantic", op.semantic, "Semantic table JSON")->required();
  optimize->add_option("--tasks", op.tasks, "Task set JSON");
  optimize->add_option("--strategy", op.strategy, "asa | cma | asa+cma")
      ->check(CLI::IsMember({"asa", "cma", "asa+cma"}));
  optimize->add_option("--out", op.out, "Layout JSON output");
  optimize->add_option("--report", op.report, "Report JSON output");
  optimize->add_option("--scene-out", op.scene_out, "Full rearranged scene JSON output");
  optimize->add_flag("--snap-theta", op.snap_theta, "Round headings to multiples of 90 degrees");
  // --seed is accepted both before and after the subcommand name.
  optimize->add_option("--seed", g.seed, "Random seed (required)");
  optimize->add_option("--config", g.config, "Objective/optimizer config JSON")->check(CLI::ExistingFile);

  StatsArgs st;
  auto* stats = app.add_subcommand("stats-build", "Build relation statistics from a scene corpus");
  stats->add_option("--corpus", st.corpus, "Directory of scene JSON files")->required();
  stats->add_option("--bin-width", st.bin_width, "Distance histogram bin width (m)")->check(CLI::PositiveNumber);
  stats->add_option("--out", st.out, "Output JSON");

  CompareArgs cp;
  auto* cmp = app.add_subcommand("compare", "Compare two layouts or two directories of scenes");
  cmp->add_option("before", cp.before, "Scene/layout file or directory")->required();
  cmp->add_option("after", cp.after, "Scene/layout file or directory")->required();
  cmp->add_option("--scene", cp.scene, "Base scene for layout files");
  cmp->add_option("--stats", cp.stats, "Relation statistics JSON");
  cmp->add_option("--semantic", cp.semantic, "Semantic table JSON");
  cmp->add_option("--out", cp.out, "Delta JSON output");
  cmp->add_flag("--table", cp.table, "Also print a text table");

  RenderArgs rd;
  auto* render = app.add_subcommand("render", "Write an SVG of a layout");
  render->add_option("scene", rd.scene, "Scene JSON")->required();
  render->add_option("--layout", rd.layout, "Layout JSON applied to the scene");
  render->add_option("--stats", rd.stats, "Relation statistics JSON (group coloring)");
  render->add_option("--semantic", rd.semantic, "Semantic table JSON (group coloring)");
  render->add_option("--scale", rd.scale, "Pixels per meter")->check(CLI::PositiveNumber);
  render->add_option("--out", rd.out, "SVG output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(g, an);
    if (*optimize) {
      if (!g.seed) {
        std::cerr << "colayout optimize: --seed is required\n";
        return kUsage;
      }
      return cmd_optimize(g, op);
    }
    if (*stats) return cmd_stats_build(st);
    if (*cmp) return cmd_compare(g, cp);
    if (*render) return cmd_render(g, rd);
  } catch (const ParseError& e) {
    std::cerr << "colayout: " << e.what() << '\n';
    return kInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "colayout: " << e.what() << '\n';
    return kInvalid;
  } catch (const LookupError& e) {
    std::cerr << "colayout: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "colayout: " << e.what() << '\n';
    return kInvalid;
  }
  return kUsage;
}
