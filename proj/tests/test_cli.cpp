#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace colayout;
using namespace testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("colayout_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + COLAYOUT_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string data(const std::string& name) { return "\"" + kDataDir + "/" + name + "\""; }

std::string write_scene(const std::string& name, const Scene& s) {
  const fs::path p = scratch() / name;
  save_scene(s, p);
  return "\"" + p.string() + "\"";
}

std::string write_text(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return "\"" + p.string() + "\"";
}

std::string small_config() {
  return write_text("small_config.json", R"({"format_version": 1, "resolution": 0.1,
    "optimizer": {"strategy": "asa", "stage1_evals": 100, "stage2_evals": 200}})");
}

}  // namespace

TEST_CASE("analyze succeeds and stamps the format version") {
  const Run r = run("analyze " + data("scenes/bedroom_fig1.json") + " --stats " + data("stats.json") +
                    " --semantic " + data("semantic.json"));
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["format_version"] == 1);
  CHECK(j.contains("metrics"));
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("analyze").code == 1);
  CHECK(run("render " + data("scenes/bedroom_fig1.json") + " --scale -2").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("optimize requires a seed") {
  const Run r = run("optimize " + data("scenes/bedroom_fig1.json") + " --stats " + data("stats.json") +
                    " --semantic " + data("semantic.json"));
  CHECK(r.code == 1);
  CHECK(r.err.find("--seed") != std::string::npos);
}

TEST_CASE("invalid input exits with 2 and names the field") {
  const std::string bad = write_text("bad_scene.json", R"({"format_version": 1,
    "room": {"width": -3, "height": 2}, "robot": {"r_b": 0.2, "d_max": 0.5}, "objects": []})");
  const Run r = run("analyze " + bad);
  CHECK(r.code == 2);
  CHECK(r.err.find("room.width") != std::string::npos);

  const Run missing = run("analyze \"" + (scratch() / "does_not_exist.json").string() + "\"");
  CHECK(missing.code == 2);

  const std::string version = write_text("bad_version.json", R"({"format_version": 7,
    "room": {"width": 3, "height": 2}, "robot": {"r_b": 0.2, "d_max": 0.5}, "objects": []})");
  const Run v = run("analyze " + version);
  CHECK(v.code == 2);
  CHECK(v.err.find("format_version") != std::string::npos);
}

TEST_CASE("optimize on a small scene writes layout, scene and report") {
  const Scene s = make_scene(4.0, 3.0, {make_object("table", "table", {1.0, 1.0, 0.0}, 0.4, 0.3),
                                        make_object("chair", "chair", {1.6, 1.0, 0.0}, 0.2, 0.2),
                                        make_object("bed", "bed", {3.0, 2.0, 0.0}, 0.5, 0.4)});
  const std::string scene = write_scene("small.json", s);
  const fs::path report = scratch() / "report.json";
  const fs::path layout = scratch() / "layout.json";
  const fs::path scene_out = scratch() / "after.json";
  const std::string args = "--config " + small_config() + " optimize " + scene + " --stats " + data("stats.json") +
                           " --semantic " + data("semantic.json") + " --seed 3 --out \"" + layout.string() +
                           "\" --report \"" + report.string() + "\" --scene-out \"" + scene_out.string() + "\"";
  const Run r = run(args);
  REQUIRE(r.code == 0);
  const auto rep = read_json_file(report);
  CHECK(rep["format_version"] == 1);
  CHECK(rep["seed"] == 3);
  CHECK(rep["result"]["success"] == true);
  CHECK(read_json_file(layout)["format_version"] == 1);
  const Scene after = load_scene(scene_out);
  CHECK(after.objects.size() == s.objects.size());

  // Same seed, same bytes.
  const std::string first = slurp(layout);
  REQUIRE(run(args).code == 0);
  CHECK(slurp(layout) == first);
}

TEST_CASE("optimize on an infeasible scene exits with 3") {
  // The only movable object overlaps a fixed one wherever it goes.
  const Scene s = make_scene(2.0, 2.0, {make_object("big", "table", {1.0, 1.0, 0.0}, 0.9, 0.9),
                                        make_object("pin", "plant", {1.0, 1.0, 0.0}, 0.1, 0.1, SideSet::all(), false)});
  const Run r = run("--config " + small_config() + " optimize " + write_scene("overlap.json", s) + " --stats " +
                    data("stats.json") + " --semantic " + data("semantic.json") + " --seed 0");
  CHECK(r.code == 3);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("stats-build, compare and render") {
  const fs::path stats = scratch() / "stats.json";
  const Run b = run("stats-build --corpus " + data("corpus") + " --out \"" + stats.string() + "\"");
  REQUIRE(b.code == 0);
  CHECK(read_json_file(stats)["format_version"] == 1);

  const fs::path delta_path = scratch() / "delta.json";
  const Run c = run("compare " + data("scenes/bedroom_fig1.json") + " " + data("regression/bedroom_after.json") +
                    " --out \"" + delta_path.string() + "\" --table");
  REQUIRE(c.code == 0);
  CHECK(c.out.find("%") != std::string::npos);
  const auto delta = read_json_file(delta_path);
  CHECK(delta["format_version"] == 1);
  CHECK(delta["delta"]["accessible_area_delta"].get<double>() > 0.0);

  const fs::path svg = scratch() / "out.svg";
  REQUIRE(run("render " + data("scenes/bedroom_fig1.json") + " --out \"" + svg.string() + "\"").code == 0);
  CHECK(slurp(svg).rfind("<svg", 0) == 0);
}
