#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "colayout/geometry.hpp"
#include "colayout/scene.hpp"

namespace testing {

using namespace colayout;

inline const std::string kDataDir = COLAYOUT_DATA_DIR;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline OrientedRect random_rect(std::mt19937_64& rng) {
  return {{uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0), uniform(rng, -3.2, 3.1)},
          uniform(rng, 0.05, 1.5), uniform(rng, 0.05, 1.5)};
}

inline SceneObject make_object(std::string id, std::string label, Pose2 pose, double hx, double hy,
                               SideSet sides = SideSet::all(), bool movable = true) {
  return {std::move(id), std::move(label), {pose, hx, hy}, sides, movable};
}

inline Scene make_scene(double w, double h, std::vector<SceneObject> objects) {
  Scene s;
  s.room = {w, h};
  s.objects = std::move(objects);
  return s;
}

inline const std::vector<std::string>& corpus_labels() {
  static const std::vector<std::string> labels = {"bed", "nightstand", "chair", "table", "bookshelf",
                                                  "cabinet", "desk", "sofa", "lamp", "plant",
                                                  "wardrobe", "coffee_table", "stool", "shelf"};
  return labels;
}

/// Random scene: footprints may overlap each other but centers lie inside
/// the room. Labels come from `corpus_labels`; roughly half the objects get
/// their default sides, the rest a random nonempty side set.
inline Scene random_scene(std::mt19937_64& rng, int min_objects = 1, int max_objects = 6) {
  const double w = uniform(rng, 3.0, 8.0);
  const double h = uniform(rng, 3.0, 8.0);
  const int n = std::uniform_int_distribution<int>(min_objects, max_objects)(rng);
  std::vector<SceneObject> objects;
  const auto& labels = corpus_labels();
  for (int k = 0; k < n; ++k) {
    const std::string label = labels[std::uniform_int_distribution<std::size_t>(0, labels.size() - 1)(rng)];
    SideSet sides = SideSet::defaults_for_label(label);
    if (rng() % 2 == 0) {
      sides = SideSet();
      const int bits = std::uniform_int_distribution<int>(1, 15)(rng);
      for (Side s : {Side::Front, Side::Back, Side::Left, Side::Right}) {
        if ((bits & static_cast<int>(s)) != 0) sides.insert(s);
      }
    }
    objects.push_back(make_object(label + "_" + std::to_string(k), label,
                                  {uniform(rng, 0.3, w - 0.3), uniform(rng, 0.3, h - 0.3), uniform(rng, -3.1, 3.1)},
                                  uniform(rng, 0.15, 0.8), uniform(rng, 0.15, 0.8), sides));
  }
  Scene s = make_scene(w, h, std::move(objects));
  s.robot.r_b = uniform(rng, 0.15, 0.35);
  s.robot.d_max = uniform(rng, 0.3, 0.8);
  return s;
}

/// Crossing-number point-in-polygon test.
template <typename Poly>
bool point_in_polygon(Vec2 q, const Poly& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

/// Unsigned distance to the rectangle outline sampled at `samples` points.
inline double sampled_boundary_distance(Vec2 q, const OrientedRect& r, int samples) {
  const auto c = r.corners();
  const double len[4] = {norm(c[1] - c[0]), norm(c[2] - c[1]), norm(c[3] - c[2]), norm(c[0] - c[3])};
  const double perimeter = len[0] + len[1] + len[2] + len[3];
  double best = INFINITY;
  for (int e = 0; e < 4; ++e) {
    const Vec2 a = c[e];
    const Vec2 b = c[(e + 1) % 4];
    const int m = std::max(2, static_cast<int>(std::lround(samples * len[e] / perimeter)));
    for (int k = 0; k < m; ++k) {
      const double t = static_cast<double>(k) / (m - 1);
      best = std::min(best, norm(q - (a + t * (b - a))));
    }
  }
  return best;
}

}  // namespace testing
