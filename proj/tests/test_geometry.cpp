#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "colayout/geometry.hpp"
#include "support.hpp"

using namespace colayout;
using namespace testing;

namespace {

constexpr double kPi = std::numbers::pi;

OrientedRect square(double x, double y, double h, double theta = 0.0) { return {{x, y, theta}, h, h}; }

// Convex polygons intersect (including touching) iff an edge pair crosses or
// one contains a vertex of the other.
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
  const double d1 = orient(c, d, a), d2 = orient(c, d, b), d3 = orient(a, b, c), d4 = orient(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool polygons_intersect(const OrientedRect& p, const OrientedRect& q) {
  const auto a = p.corners();
  const auto b = q.corners();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (segments_cross(a[i], a[(i + 1) % 4], b[j], b[(j + 1) % 4])) return true;
    }
  }
  return point_in_polygon(a[0], b) || point_in_polygon(b[0], a);
}

}  // namespace

TEST_CASE("normalize_angle wraps into [-pi, pi)") {
  CHECK(normalize_angle(0.5) == 0.5);
  CHECK(normalize_angle(kPi) == doctest::Approx(-kPi));
  CHECK(normalize_angle(3 * kPi + 0.25) == doctest::Approx(-kPi + 0.25));
  CHECK(normalize_angle(-kPi) == -kPi);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    const double t = normalize_angle(uniform(rng, -50.0, 50.0));
    CHECK(t >= -kPi);
    CHECK(t < kPi);
  }
}

TEST_CASE("sd_rect on hand-checked points") {
  const OrientedRect r = square(0.0, 0.0, 1.0);
  CHECK(sd_rect({0.0, 0.0}, r) == doctest::Approx(-1.0));
  CHECK(sd_rect({2.0, 0.0}, r) == doctest::Approx(1.0));
  CHECK(sd_rect({2.0, 2.0}, r) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sd_rect({1.0, 0.3}, r) == doctest::Approx(0.0));
  CHECK(sd_rect({0.5, 0.8}, r) == doctest::Approx(-0.2));

  const OrientedRect diamond = square(0.0, 0.0, 1.0, kPi / 4);
  CHECK(sd_rect({std::sqrt(2.0) + 1.0, 0.0}, diamond) == doctest::Approx(1.0));
  CHECK(sd_rect({0.0, 0.0}, diamond) == doctest::Approx(-1.0));
}

TEST_CASE("sd_rect agrees with a boundary-sampling oracle") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const OrientedRect r = random_rect(rng);
    const Vec2 q{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0)};
    const double oracle = sampled_boundary_distance(q, r, 20000);
    const bool inside = point_in_polygon(q, r.corners());
    CHECK(sd_rect(q, r) == doctest::Approx(inside ? -oracle : oracle).epsilon(5e-3));
    if (oracle > 1e-9) CHECK((sd_rect(q, r) < 0.0) == inside);
  }
}

TEST_CASE("sd_rect is invariant under rigid motions") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 500; ++k) {
    const OrientedRect r = random_rect(rng);
    const Vec2 q{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0)};
    const double dt = uniform(rng, -kPi, kPi);
    const Vec2 shift{uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0)};
    const Vec2 pivot{0.0, 0.0};
    OrientedRect moved = r;
    moved.pose = transform_pose(r.pose, pivot, dt, shift);
    const Pose2 qp = transform_pose({q.x, q.y, 0.0}, pivot, dt, shift);
    CHECK(sd_rect(qp.position(), moved) == doctest::Approx(sd_rect(q, r)).epsilon(1e-9));
  }
}

TEST_CASE("corners are counter-clockwise and local/world round-trip") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    const OrientedRect r = random_rect(rng);
    const auto c = r.corners();
    for (int i = 0; i < 4; ++i) CHECK(cross(c[(i + 1) % 4] - c[i], c[(i + 2) % 4] - c[(i + 1) % 4]) > 0.0);
    const Vec2 q{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0)};
    const Vec2 back = r.to_world(r.to_local(q));
    CHECK(back.x == doctest::Approx(q.x));
    CHECK(back.y == doctest::Approx(q.y));
  }
}

TEST_CASE("room interior distance") {
  const Room room{4.0, 3.0};
  CHECK(sd_room_interior({2.0, 1.5}, room) == doctest::Approx(1.5));
  CHECK(sd_room_interior({0.5, 1.5}, room) == doctest::Approx(0.5));
  CHECK(sd_room_interior({0.0, 1.0}, room) == doctest::Approx(0.0));
  CHECK(sd_room_interior({-1.0, 1.5}, room) == doctest::Approx(-1.0));
  CHECK(sd_room_interior({5.0, 4.0}, room) == doctest::Approx(-std::sqrt(2.0)));
}

TEST_CASE("rect_separation on axis-aligned pairs") {
  CHECK(rect_separation(square(0, 0, 0.5), square(1.3, 0, 0.5)) == doctest::Approx(0.3));
  CHECK(rect_separation(square(0, 0, 0.5), square(0.9, 0, 0.5)) == doctest::Approx(-0.1));
  CHECK(rect_separation(square(0, 0, 0.5), square(1.0, 0, 0.5)) == doctest::Approx(0.0));
  CHECK(rect_separation(square(0, 0, 0.5), square(1.3, 1.4, 0.5)) == doctest::Approx(std::hypot(0.3, 0.4)));
  // Containment: the smallest projected overlap is the inner width.
  CHECK(rect_separation({{0, 0, 0}, 2.0, 1.0}, square(0, 0, 0.2)) == doctest::Approx(-0.4));
}

TEST_CASE("rect_separation is symmetric and its sign matches polygon intersection") {
  std::mt19937_64 rng(14);
  int overlapping = 0;
  for (int k = 0; k < 2000; ++k) {
    const OrientedRect a = random_rect(rng);
    const OrientedRect b = random_rect(rng);
    const double s = rect_separation(a, b);
    CHECK(s == rect_separation(b, a));
    if (std::abs(s) < 1e-9) continue;
    CHECK((s < 0.0) == polygons_intersect(a, b));
    if (s < 0.0) {
      ++overlapping;
    } else {
      // Disjoint: the gap is the smallest exact SDF over sampled boundary points.
      double oracle = INFINITY;
      for (const auto* from : {&a, &b}) {
        const OrientedRect& to = from == &a ? b : a;
        const auto c = from->corners();
        for (int e = 0; e < 4; ++e) {
          for (int t = 0; t <= 2000; ++t) {
            const Vec2 p = c[e] + (t / 2000.0) * (c[(e + 1) % 4] - c[e]);
            oracle = std::min(oracle, sd_rect(p, to));
          }
        }
      }
      CHECK(s == doctest::Approx(oracle).epsilon(1e-5));
    }
  }
  CHECK(overlapping > 100);
}

TEST_CASE("room_protrusion") {
  const Room room{4.0, 3.0};
  CHECK(room_protrusion(square(2, 1.5, 0.5), room) == 0.0);
  CHECK(room_protrusion(square(0.5, 1.5, 0.5), room) == 0.0);
  CHECK(room_protrusion(square(0.3, 1.5, 0.5), room) == doctest::Approx(0.2));
  CHECK(room_protrusion(square(3.9, 2.9, 0.5), room) == doctest::Approx(0.4));
}

TEST_CASE("transform_pose rotates about the pivot then shifts") {
  const Pose2 p = transform_pose({2.0, 0.0, 0.1}, {1.0, 0.0}, kPi / 2, {0.5, 0.0});
  CHECK(p.x == doctest::Approx(1.5));
  CHECK(p.y == doctest::Approx(1.0));
  CHECK(p.theta == doctest::Approx(0.1 + kPi / 2));
}

TEST_CASE("point_segment_distance and bounding_box") {
  CHECK(point_segment_distance({0.5, 1.0}, {0, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({2.0, 0.0}, {0, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({0.0, 0.0}, {0, 0}, {0, 0}) == 0.0);
  const Aabb box = bounding_box(square(1.0, 1.0, 1.0, kPi / 4));
  CHECK(box.lo.x == doctest::Approx(1.0 - std::sqrt(2.0)));
  CHECK(box.hi.y == doctest::Approx(1.0 + std::sqrt(2.0)));
}
