#include "colayout/geometry.hpp"

#include <algorithm>
#include <limits>

namespace colayout {

namespace {

constexpr double kPi = std::numbers::pi;

struct Interval {
  double lo;
  double hi;
};

Interval project(const std::array<Vec2, 4>& pts, Vec2 axis) {
  Interval iv{dot(pts[0], axis), dot(pts[0], axis)};
  for (int i = 1; i < 4; ++i) {
    const double d = dot(pts[i], axis);
    iv.lo = std::min(iv.lo, d);
    iv.hi = std::max(iv.hi, d);
  }
  return iv;
}

double min_vertex_edge_distance(const std::array<Vec2, 4>& pts,
                                const std::array<Vec2, 4>& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& p : pts) {
    for (int e = 0; e < 4; ++e) {
      best = std::min(best, point_segment_distance(p, poly[e], poly[(e + 1) % 4]));
    }
  }
  return best;
}

}  // namespace

double normalize_angle(double theta) {
  if (theta >= -kPi && theta < kPi) return theta;
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  t -= kPi;
  // fmod rounding can land exactly on +pi.
  if (t >= kPi) t = -kPi;
  return t;
}

Pose2 transform_pose(const Pose2& p, Vec2 pivot, double dtheta, Vec2 shift) {
  const double c = std::cos(dtheta);
  const double s = std::sin(dtheta);
  const Vec2 r = p.position() - pivot;
  return {pivot.x + c * r.x - s * r.y + shift.x,
          pivot.y + s * r.x + c * r.y + shift.y,
          normalize_angle(p.theta + dtheta)};
}

std::array<Vec2, 4> OrientedRect::corners() const {
  return {to_world({hx, hy}), to_world({-hx, hy}), to_world({-hx, -hy}),
          to_world({hx, -hy})};
}

Vec2 OrientedRect::to_local(Vec2 q) const {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  const double dx = q.x - pose.x;
  const double dy = q.y - pose.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 OrientedRect::to_world(Vec2 local) const {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  return {pose.x + c * local.x - s * local.y, pose.y + s * local.x + c * local.y};
}

double sd_rect(Vec2 q, const OrientedRect& r) {
  const Vec2 p = r.to_local(q);
  const double dx = std::abs(p.x) - r.hx;
  const double dy = std::abs(p.y) - r.hy;
  const double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  const double inside = std::min(std::max(dx, dy), 0.0);
  return outside + inside;
}

double sd_room_interior(Vec2 q, const Room& room) {
  const OrientedRect bounds{{0.5 * room.width, 0.5 * room.height, 0.0},
                            0.5 * room.width, 0.5 * room.height};
  // Axis-aligned, so skip the rotation to keep wall values exact.
  const double dx = std::abs(q.x - bounds.pose.x) - bounds.hx;
  const double dy = std::abs(q.y - bounds.pose.y) - bounds.hy;
  const double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  const double inside = std::min(std::max(dx, dy), 0.0);
  return -(outside + inside);
}

double point_segment_distance(Vec2 q, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(q - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(q - (a + t * ab));
}

double rect_separation(const OrientedRect& a, const OrientedRect& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();

  // Candidate axes are the edge normals of both rectangles. Each overlap is
  // computed from min/max of the same projections, so swapping a and b gives
  // identical values.
  const std::array<Vec2, 4> axes = {
      Vec2{std::cos(a.pose.theta), std::sin(a.pose.theta)},
      Vec2{-std::sin(a.pose.theta), std::cos(a.pose.theta)},
      Vec2{std::cos(b.pose.theta), std::sin(b.pose.theta)},
      Vec2{-std::sin(b.pose.theta), std::cos(b.pose.theta)}};

  double min_overlap = std::numeric_limits<double>::infinity();
  bool separated = false;
  for (const Vec2& axis : axes) {
    const Interval ia = project(ca, axis);
    const Interval ib = project(cb, axis);
    const double overlap = std::min(ia.hi, ib.hi) - std::max(ia.lo, ib.lo);
    if (overlap <= 0.0) separated = true;
    min_overlap = std::min(min_overlap, overlap);
  }
  if (!separated) return -min_overlap;

  return std::min(min_vertex_edge_distance(ca, cb), min_vertex_edge_distance(cb, ca));
}

double room_protrusion(const OrientedRect& r, const Room& room) {
  double worst = 0.0;
  for (const Vec2& c : r.corners()) {
    worst = std::max({worst, -c.x, c.x - room.width, -c.y, c.y - room.height});
  }
  return worst;
}

Aabb bounding_box(const OrientedRect& r) {
  const auto cs = r.corners();
  Aabb box{cs[0], cs[0]};
  for (const Vec2& c : cs) {
    box.lo.x = std::min(box.lo.x, c.x);
    box.lo.y = std::min(box.lo.y, c.y);
    box.hi.x = std::max(box.hi.x, c.x);
    box.hi.y = std::max(box.hi.y, c.y);
  }
  return box;
}

}  // namespace colayout
