#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace colayout {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Wraps an angle into [-pi, pi). Values already in range are returned
/// unchanged so that serialization round-trips bit-exactly.
double normalize_angle(double theta);

/// Planar pose: position plus heading.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose2&, const Pose2&) = default;
};

/// Rigid transform of `p` by rotation `dtheta` about `pivot` followed by
/// translation `shift`.
Pose2 transform_pose(const Pose2& p, Vec2 pivot, double dtheta, Vec2 shift);

/// Footprint of a piece of furniture. Local +x is the object's front,
/// -x its back, +y its left and -y its right.
struct OrientedRect {
  Pose2 pose;
  double hx = 0.5;
  double hy = 0.5;

  /// Counter-clockwise corners in world coordinates.
  std::array<Vec2, 4> corners() const;
  Vec2 to_local(Vec2 q) const;
  Vec2 to_world(Vec2 local) const;

  friend bool operator==(const OrientedRect&, const OrientedRect&) = default;
};

/// Axis-aligned room with its lower-left corner at the origin.
struct Room {
  double width = 1.0;
  double height = 1.0;

  bool contains(Vec2 q) const {
    return q.x >= 0.0 && q.x <= width && q.y >= 0.0 && q.y <= height;
  }
  friend bool operator==(const Room&, const Room&) = default;
};

/// Exact signed distance from q to the rectangle boundary: negative inside.
double sd_rect(Vec2 q, const OrientedRect& r);

/// Distance to the nearest wall: positive inside the room, negative outside.
double sd_room_interior(Vec2 q, const Room& room);

/// Boundary-to-boundary distance for disjoint rectangles; negative minimum
/// translation distance (separating-axis overlap) when they intersect.
/// Symmetric in its arguments bit-for-bit.
double rect_separation(const OrientedRect& a, const OrientedRect& b);

/// How far the rectangle sticks out of the room along the worst axis
/// (0 when fully inside; touching a wall counts as inside).
double room_protrusion(const OrientedRect& r, const Room& room);

double point_segment_distance(Vec2 q, Vec2 a, Vec2 b);

/// Axis-aligned bounds of the rectangle's corners.
struct Aabb {
  Vec2 lo;
  Vec2 hi;
};
Aabb bounding_box(const OrientedRect& r);

}  // namespace colayout
