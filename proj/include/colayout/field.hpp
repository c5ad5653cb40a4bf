#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "colayout/scene.hpp"

namespace colayout {

struct Cell {
  int ix = 0;
  int iy = 0;
  friend bool operator==(Cell, Cell) = default;
};

/// Scalar field sampled at cell centers over the room. Row-major, origin at
/// the room corner: cell (ix, iy) has center ((ix + 0.5) h, (iy + 0.5) h).
class FieldGrid {
 public:
  FieldGrid() = default;
  FieldGrid(double resolution, int nx, int ny, double fill = 0.0);
  /// Grid covering `room` at `resolution`; throws if either side has < 3 cells.
  static FieldGrid covering(const Room& room, double resolution);

  double resolution() const { return resolution_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return values_.size(); }
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }
  Cell cell(std::size_t index) const {
    return {static_cast<int>(index % nx_), static_cast<int>(index / nx_)};
  }
  bool in_bounds(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < nx_ && iy < ny_; }
  Vec2 center(int ix, int iy) const { return {(ix + 0.5) * resolution_, (iy + 0.5) * resolution_}; }
  Vec2 center(std::size_t index) const {
    const Cell c = cell(index);
    return center(c.ix, c.iy);
  }
  /// Cell containing q, or nullopt outside the grid.
  std::optional<Cell> locate(Vec2 q) const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(int ix, int iy) const { return values_[index(ix, iy)]; }
  const std::vector<double>& values() const { return values_; }

 private:
  double resolution_ = 1.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> values_;
};

/// Cells reachable by the robot from a seed through positive clearance.
struct AccessibleRegion {
  int nx = 0;
  int ny = 0;
  double resolution = 1.0;
  std::vector<std::uint8_t> mask;
  Cell seed;
  std::size_t count = 0;

  bool contains(int ix, int iy) const {
    return ix >= 0 && iy >= 0 && ix < nx && iy < ny && mask[static_cast<std::size_t>(iy) * nx + ix] != 0;
  }
  double area() const { return static_cast<double>(count) * resolution * resolution; }
};

/// Scene signed distance: min over footprints and the room-interior distance.
FieldGrid scene_sdf(const Scene& scene, double resolution);

/// Robot clearance: f_B - r_b per cell.
FieldGrid free_space(const FieldGrid& sdf, double r_b);

/// 4-connected flood fill over cells with clearance > 0. The seed is the free
/// cell nearest `seed_hint`, or the cell of maximal clearance without a hint
/// (lowest row-major index on ties). Throws LookupError if no cell is free.
AccessibleRegion accessible_region(const FieldGrid& free, std::optional<Vec2> seed_hint);

/// Which face of the rectangle q is nearest to, in the object frame.
Side nearest_side(Vec2 q, const OrientedRect& r);

/// Signed reach ramp around one object at a single point.
double interaction_value(Vec2 q, const SceneObject& object, double d_max);

/// The pseudo-interaction field of one object over the grid: +/- ramp from 1
/// at the boundary to 0 at distance d_max, signed by the approached face.
FieldGrid interaction_field(const Scene& scene, std::string_view object_id, const FieldGrid& grid);

/// Length of the shortest 8-connected path between the cells holding a and
/// b. Diagonal steps may not cut a blocked corner.
double shortest_path(const AccessibleRegion& region, Vec2 a, Vec2 b);

/// The fields every robot-side quantity is built from. `region` is empty
/// when no cell has positive clearance.
struct SceneFields {
  FieldGrid sdf;
  FieldGrid free;
  std::optional<AccessibleRegion> region;
};
SceneFields compute_fields(const Scene& scene, double resolution);

/// Cell index window [x0, x1] x [y0, y1] of the object's reach band.
struct CellWindow {
  int x0, y0, x1, y1;
};
CellWindow reach_window(const OrientedRect& footprint, double d_max, const FieldGrid& grid);

/// Dumps the field as a 16-bit binary PGM, linearly scaled to [min, max].
void write_pgm(const FieldGrid& grid, const std::filesystem::path& path);

}  // namespace colayout
