#include "colayout/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

namespace colayout {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

}  // namespace

FieldGrid::FieldGrid(double resolution, int nx, int ny, double fill)
    : resolution_(resolution), nx_(nx), ny_(ny),
      values_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), fill) {}

FieldGrid FieldGrid::covering(const Room& room, double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw ValidationError("grid resolution must be finite and > 0");
  }
  const int nx = static_cast<int>(std::ceil(room.width / resolution - 1e-9));
  const int ny = static_cast<int>(std::ceil(room.height / resolution - 1e-9));
  if (nx < 3 || ny < 3) {
    throw ValidationError("grid resolution too coarse: the room must span at least 3x3 cells");
  }
  return FieldGrid(resolution, nx, ny);
}

std::optional<Cell> FieldGrid::locate(Vec2 q) const {
  const double fx = std::floor(q.x / resolution_);
  const double fy = std::floor(q.y / resolution_);
  if (!(fx >= 0.0 && fy >= 0.0 && fx < nx_ && fy < ny_)) return std::nullopt;
  return Cell{static_cast<int>(fx), static_cast<int>(fy)};
}

FieldGrid scene_sdf(const Scene& scene, double resolution) {
  FieldGrid grid = FieldGrid::covering(scene.room, resolution);
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const Vec2 q = grid.center(ix, iy);
      double v = sd_room_interior(q, scene.room);
      for (const auto& o : scene.objects) v = std::min(v, sd_rect(q, o.footprint));
      grid[grid.index(ix, iy)] = v;
    }
  }
  return grid;
}

FieldGrid free_space(const FieldGrid& sdf, double r_b) {
  if (!(r_b > 0.0)) throw ValidationError("robot radius must be > 0");
  FieldGrid out = sdf;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sdf[i] - r_b;
  return out;
}

AccessibleRegion accessible_region(const FieldGrid& free, std::optional<Vec2> seed_hint) {
  std::size_t seed = free.size();
  double best = 0.0;
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (!(free[i] > 0.0)) continue;
    const double score = seed_hint ? -norm(free.center(i) - *seed_hint) : free[i];
    if (seed == free.size() || score > best) {
      seed = i;
      best = score;
    }
  }
  if (seed == free.size()) throw LookupError("no free cell: the robot cannot be placed in this scene");

  AccessibleRegion region;
  region.nx = free.nx();
  region.ny = free.ny();
  region.resolution = free.resolution();
  region.mask.assign(free.size(), 0);
  region.seed = free.cell(seed);

  std::vector<std::size_t> stack{seed};
  region.mask[seed] = 1;
  while (!stack.empty()) {
    const Cell c = free.cell(stack.back());
    stack.pop_back();
    ++region.count;
    constexpr int kDx[4] = {1, -1, 0, 0};
    constexpr int kDy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nx = c.ix + kDx[k];
      const int ny = c.iy + kDy[k];
      if (!free.in_bounds(nx, ny)) continue;
      const std::size_t n = free.index(nx, ny);
      if (region.mask[n] != 0 || !(free[n] > 0.0)) continue;
      region.mask[n] = 1;
      stack.push_back(n);
    }
  }
  return region;
}

Side nearest_side(Vec2 q, const OrientedRect& r) {
  const Vec2 p = r.to_local(q);
  const double dx = std::abs(p.x) - r.hx;
  const double dy = std::abs(p.y) - r.hy;
  if (dx >= dy) return p.x >= 0.0 ? Side::Front : Side::Back;
  return p.y >= 0.0 ? Side::Left : Side::Right;
}

double interaction_value(Vec2 q, const SceneObject& object, double d_max) {
  const double outside = std::max(0.0, sd_rect(q, object.footprint));
  const double ramp = std::max(0.0, 1.0 - outside / d_max);
  if (ramp == 0.0) return 0.0;
  return object.interaction_sides.contains(nearest_side(q, object.footprint)) ? ramp : -ramp;
}

FieldGrid interaction_field(const Scene& scene, std::string_view object_id, const FieldGrid& grid) {
  const SceneObject* obj = scene.find(object_id);
  if (obj == nullptr) throw LookupError("unknown object '" + std::string(object_id) + "'");
  const double d_max = scene.robot.d_max;
  FieldGrid out(grid.resolution(), grid.nx(), grid.ny(), 0.0);

  // Outside the reach-inflated bounding box the ramp is already zero.
  const CellWindow w = reach_window(obj->footprint, d_max, grid);
  for (int iy = w.y0; iy <= w.y1; ++iy) {
    for (int ix = w.x0; ix <= w.x1; ++ix) {
      out[out.index(ix, iy)] = interaction_value(grid.center(ix, iy), *obj, d_max);
    }
  }
  return out;
}

CellWindow reach_window(const OrientedRect& footprint, double d_max, const FieldGrid& grid) {
  const Aabb box = bounding_box(footprint);
  const double h = grid.resolution();
  auto lo = [&](double v, int n) {
    return std::clamp(static_cast<int>(std::floor((v - d_max) / h)) - 1, 0, n - 1);
  };
  auto hi = [&](double v, int n) {
    return std::clamp(static_cast<int>(std::ceil((v + d_max) / h)) + 1, 0, n - 1);
  };
  return {lo(box.lo.x, grid.nx()), lo(box.lo.y, grid.ny()), hi(box.hi.x, grid.nx()),
          hi(box.hi.y, grid.ny())};
}

SceneFields compute_fields(const Scene& scene, double resolution) {
  SceneFields f;
  f.sdf = scene_sdf(scene, resolution);
  f.free = free_space(f.sdf, scene.robot.r_b);
  try {
    f.region = accessible_region(f.free, scene.robot.seed_hint);
  } catch (const LookupError&) {
    f.region.reset();
  }
  return f;
}

double shortest_path(const AccessibleRegion& region, Vec2 a, Vec2 b) {
  const double h = region.resolution;
  auto snap = [&](Vec2 q, const char* which) {
    const double fx = std::floor(q.x / h);
    const double fy = std::floor(q.y / h);
    if (!(fx >= 0.0 && fy >= 0.0 && fx < region.nx && fy < region.ny) ||
        !region.contains(static_cast<int>(fx), static_cast<int>(fy))) {
      throw LookupError(std::string("path endpoint ") + which + " is not in the accessible region");
    }
    return Cell{static_cast<int>(fx), static_cast<int>(fy)};
  };
  const Cell start = snap(a, "a");
  const Cell goal = snap(b, "b");
  if (start == goal) return 0.0;

  // Path cost is straight + diagonal * sqrt(2); keeping the two step counts
  // as integers makes the final length independent of summation order.
  struct Cost {
    int straight = 0;
    int diagonal = 0;
    double value() const { return straight + diagonal * kSqrt2; }
  };
  auto octile = [&](Cell c) {
    const int dx = std::abs(c.ix - goal.ix);
    const int dy = std::abs(c.iy - goal.iy);
    return std::abs(dx - dy) + std::min(dx, dy) * kSqrt2;
  };

  const std::size_t n = region.mask.size();
  auto idx = [&](Cell c) { return static_cast<std::size_t>(c.iy) * region.nx + c.ix; };
  std::vector<Cost> g(n, Cost{std::numeric_limits<int>::max() / 2, 0});
  std::vector<std::uint8_t> closed(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[idx(start)] = Cost{};
  open.push({octile(start), idx(start)});

  while (!open.empty()) {
    const std::size_t cur = open.top().second;
    open.pop();
    if (closed[cur] != 0) continue;
    closed[cur] = 1;
    const Cell c{static_cast<int>(cur % region.nx), static_cast<int>(cur / region.nx)};
    if (c == goal) return g[cur].value() * h;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell nb{c.ix + dx, c.iy + dy};
        if (!region.contains(nb.ix, nb.iy)) continue;
        const bool diag = dx != 0 && dy != 0;
        if (diag && (!region.contains(c.ix + dx, c.iy) || !region.contains(c.ix, c.iy + dy))) continue;
        const std::size_t ni = idx(nb);
        if (closed[ni] != 0) continue;
        Cost next = g[cur];
        if (diag) {
          ++next.diagonal;
        } else {
          ++next.straight;
        }
        if (next.value() < g[ni].value()) {
          g[ni] = next;
          open.push({next.value() + octile(nb), ni});
        }
      }
    }
  }
  throw LookupError("path endpoints lie in different accessible components");
}

void write_pgm(const FieldGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  const auto [lo_it, hi_it] = std::minmax_element(grid.values().begin(), grid.values().end());
  const double lo = grid.size() ? *lo_it : 0.0;
  const double span = grid.size() ? *hi_it - lo : 0.0;
  out << "P5\n" << grid.nx() << ' ' << grid.ny() << "\n65535\n";
  for (int iy = grid.ny() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const double t = span > 0.0 ? (grid.at(ix, iy) - lo) / span : 0.0;
      const auto v = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
      out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xff));
    }
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace colayout
