#pragma once

#include <set>
#include <string>
#include <vector>

#include "colayout/field.hpp"
#include "colayout/grouping.hpp"
#include "colayout/scene.hpp"

namespace colayout {

struct RenderStyle {
  std::string accessible_fill = "#6baed6";
  double accessible_opacity = 0.5;
  std::string object_fill = "#d9d9d9";
  std::string unreachable_fill = "#fc8d59";
  std::vector<std::string> palette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                      "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  double scale = 100.0;  ///< pixels per meter
};

/// SVG of the room, the accessible region (row-run rectangles inside
/// <g id="accessible">), and labeled footprints. Multi-member groups get a
/// palette stroke; objects outside `reachable` get the unreachable fill.
/// Output depends only on the inputs.
std::string render_svg(const Scene& scene, const AccessibleRegion* region,
                       const std::set<std::string>& reachable, const FunctionalGroups* groups,
                       const RenderStyle& style = {});

}  // namespace colayout
