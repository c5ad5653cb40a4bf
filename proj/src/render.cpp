#include "colayout/render.hpp"

#include <cstdio>
#include <sstream>

#include "colayout/error.hpp"

namespace colayout {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const Scene& scene, const AccessibleRegion* region,
                       const std::set<std::string>& reachable, const FunctionalGroups* groups,
                       const RenderStyle& style) {
  if (!(style.scale > 0.0)) throw ValidationError("render scale must be positive");
  const double s = style.scale;
  const double w = scene.room.width * s;
  const double h = scene.room.height * s;
  auto sx = [&](double x) { return x * s; };
  auto sy = [&](double y) { return h - y * s; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
     << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n";
  os << "<rect id=\"room\" x=\"0.000\" y=\"0.000\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
     << "\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"2\"/>\n";

  if (region != nullptr) {
    const double r = region->resolution;
    os << "<g id=\"accessible\" fill=\"" << style.accessible_fill << "\" fill-opacity=\""
       << fmt(style.accessible_opacity) << "\">\n";
    for (int iy = 0; iy < region->ny; ++iy) {
      int ix = 0;
      while (ix < region->nx) {
        if (!region->contains(ix, iy)) {
          ++ix;
          continue;
        }
        const int start = ix;
        while (ix < region->nx && region->contains(ix, iy)) ++ix;
        os << "<rect x=\"" << fmt(sx(start * r)) << "\" y=\"" << fmt(sy((iy + 1) * r)) << "\" width=\""
           << fmt((ix - start) * r * s) << "\" height=\"" << fmt(r * s) << "\"/>\n";
      }
    }
    os << "</g>\n";
  }

  os << "<g id=\"objects\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const auto& o : scene.objects) {
    std::string stroke = "#000000";
    if (groups != nullptr) {
      const int g = groups->group_of(o.id);
      if (g >= 0 && groups->groups[static_cast<std::size_t>(g)].size() > 1 && !style.palette.empty()) {
        stroke = style.palette[static_cast<std::size_t>(g) % style.palette.size()];
      }
    }
    const std::string& fill = reachable.count(o.id) != 0 ? style.object_fill : style.unreachable_fill;
    os << "<polygon id=\"" << escape(o.id) << "\" points=\"";
    const auto corners = o.footprint.corners();
    for (std::size_t k = 0; k < corners.size(); ++k) {
      if (k != 0) os << ' ';
      os << fmt(sx(corners[k].x)) << ',' << fmt(sy(corners[k].y));
    }
    os << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\"3\"/>\n";
    const Vec2 c = o.footprint.pose.position();
    os << "<text x=\"" << fmt(sx(c.x)) << "\" y=\"" << fmt(sy(c.y))
       << "\" text-anchor=\"middle\" dominant-baseline=\"middle\">" << escape(o.id) << "</text>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace colayout
