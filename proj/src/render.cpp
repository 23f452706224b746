#include "cuboidkit/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "cuboidkit/errors.hpp"

namespace cuboidkit {

Rgb RenderSpec::color_for(int class_label) const {
  if (auto it = palette.find(class_label); it != palette.end()) return it->second;
  // Golden-ratio hue walk.
  const double h = std::fmod(0.13 + class_label * 0.6180339887498949, 1.0) * 6.0;
  const double s = 0.55, v = 0.85;
  const double c = v * s;
  const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  const double m = v - c;
  auto to8 = [&](double u) { return static_cast<std::uint8_t>(std::lround((u + m) * 255.0)); };
  return {to8(r), to8(g), to8(b)};
}

void RenderSpec::validate() const {
  if (width < 16 || height < 16) throw PreconditionError("render size must be at least 16x16");
}

TopdownLayout layout_topdown(const Scene& scene, const RenderSpec& spec) {
  spec.validate();
  struct Item {
    std::array<Vec2, 4> corners;
    int label;
    double top;
  };
  std::vector<Item> items;
  for (const auto& obj : scene.objects) {
    for (const auto& wc : world_cuboids(obj)) items.push_back({wc.footprint(), obj.class_label, wc.top()});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.top < b.top; });

  double x0 = std::numeric_limits<double>::infinity(), z0 = x0;
  double x1 = -x0, z1 = -x0;
  auto extend = [&](Vec2 p) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    z0 = std::min(z0, p.z);
    z1 = std::max(z1, p.z);
  };
  for (const auto& v : scene.floor.vertices) extend(v);
  for (const auto& it : items)
    for (const auto& p : it.corners) extend(p);
  if (!std::isfinite(x0)) x0 = z0 = 0.0, x1 = z1 = 1.0;

  const double margin = 0.04 * std::min(spec.width, spec.height);
  const double span_x = std::max(x1 - x0, 1e-9);
  const double span_z = std::max(z1 - z0, 1e-9);
  const double scale = std::min((spec.width - 2 * margin) / span_x, (spec.height - 2 * margin) / span_z);
  const double ox = 0.5 * (spec.width - scale * span_x);
  const double oz = 0.5 * (spec.height - scale * span_z);
  auto to_px = [&](Vec2 p) { return Vec2{ox + (p.x - x0) * scale, oz + (p.z - z0) * scale}; };

  TopdownLayout out;
  out.floor.color = spec.floor_color;
  for (const auto& v : scene.floor.vertices) out.floor.points.push_back(to_px(v));
  for (const auto& it : items) {
    PixelPolygon poly;
    for (const auto& p : it.corners) poly.points.push_back(to_px(p));
    poly.color = spec.color_for(it.label);
    poly.class_label = it.label;
    poly.top = it.top;
    out.footprints.push_back(std::move(poly));
  }
  return out;
}

namespace {

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

std::string points_attr(const std::vector<Vec2>& pts) {
  std::string s;
  char buf[64];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", pts[i].x, pts[i].z);
    s += buf;
  }
  return s;
}

bool inside(const std::vector<Vec2>& poly, Vec2 p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.z > p.z) != (b.z > p.z) && p.x < (b.x - a.x) * (p.z - a.z) / (b.z - a.z) + a.x) in = !in;
  }
  return in;
}

}  // namespace

std::string render_topdown_svg(const Scene& scene, const RenderSpec& spec, const ClassVocabulary& vocab) {
  const auto layout = layout_topdown(scene, spec);
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\">\n";
  svg += "  <rect width=\"" + std::to_string(spec.width) + "\" height=\"" + std::to_string(spec.height) +
         "\" fill=\"" + hex(spec.background) + "\"/>\n";
  svg += "  <polygon class=\"floor\" points=\"" + points_attr(layout.floor.points) + "\" fill=\"" +
         hex(layout.floor.color) + "\" stroke=\"#808080\" stroke-width=\"1\"/>\n";
  for (const auto& f : layout.footprints) {
    const std::string name =
        f.class_label >= 0 && static_cast<std::size_t>(f.class_label) < vocab.size() ? vocab.name(f.class_label) : "";
    svg += "  <polygon class=\"cuboid\" data-class=\"" + name + "\" points=\"" + points_attr(f.points) +
           "\" fill=\"" + hex(f.color) + "\" stroke=\"#202020\" stroke-width=\"0.5\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

Rgb RasterImage::at(int x, int y) const {
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
  return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void RasterImage::write_ppm(std::ostream& out) const {
  out << "P6\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

RasterImage render_topdown_raster(const Scene& scene, const RenderSpec& spec) {
  const auto layout = layout_topdown(scene, spec);
  RasterImage img{spec.width, spec.height, {}};
  img.rgb.resize(3 * static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height));
  auto paint = [&](const PixelPolygon& poly, bool fill_all) {
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        if (!fill_all && !inside(poly.points, {x + 0.5, y + 0.5})) continue;
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(spec.width) + static_cast<std::size_t>(x));
        img.rgb[i] = poly.color.r;
        img.rgb[i + 1] = poly.color.g;
        img.rgb[i + 2] = poly.color.b;
      }
  };
  paint(PixelPolygon{{}, spec.background, -1, 0.0}, true);
  paint(layout.floor, false);
  for (const auto& f : layout.footprints) paint(f, false);
  return img;
}

}  // namespace cuboidkit
