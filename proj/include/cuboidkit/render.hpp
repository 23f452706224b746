#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cuboidkit/scene.hpp"

namespace cuboidkit {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct RenderSpec {
  int width = 256;
  int height = 256;
  std::map<int, Rgb> palette;  ///< class index -> color; missing classes get a generated color
  Rgb background{255, 255, 255};
  Rgb floor_color{220, 220, 220};

  Rgb color_for(int class_label) const;
  void validate() const;
};

struct PixelPolygon {
  std::vector<Vec2> points;  ///< pixel coordinates; Vec2::z is the image row
  Rgb color;
  int class_label = -1;
  double top = 0.0;
};

/// Orthographic x-z projection shared by the vector and raster outputs: the
/// floor first, then cuboid footprints sorted by ascending top height.
struct TopdownLayout {
  PixelPolygon floor;
  std::vector<PixelPolygon> footprints;
};

TopdownLayout layout_topdown(const Scene& scene, const RenderSpec& spec);

std::string render_topdown_svg(const Scene& scene, const RenderSpec& spec,
                               const ClassVocabulary& vocab = ClassVocabulary::front_default());

struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Rgb at(int x, int y) const;
  /// Binary PPM (P6).
  void write_ppm(std::ostream& out) const;
};

RasterImage render_topdown_raster(const Scene& scene, const RenderSpec& spec);

}  // namespace cuboidkit
