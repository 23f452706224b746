#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cuboidkit/geometry.hpp"

namespace cuboidkit {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

struct Aabb {
  Vec3 min;
  Vec3 max;
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
};

/// Maps the unit-cube frame back to metric space: metric = (unit - offset) / scale.
struct NormalizationRecord {
  double scale = 1.0;
  Vec3 offset;

  Vec3 to_unit(Vec3 metric) const { return metric * scale + offset; }
  Vec3 to_metric(Vec3 unit) const { return (unit - offset) * (1.0 / scale); }
  Cuboid to_metric(const Cuboid& unit) const {
    return {to_metric(unit.center), unit.size * (1.0 / scale)};
  }
};

struct NormalizedMesh {
  TriangleMesh mesh;
  NormalizationRecord record;
};

/// Reads Wavefront OBJ text. Only `v` and `f` records are consumed; polygons
/// are fan-triangulated from their first vertex. Negative (relative) indices
/// are accepted.
TriangleMesh parse_obj(std::istream& in);
TriangleMesh load_obj(const std::filesystem::path& path);
void write_obj(std::ostream& out, const TriangleMesh& mesh);

Aabb bounds(const TriangleMesh& mesh);

/// Uniformly scales the mesh so its largest extent is 1 and centers it in
/// [0,1]^3.
NormalizedMesh normalize(const TriangleMesh& mesh);

}  // namespace cuboidkit
