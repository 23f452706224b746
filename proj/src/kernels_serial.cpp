#include <algorithm>
#include <bit>
#include <cmath>

#include "cuboidkit/kernels.hpp"
#include "cuboidkit/metrics.hpp"
#include "cuboidkit/voxelizer.hpp"

namespace cuboidkit::kernels {

namespace detail {

CellRange triangle_cells(Vec3 a, Vec3 b, Vec3 c, int n) {
  constexpr double kSlack = 1e-9;
  CellRange r{};
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = std::min({a[axis], b[axis], c[axis]}) * n;
    const double hi = std::max({a[axis], b[axis], c[axis]}) * n;
    r.lo[axis] = std::clamp(static_cast<int>(std::floor(lo - kSlack)), 0, n - 1);
    r.hi[axis] = std::clamp(static_cast<int>(std::floor(hi + kSlack)), 0, n - 1);
  }
  return r;
}

bool cell_overlaps(Vec3 a, Vec3 b, Vec3 c, int x, int y, int z, int n) {
  const double h = 0.5 / n;
  const Vec3 center{(x + 0.5) / n, (y + 0.5) / n, (z + 0.5) / n};
  // A hair of slack keeps faces lying on cell planes conservative.
  const Vec3 half{h + 1e-12, h + 1e-12, h + 1e-12};
  return triangle_box_overlap(a, b, c, center, half);
}

}  // namespace detail

namespace serial {

VoxelGrid voxelize_surface(const TriangleMesh& mesh, int n) {
  VoxelGrid grid(n);
  for (const auto& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]];
    const Vec3 b = mesh.vertices[t[1]];
    const Vec3 c = mesh.vertices[t[2]];
    const auto r = detail::triangle_cells(a, b, c, n);
    for (int y = r.lo[1]; y <= r.hi[1]; ++y)
      for (int z = r.lo[2]; z <= r.hi[2]; ++z)
        for (int x = r.lo[0]; x <= r.hi[0]; ++x)
          if (!grid.test(x, y, z) && detail::cell_overlaps(a, b, c, x, y, z, n)) grid.set(x, y, z);
  }
  return grid;
}

std::size_t occupancy_count(const VoxelGrid& grid) {
  std::size_t count = 0;
  for (auto w : grid.words()) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

OverlapCounts overlap_counts(const VoxelGrid& a, const VoxelGrid& b) {
  OverlapCounts out;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    out.intersection += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
    out.union_ += static_cast<std::size_t>(std::popcount(wa[i] | wb[i]));
  }
  return out;
}

PairwiseIou pairwise_iou(std::span<const OrientedCuboid> cuboids, std::span<const int> owner) {
  PairwiseIou m;
  m.size = cuboids.size();
  m.values.assign(m.size * m.size, 0.0);
  for (std::size_t i = 0; i < m.size; ++i) {
    for (std::size_t j = i + 1; j < m.size; ++j) {
      if (owner[i] == owner[j]) continue;
      const double v = iou(cuboids[i], cuboids[j]);
      m.values[i * m.size + j] = v;
      m.values[j * m.size + i] = v;
    }
  }
  return m;
}

}  // namespace serial
}  // namespace cuboidkit::kernels
