#include <omp.h>

#include <bit>
#include <cstdint>

#include "cuboidkit/kernels.hpp"
#include "cuboidkit/metrics.hpp"

namespace cuboidkit::kernels::parallel {

VoxelGrid voxelize_surface(const TriangleMesh& mesh, int n) {
  VoxelGrid grid(n);
  auto words = grid.words();
  const auto ntri = static_cast<std::ptrdiff_t>(mesh.triangles.size());

#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t ti = 0; ti < ntri; ++ti) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(ti)];
    const Vec3 a = mesh.vertices[t[0]];
    const Vec3 b = mesh.vertices[t[1]];
    const Vec3 c = mesh.vertices[t[2]];
    const auto r = detail::triangle_cells(a, b, c, n);
    for (int y = r.lo[1]; y <= r.hi[1]; ++y)
      for (int z = r.lo[2]; z <= r.hi[2]; ++z)
        for (int x = r.lo[0]; x <= r.hi[0]; ++x) {
          if (!detail::cell_overlaps(a, b, c, x, y, z, n)) continue;
          const std::size_t i = grid.index(x, y, z);
          const std::uint64_t mask = std::uint64_t{1} << (i & 63);
#pragma omp atomic
          words[i >> 6] |= mask;
        }
  }
  return grid;
}

std::size_t occupancy_count(const VoxelGrid& grid) {
  const auto words = grid.words();
  const auto nw = static_cast<std::ptrdiff_t>(words.size());
  std::size_t count = 0;
#pragma omp parallel for reduction(+ : count)
  for (std::ptrdiff_t i = 0; i < nw; ++i) {
    count += static_cast<std::size_t>(std::popcount(words[static_cast<std::size_t>(i)]));
  }
  return count;
}

OverlapCounts overlap_counts(const VoxelGrid& a, const VoxelGrid& b) {
  const auto wa = a.words();
  const auto wb = b.words();
  const auto nw = static_cast<std::ptrdiff_t>(wa.size());
  std::size_t inter = 0;
  std::size_t uni = 0;
#pragma omp parallel for reduction(+ : inter, uni)
  for (std::ptrdiff_t k = 0; k < nw; ++k) {
    const auto i = static_cast<std::size_t>(k);
    inter += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
    uni += static_cast<std::size_t>(std::popcount(wa[i] | wb[i]));
  }
  return {inter, uni};
}

PairwiseIou pairwise_iou(std::span<const OrientedCuboid> cuboids, std::span<const int> owner) {
  PairwiseIou m;
  m.size = cuboids.size();
  m.values.assign(m.size * m.size, 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(m.size);
  // Each entry is written by exactly one thread, so the result is
  // schedule-independent.
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = i + 1; j < m.size; ++j) {
      if (owner[i] == owner[j]) continue;
      const double v = iou(cuboids[i], cuboids[j]);
      m.values[i * m.size + j] = v;
      m.values[j * m.size + i] = v;
    }
  }
  return m;
}

}  // namespace cuboidkit::kernels::parallel
