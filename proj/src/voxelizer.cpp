#include "cuboidkit/voxelizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cuboidkit/errors.hpp"
#include "cuboidkit/kernels.hpp"

namespace cuboidkit {
namespace {

// Projection interval of the triangle on `axis` against the box radius.
bool separated_on(Vec3 axis, Vec3 v0, Vec3 v1, Vec3 v2, Vec3 half) {
  const double p0 = dot(axis, v0);
  const double p1 = dot(axis, v1);
  const double p2 = dot(axis, v2);
  const double r = half.x * std::abs(axis.x) + half.y * std::abs(axis.y) + half.z * std::abs(axis.z);
  return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
}

}  // namespace

bool triangle_box_overlap(Vec3 a, Vec3 b, Vec3 c, Vec3 box_center, Vec3 half) {
  const Vec3 v0 = a - box_center;
  const Vec3 v1 = b - box_center;
  const Vec3 v2 = c - box_center;

  // Box face normals.
  for (int axis = 0; axis < 3; ++axis) {
    if (std::min({v0[axis], v1[axis], v2[axis]}) > half[axis] ||
        std::max({v0[axis], v1[axis], v2[axis]}) < -half[axis]) {
      return false;
    }
  }

  const Vec3 e0 = v1 - v0;
  const Vec3 e1 = v2 - v1;
  const Vec3 e2 = v0 - v2;

  // Triangle plane.
  const Vec3 normal = cross(e0, e1);
  if (separated_on(normal, v0, v1, v2, half)) return false;

  // Edge cross products.
  const Vec3 units[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (const Vec3& e : {e0, e1, e2}) {
    for (const Vec3& u : units) {
      const Vec3 axis = cross(u, e);
      if (axis.x == 0.0 && axis.y == 0.0 && axis.z == 0.0) continue;
      if (separated_on(axis, v0, v1, v2, half)) return false;
    }
  }
  return true;
}

VoxelGrid voxelize_surface(const TriangleMesh& normalized, int n) {
  if (n < 2) throw PreconditionError("voxel resolution must be >= 2, got " + std::to_string(n));
  constexpr double kTol = 1e-6;
  for (const auto& v : normalized.vertices) {
    for (int a = 0; a < 3; ++a) {
      if (v[a] < -kTol || v[a] > 1.0 + kTol) {
        throw PreconditionError("mesh is not normalized: vertex outside [0,1]^3");
      }
    }
  }
  return kernels::parallel::voxelize_surface(normalized, n);
}

VoxelGrid fill_interior(const VoxelGrid& grid) {
  const int n = grid.n();
  std::vector<unsigned char> exterior(grid.size(), 0);
  std::vector<std::size_t> stack;
  stack.reserve(grid.size() / 8);

  auto seed = [&](int x, int y, int z) {
    const std::size_t i = grid.index(x, y, z);
    if (!grid.test(i) && !exterior[i]) {
      exterior[i] = 1;
      stack.push_back(i);
    }
  };
  for (int y = 0; y < n; ++y)
    for (int z = 0; z < n; ++z)
      for (int x = 0; x < n; ++x)
        if (x == 0 || y == 0 || z == 0 || x == n - 1 || y == n - 1 || z == n - 1) seed(x, y, z);

  const std::size_t nn = static_cast<std::size_t>(n);
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(i % nn);
    const int z = static_cast<int>((i / nn) % nn);
    const int y = static_cast<int>(i / (nn * nn));
    if (x > 0) seed(x - 1, y, z);
    if (x < n - 1) seed(x + 1, y, z);
    if (y > 0) seed(x, y - 1, z);
    if (y < n - 1) seed(x, y + 1, z);
    if (z > 0) seed(x, y, z - 1);
    if (z < n - 1) seed(x, y, z + 1);
  }

  VoxelGrid out(n);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!exterior[i]) out.set(i);
  return out;
}

std::size_t occupancy_count(const VoxelGrid& grid) { return kernels::parallel::occupancy_count(grid); }

}  // namespace cuboidkit
