#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cuboidkit::oracle {

bool inside(const OrientedCuboid& box, Vec3 p) {
  const double dx = p.x - box.center.x;
  const double dz = p.z - box.center.z;
  // world = R(theta) local with x' = c x + s z, z' = -s x + c z, so local = R^T world
  const double c = std::cos(box.theta), s = std::sin(box.theta);
  const double lx = c * dx - s * dz;
  const double lz = s * dx + c * dz;
  return std::abs(lx) <= 0.5 * box.extents.x && std::abs(lz) <= 0.5 * box.extents.z &&
         std::abs(p.y - box.center.y) <= 0.5 * box.extents.y;
}

McEstimate mc_intersection_volume(const OrientedCuboid& a, const OrientedCuboid& b, int per_axis,
                                  std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  std::size_t hits = 0;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k) {
        const double lx = ((i + u(gen)) / per_axis - 0.5) * a.extents.x;
        const double ly = ((j + u(gen)) / per_axis - 0.5) * a.extents.y;
        const double lz = ((k + u(gen)) / per_axis - 0.5) * a.extents.z;
        const Vec3 p{a.center.x + c * lx + s * lz, a.center.y + ly, a.center.z - s * lx + c * lz};
        hits += inside(b, p) ? 1 : 0;
      }
  const double n = std::pow(static_cast<double>(per_axis), 3);
  const double p = static_cast<double>(hits) / n;
  const double vol = a.extents.x * a.extents.y * a.extents.z;
  return {vol * p, vol * std::sqrt(p * (1.0 - p) / n)};
}

namespace {

void world_aabb(const OrientedCuboid& b, Vec3& lo, Vec3& hi) {
  const double c = std::abs(std::cos(b.theta)), s = std::abs(std::sin(b.theta));
  const double hx = 0.5 * (c * b.extents.x + s * b.extents.z);
  const double hz = 0.5 * (s * b.extents.x + c * b.extents.z);
  lo = {b.center.x - hx, b.center.y - 0.5 * b.extents.y, b.center.z - hz};
  hi = {b.center.x + hx, b.center.y + 0.5 * b.extents.y, b.center.z + hz};
}

}  // namespace

double lattice_intersection(const OrientedCuboid& a, const OrientedCuboid& b, Vec3 lo, Vec3 hi, int res) {
  std::size_t both = 0;
  const Vec3 step{(hi.x - lo.x) / res, (hi.y - lo.y) / res, (hi.z - lo.z) / res};
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j)
      for (int k = 0; k < res; ++k) {
        const Vec3 p{lo.x + (i + 0.5) * step.x, lo.y + (j + 0.5) * step.y, lo.z + (k + 0.5) * step.z};
        if (inside(a, p) && inside(b, p)) ++both;
      }
  return static_cast<double>(both) * step.x * step.y * step.z;
}

double lattice_iou(const OrientedCuboid& a, const OrientedCuboid& b, int res) {
  Vec3 alo, ahi, blo, bhi;
  world_aabb(a, alo, ahi);
  world_aabb(b, blo, bhi);
  const Vec3 lo{std::min(alo.x, blo.x), std::min(alo.y, blo.y), std::min(alo.z, blo.z)};
  const Vec3 hi{std::max(ahi.x, bhi.x), std::max(ahi.y, bhi.y), std::max(ahi.z, bhi.z)};
  std::size_t both = 0, either = 0;
  const Vec3 step{(hi.x - lo.x) / res, (hi.y - lo.y) / res, (hi.z - lo.z) / res};
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j)
      for (int k = 0; k < res; ++k) {
        const Vec3 p{lo.x + (i + 0.5) * step.x, lo.y + (j + 0.5) * step.y, lo.z + (k + 0.5) * step.z};
        const bool ia = inside(a, p), ib = inside(b, p);
        both += (ia && ib) ? 1 : 0;
        either += (ia || ib) ? 1 : 0;
      }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

bool clip_overlap(Vec3 a, Vec3 b, Vec3 c, Vec3 lo, Vec3 hi) {
  constexpr double kSlack = 1e-12;
  std::vector<Vec3> poly{a, b, c};
  for (int axis = 0; axis < 3 && !poly.empty(); ++axis) {
    for (int side = 0; side < 2 && !poly.empty(); ++side) {
      // keep points with f(p) >= 0
      auto f = [&](Vec3 p) { return side == 0 ? p[axis] - lo[axis] + kSlack : hi[axis] + kSlack - p[axis]; };
      std::vector<Vec3> out;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3 p = poly[i], q = poly[(i + 1) % poly.size()];
        const double fp = f(p), fq = f(q);
        if (fp >= 0) out.push_back(p);
        if ((fp >= 0) != (fq >= 0)) out.push_back(p + (q - p) * (fp / (fp - fq)));
      }
      poly = std::move(out);
    }
  }
  return !poly.empty();
}

VoxelGrid exhaustive_surface(const TriangleMesh& mesh, int n) {
  VoxelGrid g(n);
  const double h = 1.0 / n;
  for (int y = 0; y < n; ++y)
    for (int z = 0; z < n; ++z)
      for (int x = 0; x < n; ++x) {
        const Vec3 lo{x * h, y * h, z * h};
        const Vec3 hi{(x + 1) * h, (y + 1) * h, (z + 1) * h};
        for (const auto& t : mesh.triangles) {
          if (clip_overlap(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], lo, hi)) {
            g.set(x, y, z);
            break;
          }
        }
      }
  return g;
}

std::vector<std::size_t> occupied(const VoxelGrid& g) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.test(i)) out.push_back(i);
  return out;
}

}  // namespace cuboidkit::oracle
