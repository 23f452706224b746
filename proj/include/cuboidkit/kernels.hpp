#pragma once

// Data-parallel hot loops. Each kernel has a serial reference and an OpenMP
// variant with identical results; the public API calls the OpenMP variant.

#include <cstddef>
#include <span>
#include <vector>

#include "cuboidkit/geometry.hpp"
#include "cuboidkit/mesh_io.hpp"
#include "cuboidkit/voxel_grid.hpp"

namespace cuboidkit::kernels {

struct OverlapCounts {
  std::size_t intersection = 0;
  std::size_t union_ = 0;
};

/// Dense row-major IoU matrix; same-owner pairs and the diagonal are zero.
struct PairwiseIou {
  std::size_t size = 0;
  std::vector<double> values;
};

namespace serial {
VoxelGrid voxelize_surface(const TriangleMesh& mesh, int n);
std::size_t occupancy_count(const VoxelGrid& grid);
OverlapCounts overlap_counts(const VoxelGrid& a, const VoxelGrid& b);
PairwiseIou pairwise_iou(std::span<const OrientedCuboid> cuboids, std::span<const int> owner);
}  // namespace serial

namespace parallel {
VoxelGrid voxelize_surface(const TriangleMesh& mesh, int n);
std::size_t occupancy_count(const VoxelGrid& grid);
OverlapCounts overlap_counts(const VoxelGrid& a, const VoxelGrid& b);
PairwiseIou pairwise_iou(std::span<const OrientedCuboid> cuboids, std::span<const int> owner);
}  // namespace parallel

namespace detail {
// Inclusive cell range touched by a triangle's bounding box.
struct CellRange {
  int lo[3];
  int hi[3];
};
CellRange triangle_cells(Vec3 a, Vec3 b, Vec3 c, int n);
bool cell_overlaps(Vec3 a, Vec3 b, Vec3 c, int x, int y, int z, int n);
}  // namespace detail

}  // namespace cuboidkit::kernels
