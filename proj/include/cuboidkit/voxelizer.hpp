#pragma once

#include <cstddef>

#include "cuboidkit/geometry.hpp"
#include "cuboidkit/mesh_io.hpp"
#include "cuboidkit/voxel_grid.hpp"

namespace cuboidkit {

inline constexpr int kDefaultResolution = 64;

/// Separating-axis triangle/box overlap. Touching counts as overlap.
bool triangle_box_overlap(Vec3 a, Vec3 b, Vec3 c, Vec3 box_center, Vec3 box_half);

/// Marks every cell whose closed box meets a triangle. The mesh must already
/// lie in [0,1]^3 (tolerance 1e-6).
VoxelGrid voxelize_surface(const TriangleMesh& normalized, int n);

/// Sets everything not reachable from the grid boundary through empty voxels
/// (6-connected).
VoxelGrid fill_interior(const VoxelGrid& grid);

std::size_t occupancy_count(const VoxelGrid& grid);

}  // namespace cuboidkit
