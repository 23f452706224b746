#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cuboidkit/geometry.hpp"
#include "cuboidkit/voxel_grid.hpp"

namespace cuboidkit {

/// Integer box in voxel coordinates covering [min, min + extent) per axis.
struct VoxelCuboid {
  std::array<int, 3> min{0, 0, 0};
  std::array<int, 3> extent{1, 1, 1};

  int end(int axis) const { return min[axis] + extent[axis]; }
  std::int64_t volume() const {
    return std::int64_t{extent[0]} * std::int64_t{extent[1]} * std::int64_t{extent[2]};
  }
  bool contains(int x, int y, int z) const {
    return x >= min[0] && x < end(0) && y >= min[1] && y < end(1) && z >= min[2] && z < end(2);
  }
  friend bool operator==(const VoxelCuboid&, const VoxelCuboid&) = default;
};

/// Segmentation regions are plain voxel boxes.
using VoxelRegion = VoxelCuboid;

/// True when the boxes share interior voxels.
bool overlaps(const VoxelCuboid& a, const VoxelCuboid& b);
/// True when the 1-voxel dilations meet (face, edge or corner contact).
bool adjacent(const VoxelCuboid& a, const VoxelCuboid& b);
VoxelCuboid bounding(const VoxelCuboid& a, const VoxelCuboid& b);

struct MergeConfig {
  double tau_min = 1.0;
  double tau_max = 1.5;
  /// Decay volume S of the dynamic threshold, in voxels.
  double scale_s = 4096.0;
  bool use_dynamic = true;
  double tau_static = 1.2;
  int max_segments_k = 8;

  /// Defaults for resolution n: S = (n/4)^3.
  static MergeConfig defaults_for(int n);
  /// Throws PreconditionError on out-of-range fields.
  void validate() const;
};

/// tau_min + (tau_max - tau_min) * exp(-merged_volume / S)
double dynamic_threshold(const MergeConfig& config, double merged_volume);
/// The acceptance bound actually applied, honoring `use_dynamic`.
double merge_threshold(const MergeConfig& config, double merged_volume);

/// Greedy single-layer decomposition. Scans y, then z, then x; each seed
/// voxel grows a maximal x-run, then extends in z while whole rows are free.
std::vector<VoxelCuboid> coarse_grain(const VoxelGrid& grid);
/// Same, restricted to the voxels inside `region`.
std::vector<VoxelCuboid> coarse_grain(const VoxelGrid& grid, const VoxelRegion& region);

/// Covers the occupied voxels with at most k boxes. Works on the x-z floor
/// projection: starting from the bounding rectangle it repeatedly carves out
/// the largest empty rectangle, splitting the host into 2, 3 or 4 pieces,
/// and keeps whichever of the horizontal-first and vertical-first splits has
/// less volume. Pieces are extruded over the occupied y-range.
std::vector<VoxelRegion> segment_projection(const VoxelGrid& grid, int k);

/// Pairwise merging into bounding boxes while V_C / (V_A + V_B) < tau.
///
/// Candidate pairs are adjacent cuboids, tried in ascending V_A + V_B order
/// (ties by creation order) and the scan restarts after every merge. A merge
/// whose bounding box would overlap a third cuboid is refused, so the output
/// stays pairwise disjoint. When `regions` is non-empty, cuboids fully inside
/// a region are first merged among themselves, then everything is merged
/// globally. Throws PreconditionError when the input overlaps.
std::vector<VoxelCuboid> merge_cuboids(std::span<const VoxelCuboid> cuboids,
                                       const MergeConfig& config,
                                       std::span<const VoxelRegion> regions = {});

struct VoxelAbstraction {
  std::vector<VoxelRegion> regions;
  std::vector<VoxelCuboid> coarse;
  std::vector<VoxelCuboid> merged;
};

/// segment_projection -> per-region coarse_grain -> merge_cuboids.
VoxelAbstraction abstract_voxels(const VoxelGrid& grid, const MergeConfig& config);

/// abstract_voxels mapped into the [0,1]^3 local frame.
std::vector<Cuboid> abstract_shape(const VoxelGrid& grid, const MergeConfig& config);

Cuboid to_local_frame(const VoxelCuboid& c, int n);

}  // namespace cuboidkit
