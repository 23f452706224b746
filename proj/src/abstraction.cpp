#include "cuboidkit/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <tuple>

#include "cuboidkit/errors.hpp"

namespace cuboidkit {

bool overlaps(const VoxelCuboid& a, const VoxelCuboid& b) {
  for (int axis = 0; axis < 3; ++axis) {
    if (a.min[axis] >= b.end(axis) || b.min[axis] >= a.end(axis)) return false;
  }
  return true;
}

bool adjacent(const VoxelCuboid& a, const VoxelCuboid& b) {
  for (int axis = 0; axis < 3; ++axis) {
    if (a.min[axis] > b.end(axis) || b.min[axis] > a.end(axis)) return false;
  }
  return true;
}

VoxelCuboid bounding(const VoxelCuboid& a, const VoxelCuboid& b) {
  VoxelCuboid c;
  for (int axis = 0; axis < 3; ++axis) {
    c.min[axis] = std::min(a.min[axis], b.min[axis]);
    c.extent[axis] = std::max(a.end(axis), b.end(axis)) - c.min[axis];
  }
  return c;
}

MergeConfig MergeConfig::defaults_for(int n) {
  MergeConfig c;
  const double q = n / 4.0;
  c.scale_s = q * q * q;
  return c;
}

void MergeConfig::validate() const {
  if (!(tau_min >= 1.0)) throw PreconditionError("tau_min must be >= 1");
  if (!(tau_max >= tau_min)) throw PreconditionError("tau_max must be >= tau_min");
  if (!(scale_s > 0.0)) throw PreconditionError("scale S must be positive");
  if (!(tau_static >= 1.0)) throw PreconditionError("tau_static must be >= 1");
  if (max_segments_k < 1) throw PreconditionError("segment budget k must be >= 1");
}

double dynamic_threshold(const MergeConfig& config, double merged_volume) {
  return config.tau_min + (config.tau_max - config.tau_min) * std::exp(-merged_volume / config.scale_s);
}

double merge_threshold(const MergeConfig& config, double merged_volume) {
  return config.use_dynamic ? dynamic_threshold(config, merged_volume) : config.tau_static;
}

// ---------------------------------------------------------------------------
// Coarse-graining

std::vector<VoxelCuboid> coarse_grain(const VoxelGrid& grid, const VoxelRegion& region) {
  std::vector<VoxelCuboid> out;
  const int x0 = region.min[0], x1 = region.end(0);
  const int z0 = region.min[2], z1 = region.end(2);
  const int w = region.extent[0];
  std::vector<unsigned char> assigned(static_cast<std::size_t>(w) * static_cast<std::size_t>(region.extent[2]));

  for (int y = region.min[1]; y < region.end(1); ++y) {
    std::fill(assigned.begin(), assigned.end(), 0);
    auto free_at = [&](int x, int z) {
      return grid.test(x, y, z) &&
             !assigned[static_cast<std::size_t>(z - z0) * static_cast<std::size_t>(w) +
                       static_cast<std::size_t>(x - x0)];
    };
    for (int z = z0; z < z1; ++z) {
      for (int x = x0; x < x1; ++x) {
        if (!free_at(x, z)) continue;
        int xe = x + 1;
        while (xe < x1 && free_at(xe, z)) ++xe;
        int ze = z + 1;
        while (ze < z1) {
          bool row_free = true;
          for (int xi = x; xi < xe && row_free; ++xi) row_free = free_at(xi, ze);
          if (!row_free) break;
          ++ze;
        }
        for (int zi = z; zi < ze; ++zi)
          for (int xi = x; xi < xe; ++xi)
            assigned[static_cast<std::size_t>(zi - z0) * static_cast<std::size_t>(w) +
                     static_cast<std::size_t>(xi - x0)] = 1;
        out.push_back({{x, y, z}, {xe - x, 1, ze - z}});
        x = xe - 1;
      }
    }
  }
  return out;
}

std::vector<VoxelCuboid> coarse_grain(const VoxelGrid& grid) {
  const int n = grid.n();
  return coarse_grain(grid, VoxelRegion{{0, 0, 0}, {n, n, n}});
}

// ---------------------------------------------------------------------------
// Projection segmentation

namespace {

struct Rect {
  int x0, z0, x1, z1;  // half-open
  int width() const { return x1 - x0; }
  int depth() const { return z1 - z0; }
  std::int64_t area() const { return std::int64_t{width()} * depth(); }
};

class Projection {
 public:
  explicit Projection(const VoxelGrid& grid) : n_(grid.n()), ymin_(n_ * n_, n_), ymax_(n_ * n_, -1) {
    for (int y = 0; y < n_; ++y)
      for (int z = 0; z < n_; ++z)
        for (int x = 0; x < n_; ++x)
          if (grid.test(x, y, z)) {
            auto& lo = ymin_[cell(x, z)];
            auto& hi = ymax_[cell(x, z)];
            lo = std::min(lo, y);
            hi = std::max(hi, y);
          }
  }

  int n() const { return n_; }
  bool occupied(int x, int z) const { return ymax_[cell(x, z)] >= 0; }

  /// Shrinks `r` to the footprint of its occupied cells; extrudes over their
  /// y-range.
  std::optional<VoxelRegion> tighten(const Rect& r) const {
    int x0 = n_, z0 = n_, x1 = -1, z1 = -1, y0 = n_, y1 = -1;
    for (int z = r.z0; z < r.z1; ++z)
      for (int x = r.x0; x < r.x1; ++x) {
        if (!occupied(x, z)) continue;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        z0 = std::min(z0, z);
        z1 = std::max(z1, z);
        y0 = std::min(y0, ymin_[cell(x, z)]);
        y1 = std::max(y1, ymax_[cell(x, z)]);
      }
    if (x1 < 0) return std::nullopt;
    return VoxelRegion{{x0, y0, z0}, {x1 - x0 + 1, y1 - y0 + 1, z1 - z0 + 1}};
  }

  /// Largest all-empty rectangle inside `host` (histogram sweep).
  std::optional<Rect> largest_empty(const Rect& host) const {
    const int w = host.width();
    std::vector<int> heights(static_cast<std::size_t>(w), 0);
    std::optional<Rect> best;
    std::int64_t best_area = 0;
    std::vector<int> stack;
    for (int z = host.z0; z < host.z1; ++z) {
      for (int i = 0; i < w; ++i) {
        heights[static_cast<std::size_t>(i)] = occupied(host.x0 + i, z) ? 0 : heights[static_cast<std::size_t>(i)] + 1;
      }
      stack.clear();
      for (int i = 0; i <= w; ++i) {
        const int h = i < w ? heights[static_cast<std::size_t>(i)] : 0;
        while (!stack.empty() && heights[static_cast<std::size_t>(stack.back())] >= h) {
          const int top = stack.back();
          stack.pop_back();
          const int height = heights[static_cast<std::size_t>(top)];
          const int left = stack.empty() ? 0 : stack.back() + 1;
          const std::int64_t area = std::int64_t{height} * (i - left);
          if (height > 0 && area > best_area) {
            best_area = area;
            best = Rect{host.x0 + left, z - height + 1, host.x0 + i, z + 1};
          }
        }
        stack.push_back(i);
      }
    }
    return best;
  }

 private:
  std::size_t cell(int x, int z) const {
    return static_cast<std::size_t>(z) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(x);
  }

  int n_;
  std::vector<int> ymin_;
  std::vector<int> ymax_;
};

Rect footprint(const VoxelRegion& r) { return {r.min[0], r.min[2], r.end(0), r.end(2)}; }

// Pieces of `host` minus `hole`. Horizontal-first keeps full-width bands
// above and below the hole; vertical-first keeps full-depth columns left and
// right of it.
std::vector<Rect> split_around(const Rect& host, const Rect& hole, bool horizontal_first) {
  std::vector<Rect> pieces;
  auto push = [&](Rect r) {
    if (r.x1 > r.x0 && r.z1 > r.z0) pieces.push_back(r);
  };
  if (horizontal_first) {
    push({host.x0, host.z0, host.x1, hole.z0});
    push({host.x0, hole.z0, hole.x0, hole.z1});
    push({hole.x1, hole.z0, host.x1, hole.z1});
    push({host.x0, hole.z1, host.x1, host.z1});
  } else {
    push({host.x0, host.z0, hole.x0, host.z1});
    push({hole.x0, host.z0, hole.x1, hole.z0});
    push({hole.x0, hole.z1, hole.x1, host.z1});
    push({hole.x1, host.z0, host.x1, host.z1});
  }
  return pieces;
}

struct Carve {
  std::vector<VoxelRegion> pieces;
  std::int64_t volume = 0;
};

Carve carve(const Projection& proj, const Rect& host, const Rect& hole, bool horizontal_first) {
  Carve out;
  for (const Rect& piece : split_around(host, hole, horizontal_first)) {
    if (auto t = proj.tighten(piece)) {
      out.volume += t->volume();
      out.pieces.push_back(*t);
    }
  }
  return out;
}

}  // namespace

std::vector<VoxelRegion> segment_projection(const VoxelGrid& grid, int k) {
  if (k < 1) throw PreconditionError("segment budget k must be >= 1");
  const Projection proj(grid);
  const int n = grid.n();
  std::vector<VoxelRegion> regions;
  if (auto root = proj.tighten({0, 0, n, n})) regions.push_back(*root);
  else return regions;

  while (static_cast<int>(regions.size()) < k) {
    std::int64_t best_gain = 0;
    std::size_t best_host = 0;
    Carve best;
    for (std::size_t h = 0; h < regions.size(); ++h) {
      const Rect host = footprint(regions[h]);
      const auto hole = proj.largest_empty(host);
      if (!hole) continue;
      const Carve a = carve(proj, host, *hole, true);
      const Carve b = carve(proj, host, *hole, false);
      const Carve& pick = b.volume < a.volume ? b : a;
      if (regions.size() - 1 + pick.pieces.size() > static_cast<std::size_t>(k)) continue;
      const std::int64_t gain = regions[h].volume() - pick.volume;
      if (gain > best_gain) {
        best_gain = gain;
        best_host = h;
        best = pick;
      }
    }
    if (best_gain <= 0) break;
    regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(best_host));
    regions.insert(regions.begin() + static_cast<std::ptrdiff_t>(best_host), best.pieces.begin(),
                   best.pieces.end());
  }
  return regions;
}

// ---------------------------------------------------------------------------
// Merging

namespace {

struct Live {
  VoxelCuboid box;
  std::size_t id;
  bool alive = true;
};

// Candidate key: combined volume, then creation order of both members.
using PairKey = std::tuple<std::int64_t, std::size_t, std::size_t>;

class Merger {
 public:
  explicit Merger(const MergeConfig& config) : config_(config) {}

  // Merges the cuboids listed in `members` (indices into items_) until no
  // acceptable pair remains. Returns the surviving indices.
  std::vector<std::size_t> run(std::vector<Live>& items, std::vector<std::size_t> members) {
    std::set<PairKey> queue;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) consider(items, members[a], members[b], queue);

    while (!queue.empty()) {
      const auto [sum, ia, ib] = *queue.begin();
      queue.erase(queue.begin());
      if (!items[ia].alive || !items[ib].alive) continue;
      const VoxelCuboid merged = bounding(items[ia].box, items[ib].box);
      bool blocked = false;
      for (std::size_t m : members) {
        if (m == ia || m == ib || !items[m].alive) continue;
        if (overlaps(merged, items[m].box)) {
          blocked = true;
          break;
        }
      }
      // Bounding boxes only grow, so a blocked pair stays blocked.
      if (blocked) continue;

      items[ia].alive = false;
      items[ib].alive = false;
      const std::size_t ic = items.size();
      items.push_back({merged, ic, true});
      std::erase_if(members, [&](std::size_t m) { return m == ia || m == ib; });
      for (std::size_t m : members) consider(items, m, ic, queue);
      members.push_back(ic);
    }
    return members;
  }

 private:
  void consider(const std::vector<Live>& items, std::size_t a, std::size_t b, std::set<PairKey>& queue) const {
    const auto& A = items[a].box;
    const auto& B = items[b].box;
    if (!adjacent(A, B)) return;
    const std::int64_t vab = A.volume() + B.volume();
    const auto vc = static_cast<double>(bounding(A, B).volume());
    if (accepts(vc / static_cast<double>(vab), vc)) {
      queue.emplace(vab, std::min(a, b), std::max(a, b));
    }
  }

  // ratio < tau_min + d*exp(-V/S), compared as (ratio - tau_min) < d*exp(-V/S)
  // so the decay term is not lost against tau_min once V >> S.
  bool accepts(double ratio, double vc) const {
    if (!config_.use_dynamic) return ratio < config_.tau_static;
    return ratio - config_.tau_min < (config_.tau_max - config_.tau_min) * std::exp(-vc / config_.scale_s);
  }

  const MergeConfig& config_;
};

}  // namespace

std::vector<VoxelCuboid> merge_cuboids(std::span<const VoxelCuboid> cuboids, const MergeConfig& config,
                                       std::span<const VoxelRegion> regions) {
  config.validate();
  for (std::size_t i = 0; i < cuboids.size(); ++i) {
    for (int axis = 0; axis < 3; ++axis) {
      if (cuboids[i].extent[axis] < 1) throw PreconditionError("cuboid with non-positive extent");
    }
    for (std::size_t j = i + 1; j < cuboids.size(); ++j) {
      if (overlaps(cuboids[i], cuboids[j])) {
        throw PreconditionError("input cuboids " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }

  std::vector<Live> items;
  items.reserve(cuboids.size() * 2);
  for (std::size_t i = 0; i < cuboids.size(); ++i) items.push_back({cuboids[i], i, true});

  Merger merger(config);
  std::vector<std::size_t> survivors;
  std::vector<unsigned char> placed(cuboids.size(), 0);
  for (const auto& region : regions) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < cuboids.size(); ++i) {
      if (placed[i]) continue;
      const auto& c = cuboids[i];
      if (c.min[0] >= region.min[0] && c.end(0) <= region.end(0) && c.min[1] >= region.min[1] &&
          c.end(1) <= region.end(1) && c.min[2] >= region.min[2] && c.end(2) <= region.end(2)) {
        placed[i] = 1;
        members.push_back(i);
      }
    }
    // Regions are disjoint, so only the region's own members can collide
    // with a merge inside it.
    auto kept = merger.run(items, std::move(members));
    survivors.insert(survivors.end(), kept.begin(), kept.end());
  }
  for (std::size_t i = 0; i < cuboids.size(); ++i)
    if (!placed[i]) survivors.push_back(i);

  std::sort(survivors.begin(), survivors.end());
  auto final_ids = merger.run(items, std::move(survivors));
  std::sort(final_ids.begin(), final_ids.end());

  std::vector<VoxelCuboid> out;
  out.reserve(final_ids.size());
  for (std::size_t id : final_ids) out.push_back(items[id].box);
  return out;
}

VoxelAbstraction abstract_voxels(const VoxelGrid& grid, const MergeConfig& config) {
  config.validate();
  VoxelAbstraction out;
  out.regions = segment_projection(grid, config.max_segments_k);
  for (const auto& region : out.regions) {
    auto part = coarse_grain(grid, region);
    out.coarse.insert(out.coarse.end(), part.begin(), part.end());
  }
  out.merged = merge_cuboids(out.coarse, config, out.regions);
  return out;
}

Cuboid to_local_frame(const VoxelCuboid& c, int n) {
  const double inv = 1.0 / n;
  return {{(c.min[0] + 0.5 * c.extent[0]) * inv, (c.min[1] + 0.5 * c.extent[1]) * inv,
           (c.min[2] + 0.5 * c.extent[2]) * inv},
          {c.extent[0] * inv, c.extent[1] * inv, c.extent[2] * inv}};
}

std::vector<Cuboid> abstract_shape(const VoxelGrid& grid, const MergeConfig& config) {
  const auto voxels = abstract_voxels(grid, config);
  std::vector<Cuboid> out;
  out.reserve(voxels.merged.size());
  for (const auto& c : voxels.merged) out.push_back(to_local_frame(c, grid.n()));
  return out;
}

}  // namespace cuboidkit
