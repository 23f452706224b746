#include <doctest.h>

#include "cuboidkit/kernels.hpp"
#include "cuboidkit/metrics.hpp"
#include "cuboidkit/rng.hpp"
#include "synthetic.hpp"

using namespace cuboidkit;

TEST_CASE("serial and OpenMP voxelization agree") {
  const auto mesh = normalize(synthetic::boxes_mesh({{{0, 0, 0}, {2, 0.1, 1}},
                                                     {{0.1, 0.1, 0.1}, {0.2, 1.3, 0.2}},
                                                     {{1.7, 0.1, 0.7}, {1.8, 1.3, 0.8}}}))
                        .mesh;
  for (int n : {2, 7, 32, 64}) {
    CHECK(kernels::serial::voxelize_surface(mesh, n) == kernels::parallel::voxelize_surface(mesh, n));
  }
}

TEST_CASE("serial and OpenMP counts agree") {
  const auto suite = synthetic::shape_suite();
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& a = suite[i].grid;
    const auto& b = suite[(i + 7) % suite.size()].grid;
    CHECK(kernels::serial::occupancy_count(a) == kernels::parallel::occupancy_count(a));
    const auto s = kernels::serial::overlap_counts(a, b);
    const auto p = kernels::parallel::overlap_counts(a, b);
    CHECK(s.intersection == p.intersection);
    CHECK(s.union_ == p.union_);
  }
}

TEST_CASE("serial and OpenMP pairwise IoU are bitwise equal") {
  const auto scenes = synthetic::scene_dataset({.scenes = 10, .seed = 3});
  for (const auto& scene : scenes) {
    const auto sc = collect_world_cuboids(scene);
    const auto s = kernels::serial::pairwise_iou(sc.cuboids, sc.owner);
    const auto p = kernels::parallel::pairwise_iou(sc.cuboids, sc.owner);
    REQUIRE(s.size == p.size);
    CHECK(s.values == p.values);
  }
}

TEST_CASE("pairwise IoU masks same-owner pairs") {
  Rng rng(1);
  std::vector<OrientedCuboid> cs;
  std::vector<int> owner;
  for (int i = 0; i < 12; ++i) {
    cs.push_back({{rng.uniform(0, 2), 0.5, rng.uniform(0, 2)}, {1, 1, 1}, rng.uniform(0, 3)});
    owner.push_back(i / 3);
  }
  const auto m = kernels::parallel::pairwise_iou(cs, owner);
  for (std::size_t i = 0; i < m.size; ++i)
    for (std::size_t j = 0; j < m.size; ++j) {
      const double v = m.values[i * m.size + j];
      CHECK(v == m.values[j * m.size + i]);
      if (owner[i] == owner[j]) CHECK(v == 0.0);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
}
