// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to compare.
#include <benchmark/benchmark.h>

#include "cuboidkit/kernels.hpp"
#include "cuboidkit/metrics.hpp"
#include "synthetic.hpp"

using namespace cuboidkit;
using kernels::OverlapCounts;
using kernels::PairwiseIou;

namespace {

const TriangleMesh& furniture_mesh() {
  static const TriangleMesh mesh = [] {
    std::vector<std::pair<Vec3, Vec3>> boxes{{{0.0, 0.6, 0.0}, {1.0, 0.7, 1.0}}};
    for (double x : {0.0, 0.9})
      for (double z : {0.0, 0.9}) boxes.push_back({{x, 0.0, z}, {x + 0.1, 0.6, z + 0.1}});
    boxes.push_back({{0.0, 0.7, 0.9}, {1.0, 1.0, 1.0}});
    return synthetic::boxes_mesh(boxes);
  }();
  return mesh;
}

const SceneCuboids& dense_scene() {
  static const SceneCuboids cuboids = [] {
    SceneCuboids out;
    for (const auto& scene : synthetic::scene_dataset({.scenes = 8})) {
      auto c = collect_world_cuboids(scene);
      const int base = out.owner.empty() ? 0 : out.owner.back() + 1;
      out.cuboids.insert(out.cuboids.end(), c.cuboids.begin(), c.cuboids.end());
      for (int o : c.owner) out.owner.push_back(base + o);
    }
    return out;
  }();
  return cuboids;
}

template <VoxelGrid (*F)(const TriangleMesh&, int)>
void BM_Voxelize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(F(furniture_mesh(), n));
}

template <OverlapCounts (*F)(const VoxelGrid&, const VoxelGrid&)>
void BM_OverlapCounts(benchmark::State& state) {
  const auto suite = synthetic::shape_suite();
  for (auto _ : state) benchmark::DoNotOptimize(F(suite[0].grid, suite[9].grid));
}

template <PairwiseIou (*F)(std::span<const OrientedCuboid>, std::span<const int>)>
void BM_PairwiseIou(benchmark::State& state) {
  const auto& s = dense_scene();
  for (auto _ : state) benchmark::DoNotOptimize(F(s.cuboids, s.owner));
  state.counters["cuboids"] = static_cast<double>(s.cuboids.size());
}

}  // namespace

BENCHMARK(BM_Voxelize<kernels::serial::voxelize_surface>)->Arg(64)->Arg(128);
BENCHMARK(BM_Voxelize<kernels::parallel::voxelize_surface>)->Arg(64)->Arg(128);
BENCHMARK(BM_OverlapCounts<kernels::serial::overlap_counts>);
BENCHMARK(BM_OverlapCounts<kernels::parallel::overlap_counts>);
BENCHMARK(BM_PairwiseIou<kernels::serial::pairwise_iou>);
BENCHMARK(BM_PairwiseIou<kernels::parallel::pairwise_iou>);

BENCHMARK_MAIN();
