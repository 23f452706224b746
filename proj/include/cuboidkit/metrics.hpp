#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuboidkit/geometry.hpp"
#include "cuboidkit/scene.hpp"

namespace cuboidkit {

inline constexpr double kDefaultNiThreshold = 0.01;
inline constexpr double kKlSmoothing = 1e-6;

/// Area shared by the x-z footprints of two y-rotated boxes.
double footprint_intersection_area(const OrientedCuboid& a, const OrientedCuboid& b);
/// Footprint intersection times y-interval overlap. Exactly symmetric.
double intersection_volume(const OrientedCuboid& a, const OrientedCuboid& b);
double iou(const OrientedCuboid& a, const OrientedCuboid& b);

/// Every world cuboid of a scene with the index of the object owning it.
struct SceneCuboids {
  std::vector<OrientedCuboid> cuboids;
  std::vector<int> owner;
};
SceneCuboids collect_world_cuboids(const Scene& scene);

/// Symmetric IoU over all world cuboids; same-owner entries and the diagonal
/// are zero.
struct IoUMatrix {
  std::size_t size = 0;
  std::vector<double> values;
  std::vector<int> owner;

  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
  /// Sum over the upper triangle.
  double upper_sum() const;
};

IoUMatrix scene_iou_matrix(const Scene& scene);
IoUMatrix iou_matrix(const SceneCuboids& cuboids);

/// 1000 * (sum of cross-entity pairwise intersection volumes, each unordered
/// pair once) / (sum of all cuboid volumes). Throws UndefinedMetricError when
/// the scene has no cuboid volume.
double ciou(const Scene& scene);

/// 100 * fraction of scenes with ciou <= threshold. Scenes without any cuboid
/// volume cannot intersect and count as passing. Throws UndefinedMetricError
/// on an empty list.
double nirate(std::span<const Scene> scenes, double threshold = kDefaultNiThreshold);

using ClassHistogram = std::map<std::string, double>;
ClassHistogram class_histogram(std::span<const Scene> scenes,
                               const ClassVocabulary& vocab = ClassVocabulary::front_default());

/// 0.01 * KL(generated || reference) over class frequencies, each count
/// smoothed by `epsilon` before normalization.
double ckl(const ClassHistogram& generated, const ClassHistogram& reference, double epsilon = kKlSmoothing);

enum class AverageMode {
  nonzero_pairs,  ///< mean over cross-entity pairs with IoU > 0
  all_pairs,      ///< mean over every cross-entity pair
};

/// Mean cross-entity cuboid IoU of a scene; 0 when there is nothing to average.
double average_cuboid_iou(const Scene& scene, AverageMode mode = AverageMode::nonzero_pairs);

struct MetricsReport {
  double ciou = 0.0;  ///< mean over scenes
  double nirate = 0.0;
  std::optional<double> ckl;
  std::size_t n_scenes = 0;
  double threshold = kDefaultNiThreshold;

  nlohmann::json to_json() const;
};

MetricsReport evaluate(std::span<const Scene> scenes, double threshold = kDefaultNiThreshold,
                       std::span<const Scene> reference = {},
                       const ClassVocabulary& vocab = ClassVocabulary::front_default());

}  // namespace cuboidkit
