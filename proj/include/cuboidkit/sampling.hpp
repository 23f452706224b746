#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuboidkit/metrics.hpp"
#include "cuboidkit/scene.hpp"
#include "cuboidkit/scene_io.hpp"

namespace cuboidkit {

/// A scene generator that can be refined on its own accepted output.
class SceneSampler {
 public:
  virtual ~SceneSampler() = default;

  /// Equal seeds and equal state give equal scenes.
  virtual Scene sample(const FloorPlan& floor, const std::string& room_type, std::uint64_t seed) const = 0;

  /// Sampler fitted on everything this one was fitted on plus `accepted`.
  virtual std::unique_ptr<SceneSampler> refit(std::span<const Scene> accepted) const = 0;

  /// Number of scenes the sampler has been fitted on.
  virtual std::size_t training_size() const = 0;
};

/// Sufficient statistics of one class within one room type.
struct ClassStats {
  double count = 0.0;
  double sum_x = 0.0, sum_z = 0.0;
  double sum_xx = 0.0, sum_xz = 0.0, sum_zz = 0.0;
  double sum_y = 0.0;
  std::array<double, 4> quadrant{};  ///< rotations snapped to 0, pi/2, pi, 3pi/2
  double sum_jitter_sq = 0.0;        ///< squared residual to the snapped angle
  std::array<double, 3> sum_log_size{};
  std::array<double, 3> sum_log_size_sq{};
  std::vector<std::vector<Cuboid>> assemblies;  ///< distinct assemblies seen
};

struct RoomStats {
  double scenes = 0.0;
  std::map<int, double> object_counts;  ///< objects per scene -> occurrences
  std::map<int, ClassStats> classes;
};

/// Fitted parameters derived from ClassStats.
struct ClassModel {
  double frequency = 0.0;
  Vec2 mean;
  std::array<double, 3> cov{};  ///< xx, xz, zz (regularized by 1e-6 * I)
  double y_mean = 0.0;
  std::array<double, 4> rotation{};
  double jitter_sigma = 0.0;
  std::array<double, 3> log_size_mean{};
  std::array<double, 3> log_size_sigma{};
};

/// Independent per-class statistical sampler: object count, class,
/// Gaussian floor position, mean height, snapped rotation plus jitter,
/// log-normal sizes and a pool of observed cuboid assemblies. State is kept
/// as sufficient statistics, so refitting on a union of datasets is exact.
class BaselineSampler final : public SceneSampler {
 public:
  static constexpr double kCovarianceRegularization = 1e-6;
  static constexpr int kPlacementAttempts = 100;

  BaselineSampler() = default;

  /// Maximum-likelihood fit. Throws SamplingError on an empty dataset.
  static BaselineSampler fit(std::span<const Scene> dataset);

  Scene sample(const FloorPlan& floor, const std::string& room_type, std::uint64_t seed) const override;
  std::unique_ptr<SceneSampler> refit(std::span<const Scene> accepted) const override;
  std::size_t training_size() const override { return training_size_; }

  void absorb(std::span<const Scene> scenes);

  bool has_room(const std::string& room_type) const { return rooms_.count(room_type) > 0; }
  const RoomStats& room(const std::string& room_type) const;
  /// Object-count distribution (normalized).
  std::map<int, double> count_distribution(const std::string& room_type) const;
  std::map<int, ClassModel> class_models(const std::string& room_type) const;

  nlohmann::json to_json(const ClassVocabulary& vocab = ClassVocabulary::front_default()) const;
  static BaselineSampler from_json(const nlohmann::json& j,
                                   const ClassVocabulary& vocab = ClassVocabulary::front_default());
  void save(const std::filesystem::path& path, const ClassVocabulary& vocab = ClassVocabulary::front_default()) const;
  static BaselineSampler load(const std::filesystem::path& path,
                              const ClassVocabulary& vocab = ClassVocabulary::front_default());

 private:
  std::map<std::string, RoomStats> rooms_;
  std::size_t training_size_ = 0;
};

struct RejectionConfig {
  std::size_t k_candidates = 500;
  double t_threshold = 0.001;
  int rounds = 3;
  /// 0 selects max(1, k_candidates / 10).
  std::size_t min_accepted = 0;
  AverageMode average_mode = AverageMode::nonzero_pairs;

  std::size_t effective_min_accepted() const;
  void validate() const;
};

struct FilterResult {
  std::vector<Scene> accepted;
  std::vector<Scene> rejected;
};

/// Accepts scenes whose average cuboid IoU is <= t_threshold. Order is kept.
FilterResult filter_candidates(std::span<const Scene> scenes, const RejectionConfig& config);

struct RoundReport {
  int round = 0;
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
  double mean_candidate_ciou = 0.0;
  std::size_t distilled_size = 0;
  bool shortfall = false;

  nlohmann::json to_json() const;
};

struct RejectionOutcome {
  std::unique_ptr<SceneSampler> model;  ///< last good model
  std::vector<RoundReport> rounds;
  std::vector<std::vector<Scene>> accepted;  ///< R_i per completed round
  bool shortfall = false;
};

/// Per round: draw k candidates (floor j % |floors|, seed derived from
/// (seed, round, j)), filter them, then refit on S_i = R_i u S_{i-1}, where
/// S_0 is whatever `initial` was fitted on. A round accepting fewer than
/// min_accepted aborts the loop; the model of the previous round is kept.
RejectionOutcome rejection_loop(const SceneSampler& initial, std::span<const FloorSpec> floors,
                                const RejectionConfig& config, std::uint64_t seed);

}  // namespace cuboidkit
