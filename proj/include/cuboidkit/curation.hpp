#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuboidkit/geometry.hpp"
#include "cuboidkit/scene.hpp"

namespace cuboidkit {

struct CurationConfig {
  double eta = 0.05;       ///< step size, meters per unit gradient
  double clip_norm = 1.0;  ///< per-object gradient norm cap
  int max_iters = 500;
  double epsilon_stop = 1e-6;  ///< stop once total overlap is at most this
  double fd_step = 0.01;       ///< central-difference step, meters

  void validate() const;
};

struct CurationReport {
  int iterations = 0;
  double initial_overlap = 0.0;
  double final_overlap = 0.0;
  bool converged = false;
  /// Total overlap after each iteration.
  std::vector<double> history;
};

/// Sum of the upper triangle of the scene IoU matrix.
double total_overlap(const Scene& scene);

/// Central finite difference of total_overlap with respect to the x and z
/// translation of one object. y is never probed.
Vec2 overlap_gradient(const Scene& scene, std::size_t object_index, double fd_step);

struct CurationResult {
  Scene scene;
  CurationReport report;
};

/// Jacobi-style descent: every iteration each object moves by
/// -eta * clip(gradient) on x and z, all gradients taken from the same
/// snapshot. y translations, sizes, rotations and assemblies are untouched.
CurationResult avoid_intersections(const Scene& scene, const CurationConfig& config);

struct SceneCurationRecord {
  std::string name;
  std::optional<CurationReport> report;
  double mean_displacement = 0.0;
  std::string error;
};

struct CurationSummary {
  double nirate_before = 100.0;
  double nirate_after = 100.0;
  double mean_displacement = 0.0;  ///< per object, meters
  std::size_t n_scenes = 0;
  std::size_t n_errors = 0;
  std::vector<SceneCurationRecord> records;

  nlohmann::json to_json() const;
};

struct CuratedDataset {
  std::vector<Scene> scenes;
  std::vector<std::string> names;
  CurationSummary summary;
};

/// Curates every scene independently (in parallel across scenes).
CuratedDataset curate_dataset(std::span<const Scene> scenes, const CurationConfig& config,
                              double ni_threshold = 0.01);

/// Loads and curates the files; unreadable ones become error records.
CuratedDataset curate_files(std::span<const std::filesystem::path> files, const CurationConfig& config,
                            double ni_threshold = 0.01,
                            const ClassVocabulary& vocab = ClassVocabulary::front_default());

}  // namespace cuboidkit
