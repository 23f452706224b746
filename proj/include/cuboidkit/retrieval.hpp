#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cuboidkit/abstraction.hpp"
#include "cuboidkit/geometry.hpp"
#include "cuboidkit/mesh_io.hpp"
#include "cuboidkit/scene.hpp"
#include "cuboidkit/voxel_grid.hpp"

namespace cuboidkit {

struct CatalogEntry {
  std::string model_id;
  int class_label = 0;
  VoxelGrid grid;
  std::vector<Cuboid> cuboids;
};

/// Immutable set of shapes sharing one voxel resolution. On disk it is a
/// directory holding index.json:
///   [{"model_id": str, "class": str, "voxels": "relative/path.cvox", "cuboids": [...]}]
class ShapeCatalog {
 public:
  explicit ShapeCatalog(std::vector<CatalogEntry> entries);

  static ShapeCatalog load(const std::filesystem::path& dir,
                           const ClassVocabulary& vocab = ClassVocabulary::front_default());
  void save(const std::filesystem::path& dir, const ClassVocabulary& vocab = ClassVocabulary::front_default()) const;

  int resolution() const { return resolution_; }
  const std::vector<CatalogEntry>& entries() const { return entries_; }

 private:
  std::vector<CatalogEntry> entries_;
  int resolution_ = 0;
};

/// A voxel is set iff its center lies inside (or on) any cuboid.
VoxelGrid rasterize_cuboids(std::span<const Cuboid> cuboids, int n);

/// |a & b| / |a | b|; 1 when both are empty. Throws PreconditionError on
/// mismatched resolutions.
double voxel_iou(const VoxelGrid& a, const VoxelGrid& b);

Aabb assembly_bounds(std::span<const Cuboid> cuboids);
double box_iou(const Aabb& a, const Aabb& b);

enum class RetrievalMode { cuboid, bbox };

struct RetrievalMatch {
  std::string model_id;
  double iou = 0.0;
};

/// Best entry of the requested class; ties go to the smallest model_id.
/// Throws EmptyClassError when the class has no entries.
RetrievalMatch retrieve(std::span<const Cuboid> query, int class_label, const ShapeCatalog& catalog,
                        RetrievalMode mode = RetrievalMode::cuboid);

/// Fills every object's model_id.
void retrieve_scene(Scene& scene, const ShapeCatalog& catalog, RetrievalMode mode = RetrievalMode::cuboid);

/// Mesh -> normalized -> surface voxels -> filled -> cuboid assembly. The
/// stored grid is the rasterized assembly, the same occupancy a query sees.
CatalogEntry make_catalog_entry(std::string model_id, int class_label, const TriangleMesh& mesh, int n,
                                const MergeConfig& config);

/// Reads <dir>/<class>/<model_id>.obj for every class directory.
ShapeCatalog build_catalog(const std::filesystem::path& mesh_dir, int n, const MergeConfig& config,
                           const ClassVocabulary& vocab = ClassVocabulary::front_default());

}  // namespace cuboidkit
