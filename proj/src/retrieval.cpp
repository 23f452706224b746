#include "cuboidkit/retrieval.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cuboidkit/errors.hpp"
#include "cuboidkit/kernels.hpp"
#include "cuboidkit/scene_io.hpp"
#include "cuboidkit/voxelizer.hpp"

namespace cuboidkit {

ShapeCatalog::ShapeCatalog(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw PreconditionError("catalog is empty");
  resolution_ = entries_.front().grid.n();
  std::set<std::string> ids;
  for (const auto& e : entries_) {
    if (e.grid.n() != resolution_) throw ValidationError("voxels", "catalog grids differ in resolution");
    if (!ids.insert(e.model_id).second) throw ValidationError("model_id", "duplicate model_id '" + e.model_id + "'");
  }
}

ShapeCatalog ShapeCatalog::load(const std::filesystem::path& dir, const ClassVocabulary& vocab) {
  std::ifstream in(dir / "index.json");
  if (!in) throw Error("cannot open " + (dir / "index.json").string());
  nlohmann::json index;
  try {
    in >> index;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("index", e.what());
  }
  if (!index.is_array()) throw ValidationError("index", "expected an array");
  std::vector<CatalogEntry> entries;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& j = index[i];
    const std::string where = "index[" + std::to_string(i) + "]";
    for (const char* key : {"model_id", "class", "voxels", "cuboids"}) {
      if (!j.is_object() || !j.contains(key)) throw ValidationError(where + "." + key, "missing field");
    }
    if (!j["model_id"].is_string() || !j["class"].is_string() || !j["voxels"].is_string()) {
      throw ValidationError(where, "model_id, class and voxels must be strings");
    }
    entries.push_back({j["model_id"].get<std::string>(), vocab.index_of(j["class"].get<std::string>()),
                       load_cvox(dir / j["voxels"].get<std::string>()),
                       cuboids_from_json(j["cuboids"], where + ".cuboids")});
  }
  return ShapeCatalog(std::move(entries));
}

void ShapeCatalog::save(const std::filesystem::path& dir, const ClassVocabulary& vocab) const {
  std::filesystem::create_directories(dir / "voxels");
  nlohmann::json index = nlohmann::json::array();
  for (const auto& e : entries_) {
    const std::string rel = "voxels/" + e.model_id + ".cvox";
    save_cvox(dir / rel, e.grid);
    index.push_back({{"model_id", e.model_id},
                     {"class", vocab.name(e.class_label)},
                     {"voxels", rel},
                     {"cuboids", cuboids_to_json(e.cuboids)}});
  }
  std::ofstream out(dir / "index.json");
  if (!out) throw Error("cannot write " + (dir / "index.json").string());
  out << index.dump(2) << "\n";
}

VoxelGrid rasterize_cuboids(std::span<const Cuboid> cuboids, int n) {
  VoxelGrid grid(n);
  for (const auto& c : cuboids) {
    const Vec3 lo = c.min_corner();
    const Vec3 hi = c.max_corner();
    int first[3], last[3];
    for (int a = 0; a < 3; ++a) {
      // Voxel centers (i + 0.5) / n inside [lo, hi].
      first[a] = std::max(0, static_cast<int>(std::ceil(lo[a] * n - 0.5)));
      last[a] = std::min(n - 1, static_cast<int>(std::floor(hi[a] * n - 0.5)));
    }
    for (int y = first[1]; y <= last[1]; ++y)
      for (int z = first[2]; z <= last[2]; ++z)
        for (int x = first[0]; x <= last[0]; ++x) grid.set(x, y, z);
  }
  return grid;
}

double voxel_iou(const VoxelGrid& a, const VoxelGrid& b) {
  if (a.n() != b.n()) throw PreconditionError("voxel grids differ in resolution");
  const auto c = kernels::parallel::overlap_counts(a, b);
  if (c.union_ == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(c.union_);
}

Aabb assembly_bounds(std::span<const Cuboid> cuboids) {
  if (cuboids.empty()) return {};
  Aabb box{cuboids.front().min_corner(), cuboids.front().max_corner()};
  for (const auto& c : cuboids) {
    for (int a = 0; a < 3; ++a) {
      box.min[a] = std::min(box.min[a], c.min_corner()[a]);
      box.max[a] = std::max(box.max[a], c.max_corner()[a]);
    }
  }
  return box;
}

double box_iou(const Aabb& a, const Aabb& b) {
  double inter = 1.0;
  for (int k = 0; k < 3; ++k) inter *= std::max(0.0, std::min(a.max[k], b.max[k]) - std::max(a.min[k], b.min[k]));
  const Vec3 ea = a.extent(), eb = b.extent();
  const double uni = ea.x * ea.y * ea.z + eb.x * eb.y * eb.z - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

RetrievalMatch retrieve(std::span<const Cuboid> query, int class_label, const ShapeCatalog& catalog,
                        RetrievalMode mode) {
  const VoxelGrid qgrid = mode == RetrievalMode::cuboid ? rasterize_cuboids(query, catalog.resolution())
                                                        : VoxelGrid(catalog.resolution());
  const Aabb qbox = assembly_bounds(query);
  const CatalogEntry* best = nullptr;
  double best_iou = -1.0;
  for (const auto& e : catalog.entries()) {
    if (e.class_label != class_label) continue;
    const double v = mode == RetrievalMode::cuboid ? voxel_iou(qgrid, e.grid) : box_iou(qbox, assembly_bounds(e.cuboids));
    if (!best || v > best_iou || (v == best_iou && e.model_id < best->model_id)) {
      best = &e;
      best_iou = v;
    }
  }
  if (!best) throw EmptyClassError("catalog has no entry of class " + std::to_string(class_label));
  return {best->model_id, best_iou};
}

void retrieve_scene(Scene& scene, const ShapeCatalog& catalog, RetrievalMode mode) {
  for (auto& obj : scene.objects) obj.model_id = retrieve(obj.cuboids, obj.class_label, catalog, mode).model_id;
}

CatalogEntry make_catalog_entry(std::string model_id, int class_label, const TriangleMesh& mesh, int n,
                                const MergeConfig& config) {
  const auto normalized = normalize(mesh);
  const VoxelGrid solid = fill_interior(voxelize_surface(normalized.mesh, n));
  auto cuboids = abstract_shape(solid, config);
  VoxelGrid grid = rasterize_cuboids(cuboids, n);
  return {std::move(model_id), class_label, std::move(grid), std::move(cuboids)};
}

ShapeCatalog build_catalog(const std::filesystem::path& mesh_dir, int n, const MergeConfig& config,
                           const ClassVocabulary& vocab) {
  std::vector<std::filesystem::path> class_dirs;
  for (const auto& entry : std::filesystem::directory_iterator(mesh_dir)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  std::vector<CatalogEntry> entries;
  for (const auto& cdir : class_dirs) {
    const int label = vocab.index_of(cdir.filename().string());
    std::vector<std::filesystem::path> meshes;
    for (const auto& entry : std::filesystem::directory_iterator(cdir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".obj") meshes.push_back(entry.path());
    }
    std::sort(meshes.begin(), meshes.end());
    for (const auto& m : meshes) {
      entries.push_back(make_catalog_entry(m.stem().string(), label, load_obj(m), n, config));
    }
  }
  return ShapeCatalog(std::move(entries));
}

}  // namespace cuboidkit
