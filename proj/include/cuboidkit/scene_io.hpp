#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuboidkit/geometry.hpp"
#include "cuboidkit/scene.hpp"

namespace cuboidkit {

// Scene JSON:
// { "room_type": str,
//   "floor": {"vertices": [[x, z], ...]},
//   "objects": [ { "id": str, "class": str, "model_id": str|null,
//                  "translation": [x,y,z], "size": [sx,sy,sz], "theta": rad,
//                  "cuboids": [ {"center": [3], "size": [3]} ] } ] }
// Sizes are full extents. "sin_theta"/"cos_theta" may replace "theta" on
// input; they are checked for unit norm.

nlohmann::json cuboids_to_json(const std::vector<Cuboid>& cuboids);
std::vector<Cuboid> cuboids_from_json(const nlohmann::json& j, const std::string& field = "cuboids");

nlohmann::json scene_to_json(const Scene& scene, const ClassVocabulary& vocab = ClassVocabulary::front_default());
/// Validates the schema and every Scene invariant; ValidationError names the
/// offending field.
Scene scene_from_json(const nlohmann::json& j, const ClassVocabulary& vocab = ClassVocabulary::front_default(),
                      std::size_t max_objects = kDefaultMaxObjects);

/// Canonical text form: two-space indent, shortest round-trip doubles,
/// trailing newline.
std::string dump_scene(const Scene& scene, const ClassVocabulary& vocab = ClassVocabulary::front_default());
Scene parse_scene(std::istream& in, const ClassVocabulary& vocab = ClassVocabulary::front_default(),
                  std::size_t max_objects = kDefaultMaxObjects);

void save_scene(const std::filesystem::path& path, const Scene& scene,
                const ClassVocabulary& vocab = ClassVocabulary::front_default());
Scene load_scene(const std::filesystem::path& path, const ClassVocabulary& vocab = ClassVocabulary::front_default(),
                 std::size_t max_objects = kDefaultMaxObjects);

/// Sorted *.json files of a directory.
std::vector<std::filesystem::path> list_json_files(const std::filesystem::path& dir);

/// Room type plus floor, read from a scene-shaped JSON file whose objects
/// (if any) are ignored.
struct FloorSpec {
  std::string room_type;
  FloorPlan floor;
};
FloorSpec load_floor(const std::filesystem::path& path);

}  // namespace cuboidkit
