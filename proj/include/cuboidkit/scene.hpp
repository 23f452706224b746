#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cuboidkit/geometry.hpp"

namespace cuboidkit {

inline constexpr std::size_t kDefaultMaxObjects = 32;

/// Class name <-> index mapping. Index `size()` is reserved for the [SEP]
/// delimiter carried by entity tokens.
class ClassVocabulary {
 public:
  explicit ClassVocabulary(std::vector<std::string> names);

  /// Furniture categories of the 3D-FRONT bedroom / living / dining / library
  /// splits.
  static const ClassVocabulary& front_default();
  /// JSON file: either an array of names or an object {name: index}.
  static ClassVocabulary load(const std::filesystem::path& path);

  std::size_t size() const { return names_.size(); }
  int sep() const { return static_cast<int>(names_.size()); }
  /// Throws ValidationError("class", ...) for unknown names.
  int index_of(std::string_view name) const;
  std::optional<int> find(std::string_view name) const;
  const std::string& name(int index) const;
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

/// Translation and full size in meters, rotation about +y. theta is kept next
/// to its sine/cosine so serialization round-trips exactly.
struct Pose {
  Vec3 translation;
  Vec3 size{1.0, 1.0, 1.0};
  double theta = 0.0;
  double sin_theta = 0.0;
  double cos_theta = 1.0;

  static Pose from_theta(Vec3 translation, Vec3 size, double theta);
  /// Throws ValidationError when sin^2 + cos^2 deviates from 1 by more than 1e-6.
  static Pose from_sin_cos(Vec3 translation, Vec3 size, double sin_theta, double cos_theta);
  void validate() const;

  friend bool operator==(const Pose&, const Pose&) = default;
};

struct SceneObject {
  std::string id;
  int class_label = 0;
  Pose pose;
  std::optional<std::string> model_id;
  /// Assembly in the object's [0,1]^3 local frame.
  std::vector<Cuboid> cuboids;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

/// Counter-clockwise simple polygon on the x-z plane.
struct FloorPlan {
  std::vector<Vec2> vertices;

  double signed_area() const;
  bool contains(Vec2 p) const;
  /// Throws ValidationError("floor", ...) unless the polygon has >= 3
  /// vertices, is simple and has positive signed area.
  void validate() const;

  static FloorPlan rectangle(double x0, double z0, double x1, double z1);
  friend bool operator==(const FloorPlan&, const FloorPlan&) = default;
};

struct Scene {
  std::string room_type;
  FloorPlan floor;
  std::vector<SceneObject> objects;

  void validate(const ClassVocabulary& vocab = ClassVocabulary::front_default(),
                std::size_t max_objects = kDefaultMaxObjects) const;
  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Local cuboid -> world: recenter to [-0.5,0.5]^3, scale by pose size,
/// rotate about y, translate. Extents are reported before rotation.
OrientedCuboid world_cuboid(const SceneObject& object, const Cuboid& local);
std::vector<OrientedCuboid> world_cuboids(const SceneObject& object);

enum class TokenKind { floor, entity, cuboid };

struct TokenRecord {
  TokenKind kind = TokenKind::floor;
  int class_label = 0;
  Vec3 translation;
  Vec3 size;
  double sin_theta = 0.0;
  double cos_theta = 1.0;
  /// Only set on the floor token.
  std::vector<Vec2> floor_vertices;
};

/// Floor token, then per object an entity token ([SEP] class, object pose)
/// followed by its world cuboids sorted by bottom height, ties by center
/// (z, x). Objects are shuffled when `permute_seed` is set.
std::vector<TokenRecord> to_token_sequence(const Scene& scene, std::optional<std::uint64_t> permute_seed = std::nullopt,
                                           const ClassVocabulary& vocab = ClassVocabulary::front_default());

/// Inverse of to_token_sequence up to object order; ids and model ids are not
/// carried by tokens and come back empty.
Scene from_token_sequence(const std::vector<TokenRecord>& tokens, std::string room_type,
                          const ClassVocabulary& vocab = ClassVocabulary::front_default());

}  // namespace cuboidkit
