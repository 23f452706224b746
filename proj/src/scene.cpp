#include "cuboidkit/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "cuboidkit/errors.hpp"
#include "cuboidkit/rng.hpp"

namespace cuboidkit {

// ---------------------------------------------------------------------------
// Vocabulary

ClassVocabulary::ClassVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], static_cast<int>(i)).second) {
      throw ValidationError("classes", "duplicate class name '" + names_[i] + "'");
    }
  }
}

const ClassVocabulary& ClassVocabulary::front_default() {
  static const ClassVocabulary vocab({
      "armchair",       "bookshelf",      "cabinet",           "ceiling_lamp",   "chair",
      "children_cabinet", "coffee_table", "desk",              "double_bed",     "dressing_chair",
      "dressing_table", "kids_bed",       "nightstand",        "pendant_lamp",   "shelf",
      "single_bed",     "sofa",           "stool",             "table",          "tv_stand",
      "wardrobe",       "chaise_longue_sofa", "chinese_chair", "console_table",  "corner_side_table",
      "dining_chair",   "dining_table",   "l_shaped_sofa",     "lazy_sofa",      "loveseat_sofa",
      "multi_seat_sofa", "round_end_table",
  });
  return vocab;
}

ClassVocabulary ClassVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("classes", e.what());
  }
  if (j.is_object() && j.contains("classes")) j = j["classes"];
  std::vector<std::string> names;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_string()) throw ValidationError("classes", "expected class name strings");
      names.push_back(v.get<std::string>());
    }
  } else if (j.is_object()) {
    names.resize(j.size());
    for (const auto& [name, idx] : j.items()) {
      if (!idx.is_number_integer() || idx.get<long>() < 0 || idx.get<std::size_t>() >= j.size()) {
        throw ValidationError("classes", "index of '" + name + "' out of range");
      }
      auto& slot = names[idx.get<std::size_t>()];
      if (!slot.empty()) throw ValidationError("classes", "duplicate index for '" + name + "'");
      slot = name;
    }
  } else {
    throw ValidationError("classes", "expected an array or an object");
  }
  return ClassVocabulary(std::move(names));
}

std::optional<int> ClassVocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ClassVocabulary::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw ValidationError("class", "unknown class '" + std::string(name) + "'");
}

const std::string& ClassVocabulary::name(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= names_.size()) {
    throw ValidationError("class", "class index " + std::to_string(index) + " out of range");
  }
  return names_[static_cast<std::size_t>(index)];
}

// ---------------------------------------------------------------------------
// Pose

Pose Pose::from_theta(Vec3 translation, Vec3 size, double theta) {
  Pose p{translation, size, theta, std::sin(theta), std::cos(theta)};
  p.validate();
  return p;
}

Pose Pose::from_sin_cos(Vec3 translation, Vec3 size, double sin_theta, double cos_theta) {
  if (std::abs(sin_theta * sin_theta + cos_theta * cos_theta - 1.0) > 1e-6) {
    throw ValidationError("pose", "sin^2 + cos^2 must equal 1");
  }
  Pose p{translation, size, std::atan2(sin_theta, cos_theta), sin_theta, cos_theta};
  p.validate();
  return p;
}

void Pose::validate() const {
  if (std::abs(sin_theta * sin_theta + cos_theta * cos_theta - 1.0) > 1e-6) {
    throw ValidationError("pose", "sin^2 + cos^2 must equal 1");
  }
  if (!(size.x > 0.0 && size.y > 0.0 && size.z > 0.0)) {
    throw ValidationError("size", "size components must be positive");
  }
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(translation[a]) || !std::isfinite(size[a])) {
      throw ValidationError("pose", "non-finite value");
    }
  }
}

// ---------------------------------------------------------------------------
// Floor

double FloorPlan::signed_area() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    acc += cross(vertices[i], vertices[(i + 1) % vertices.size()]);
  }
  return 0.5 * acc;
}

bool FloorPlan::contains(Vec2 p) const {
  bool inside = false;
  for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[j];
    if ((a.z > p.z) != (b.z > p.z) && p.x < (b.x - a.x) * (p.z - a.z) / (b.z - a.z) + a.x) inside = !inside;
  }
  return inside;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.z, b.z) <= p.z &&
         p.z <= std::max(a.z, b.z);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

}  // namespace

void FloorPlan::validate() const {
  const std::size_t n = vertices.size();
  if (n < 3) throw ValidationError("floor", "polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool neighbours = j == i + 1 || (i == 0 && j == n - 1);
      if (neighbours) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n])) {
        throw ValidationError("floor", "polygon is not simple");
      }
    }
  }
  if (!(signed_area() > 0.0)) throw ValidationError("floor", "polygon must be counter-clockwise with positive area");
}

FloorPlan FloorPlan::rectangle(double x0, double z0, double x1, double z1) {
  // Counter-clockwise in (x, z) means positive shoelace area.
  return FloorPlan{{{x0, z0}, {x1, z0}, {x1, z1}, {x0, z1}}};
}

// ---------------------------------------------------------------------------
// Scene

void Scene::validate(const ClassVocabulary& vocab, std::size_t max_objects) const {
  floor.validate();
  if (objects.size() > max_objects) {
    throw ValidationError("objects", "scene holds " + std::to_string(objects.size()) + " objects, limit is " +
                                         std::to_string(max_objects));
  }
  constexpr double kTol = 1e-6;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    if (o.class_label < 0 || static_cast<std::size_t>(o.class_label) >= vocab.size()) {
      throw ValidationError(where + ".class", "class index out of range");
    }
    o.pose.validate();
    if (o.cuboids.empty()) throw ValidationError(where + ".cuboids", "object has no cuboids");
    for (const auto& c : o.cuboids) {
      const Vec3 lo = c.min_corner();
      const Vec3 hi = c.max_corner();
      for (int a = 0; a < 3; ++a) {
        if (!(c.size[a] > 0.0) || lo[a] < -kTol || hi[a] > 1.0 + kTol) {
          throw ValidationError(where + ".cuboids", "local cuboid outside [0,1]^3");
        }
      }
    }
  }
}

OrientedCuboid world_cuboid(const SceneObject& object, const Cuboid& local) {
  const Pose& p = object.pose;
  const Vec3 offset = hadamard(local.center - Vec3{0.5, 0.5, 0.5}, p.size);
  const Vec2 r = rotate_y({offset.x, offset.z}, p.sin_theta, p.cos_theta);
  return {{p.translation.x + r.x, p.translation.y + offset.y, p.translation.z + r.z},
          hadamard(local.size, p.size),
          p.theta};
}

std::vector<OrientedCuboid> world_cuboids(const SceneObject& object) {
  std::vector<OrientedCuboid> out;
  out.reserve(object.cuboids.size());
  for (const auto& c : object.cuboids) out.push_back(world_cuboid(object, c));
  return out;
}

// ---------------------------------------------------------------------------
// Tokens

std::vector<TokenRecord> to_token_sequence(const Scene& scene, std::optional<std::uint64_t> permute_seed,
                                           const ClassVocabulary& vocab) {
  std::vector<TokenRecord> tokens;
  TokenRecord floor_token;
  floor_token.kind = TokenKind::floor;
  floor_token.class_label = vocab.sep();
  floor_token.floor_vertices = scene.floor.vertices;
  tokens.push_back(std::move(floor_token));

  std::vector<std::size_t> order(scene.objects.size());
  std::iota(order.begin(), order.end(), 0);
  if (permute_seed) {
    Rng rng(*permute_seed);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
  }

  for (std::size_t idx : order) {
    const auto& obj = scene.objects[idx];
    tokens.push_back({TokenKind::entity, vocab.sep(), obj.pose.translation, obj.pose.size, obj.pose.sin_theta,
                      obj.pose.cos_theta, {}});
    auto world = world_cuboids(obj);
    std::stable_sort(world.begin(), world.end(), [](const OrientedCuboid& a, const OrientedCuboid& b) {
      if (a.bottom() != b.bottom()) return a.bottom() < b.bottom();
      if (a.center.z != b.center.z) return a.center.z < b.center.z;
      return a.center.x < b.center.x;
    });
    for (const auto& w : world) {
      tokens.push_back(
          {TokenKind::cuboid, obj.class_label, w.center, w.extents, obj.pose.sin_theta, obj.pose.cos_theta, {}});
    }
  }
  return tokens;
}

Scene from_token_sequence(const std::vector<TokenRecord>& tokens, std::string room_type,
                          const ClassVocabulary& vocab) {
  if (tokens.empty() || tokens.front().kind != TokenKind::floor) {
    throw ValidationError("tokens", "sequence must start with the floor token");
  }
  Scene scene;
  scene.room_type = std::move(room_type);
  scene.floor.vertices = tokens.front().floor_vertices;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind == TokenKind::floor) throw ValidationError("tokens", "floor token after the start");
    if (t.kind == TokenKind::entity) {
      if (t.class_label != vocab.sep()) throw ValidationError("tokens", "entity token without [SEP] class");
      SceneObject obj;
      obj.pose = Pose::from_sin_cos(t.translation, t.size, t.sin_theta, t.cos_theta);
      scene.objects.push_back(std::move(obj));
      continue;
    }
    if (scene.objects.empty()) throw ValidationError("tokens", "cuboid token before any entity token");
    auto& obj = scene.objects.back();
    obj.class_label = t.class_label;
    const Pose& p = obj.pose;
    const Vec3 d = t.translation - p.translation;
    const Vec2 r = rotate_y({d.x, d.z}, -p.sin_theta, p.cos_theta);
    obj.cuboids.push_back({{r.x / p.size.x + 0.5, d.y / p.size.y + 0.5, r.z / p.size.z + 0.5},
                           {t.size.x / p.size.x, t.size.y / p.size.y, t.size.z / p.size.z}});
  }
  return scene;
}

}  // namespace cuboidkit
