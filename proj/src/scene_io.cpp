#include "cuboidkit/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "cuboidkit/errors.hpp"

namespace cuboidkit {

using nlohmann::json;

namespace {

json vec3_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(where + key, "missing field");
  return j.at(key);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(field, "non-finite number");
  return v;
}

Vec3 vec3_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(field, "expected an array of 3 numbers");
  return {number(j[0], field), number(j[1], field), number(j[2], field)};
}

FloorPlan floor_from(const json& root) {
  const json& floor = require(root, "floor", "");
  const json& verts = require(floor, "vertices", "floor.");
  if (!verts.is_array()) throw ValidationError("floor.vertices", "expected an array");
  FloorPlan plan;
  for (const auto& v : verts) {
    if (!v.is_array() || v.size() != 2) throw ValidationError("floor.vertices", "expected [x, z] pairs");
    plan.vertices.push_back({number(v[0], "floor.vertices"), number(v[1], "floor.vertices")});
  }
  plan.validate();
  return plan;
}

std::string room_type_from(const json& root) {
  const json& rt = require(root, "room_type", "");
  if (!rt.is_string()) throw ValidationError("room_type", "expected a string");
  return rt.get<std::string>();
}

}  // namespace

json cuboids_to_json(const std::vector<Cuboid>& cuboids) {
  json arr = json::array();
  for (const auto& c : cuboids) arr.push_back({{"center", vec3_json(c.center)}, {"size", vec3_json(c.size)}});
  return arr;
}

std::vector<Cuboid> cuboids_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field, "expected an array");
  std::vector<Cuboid> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = field + "[" + std::to_string(i) + "].";
    out.push_back({vec3_from(require(j[i], "center", where), where + "center"),
                   vec3_from(require(j[i], "size", where), where + "size")});
  }
  return out;
}

json scene_to_json(const Scene& scene, const ClassVocabulary& vocab) {
  json verts = json::array();
  for (const auto& v : scene.floor.vertices) verts.push_back(json::array({v.x, v.z}));
  json objects = json::array();
  for (const auto& o : scene.objects) {
    json obj;
    obj["id"] = o.id;
    obj["class"] = vocab.name(o.class_label);
    obj["model_id"] = o.model_id ? json(*o.model_id) : json(nullptr);
    obj["translation"] = vec3_json(o.pose.translation);
    obj["size"] = vec3_json(o.pose.size);
    obj["theta"] = o.pose.theta;
    obj["cuboids"] = cuboids_to_json(o.cuboids);
    objects.push_back(std::move(obj));
  }
  json root;
  root["room_type"] = scene.room_type;
  root["floor"] = {{"vertices", std::move(verts)}};
  root["objects"] = std::move(objects);
  return root;
}

Scene scene_from_json(const json& root, const ClassVocabulary& vocab, std::size_t max_objects) {
  if (!root.is_object()) throw ValidationError("scene", "expected a JSON object");
  Scene scene;
  scene.room_type = room_type_from(root);
  scene.floor = floor_from(root);

  const json& objects = require(root, "objects", "");
  if (!objects.is_array()) throw ValidationError("objects", "expected an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const json& o = objects[i];
    const std::string where = "objects[" + std::to_string(i) + "].";
    SceneObject obj;
    if (o.contains("id")) {
      if (!o["id"].is_string()) throw ValidationError(where + "id", "expected a string");
      obj.id = o["id"].get<std::string>();
    }
    const json& cls = require(o, "class", where);
    if (!cls.is_string()) throw ValidationError(where + "class", "expected a string");
    const auto label = vocab.find(cls.get<std::string>());
    if (!label) throw ValidationError(where + "class", "unknown class '" + cls.get<std::string>() + "'");
    obj.class_label = *label;
    if (o.contains("model_id") && !o["model_id"].is_null()) {
      if (!o["model_id"].is_string()) throw ValidationError(where + "model_id", "expected a string or null");
      obj.model_id = o["model_id"].get<std::string>();
    }
    const Vec3 t = vec3_from(require(o, "translation", where), where + "translation");
    const Vec3 s = vec3_from(require(o, "size", where), where + "size");
    try {
      if (o.contains("theta")) {
        obj.pose = Pose::from_theta(t, s, number(o["theta"], where + "theta"));
        if (o.contains("sin_theta") || o.contains("cos_theta")) {
          // Explicit sine/cosine must still be a unit vector.
          (void)Pose::from_sin_cos(t, s, number(require(o, "sin_theta", where), where + "sin_theta"),
                                   number(require(o, "cos_theta", where), where + "cos_theta"));
        }
      } else if (o.contains("sin_theta") || o.contains("cos_theta")) {
        obj.pose = Pose::from_sin_cos(t, s, number(require(o, "sin_theta", where), where + "sin_theta"),
                                      number(require(o, "cos_theta", where), where + "cos_theta"));
      } else {
        throw ValidationError(where + "theta", "missing field");
      }
    } catch (const ValidationError& e) {
      if (e.field().rfind(where, 0) == 0) throw;
      throw ValidationError(where + e.field(), e.what());
    }
    obj.cuboids = cuboids_from_json(require(o, "cuboids", where), where + "cuboids");
    scene.objects.push_back(std::move(obj));
  }
  scene.validate(vocab, max_objects);
  return scene;
}

std::string dump_scene(const Scene& scene, const ClassVocabulary& vocab) {
  return scene_to_json(scene, vocab).dump(2) + "\n";
}

Scene parse_scene(std::istream& in, const ClassVocabulary& vocab, std::size_t max_objects) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("scene", std::string("invalid JSON: ") + e.what());
  }
  return scene_from_json(j, vocab, max_objects);
}

void save_scene(const std::filesystem::path& path, const Scene& scene, const ClassVocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << dump_scene(scene, vocab);
}

Scene load_scene(const std::filesystem::path& path, const ClassVocabulary& vocab, std::size_t max_objects) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_scene(in, vocab, max_objects);
}

std::vector<std::filesystem::path> list_json_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

FloorSpec load_floor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("floor", std::string("invalid JSON: ") + e.what());
  }
  return {room_type_from(j), floor_from(j)};
}

}  // namespace cuboidkit
