#include "cuboidkit/curation.hpp"

#include <omp.h>

#include <cmath>

#include "cuboidkit/errors.hpp"
#include "cuboidkit/metrics.hpp"
#include "cuboidkit/scene_io.hpp"

namespace cuboidkit {

void CurationConfig::validate() const {
  if (!(eta > 0.0)) throw PreconditionError("eta must be positive");
  if (!(clip_norm > 0.0)) throw PreconditionError("clip norm must be positive");
  if (max_iters < 1) throw PreconditionError("max_iters must be >= 1");
  if (!(epsilon_stop >= 0.0)) throw PreconditionError("epsilon must be >= 0");
  if (!(fd_step > 0.0)) throw PreconditionError("finite-difference step must be positive");
}

double total_overlap(const Scene& scene) { return scene_iou_matrix(scene).upper_sum(); }

namespace {

double footprint_radius(const OrientedCuboid& c) { return 0.5 * std::hypot(c.extents.x, c.extents.z); }

// IoU mass between one object (placed at `pose`) and every other object.
double object_overlap(const Scene& scene, std::size_t index, const Pose& pose,
                      const std::vector<std::vector<OrientedCuboid>>& world, double reach) {
  SceneObject moved = scene.objects[index];
  moved.pose = pose;
  const auto mine = world_cuboids(moved);
  double acc = 0.0;
  for (std::size_t j = 0; j < scene.objects.size(); ++j) {
    if (j == index) continue;
    for (const auto& a : mine) {
      const double ra = footprint_radius(a);
      for (const auto& b : world[j]) {
        const double dx = a.center.x - b.center.x;
        const double dz = a.center.z - b.center.z;
        const double lim = ra + footprint_radius(b) + reach;
        if (dx * dx + dz * dz > lim * lim) continue;
        acc += iou(a, b);
      }
    }
  }
  return acc;
}

Vec2 gradient_with(const Scene& scene, std::size_t i, double h,
                   const std::vector<std::vector<OrientedCuboid>>& world) {
  const Pose base = scene.objects[i].pose;
  auto shifted = [&](double dx, double dz) {
    Pose p = base;
    p.translation.x += dx;
    p.translation.z += dz;
    return object_overlap(scene, i, p, world, 2.0 * h);
  };
  // Pairs not involving object i cancel in the difference.
  const double gx = (shifted(h, 0.0) - shifted(-h, 0.0)) / (2.0 * h);
  const double gz = (shifted(0.0, h) - shifted(0.0, -h)) / (2.0 * h);
  return {gx, gz};
}

std::vector<std::vector<OrientedCuboid>> snapshot(const Scene& scene) {
  std::vector<std::vector<OrientedCuboid>> world;
  world.reserve(scene.objects.size());
  for (const auto& o : scene.objects) world.push_back(world_cuboids(o));
  return world;
}

}  // namespace

Vec2 overlap_gradient(const Scene& scene, std::size_t object_index, double fd_step) {
  if (object_index >= scene.objects.size()) throw IndexError("object index out of range");
  if (!(fd_step > 0.0)) throw PreconditionError("finite-difference step must be positive");
  return gradient_with(scene, object_index, fd_step, snapshot(scene));
}

CurationResult avoid_intersections(const Scene& scene, const CurationConfig& config) {
  config.validate();
  CurationResult out{scene, {}};
  Scene& cur = out.scene;
  CurationReport& rep = out.report;
  double loss = total_overlap(cur);
  rep.initial_overlap = loss;

  const std::size_t nobj = cur.objects.size();
  std::vector<Vec2> grads(nobj);
  while (rep.iterations < config.max_iters && loss > config.epsilon_stop) {
    const auto world = snapshot(cur);
    const auto n = static_cast<std::ptrdiff_t>(nobj);
#pragma omp parallel for schedule(dynamic, 1) if (nobj > 8)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      grads[i] = gradient_with(cur, i, config.fd_step, world);
    }

    bool moved = false;
    for (std::size_t i = 0; i < nobj; ++i) {
      Vec2 g = grads[i];
      if (g.x == 0.0 && g.z == 0.0) continue;  // leaves the translation bitwise intact
      const double norm = std::hypot(g.x, g.z);
      if (norm > config.clip_norm) g = g * (config.clip_norm / norm);
      cur.objects[i].pose.translation.x -= config.eta * g.x;
      cur.objects[i].pose.translation.z -= config.eta * g.z;
      moved = true;
    }
    ++rep.iterations;
    if (!moved) {
      // Fixed point: the remaining iterations would repeat this one exactly.
      rep.history.resize(static_cast<std::size_t>(config.max_iters), loss);
      rep.iterations = config.max_iters;
      break;
    }
    loss = total_overlap(cur);
    rep.history.push_back(loss);
  }
  rep.final_overlap = loss;
  rep.converged = loss <= config.epsilon_stop;
  return out;
}

namespace {

double mean_displacement(const Scene& before, const Scene& after) {
  if (before.objects.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < before.objects.size(); ++i) {
    const Vec3 d = after.objects[i].pose.translation - before.objects[i].pose.translation;
    acc += std::sqrt(dot(d, d));
  }
  return acc / static_cast<double>(before.objects.size());
}

void summarize(CuratedDataset& out, std::span<const Scene> originals, double ni_threshold) {
  auto& s = out.summary;
  s.n_scenes = out.scenes.size();
  if (!out.scenes.empty()) {
    s.nirate_before = nirate(originals, ni_threshold);
    s.nirate_after = nirate(out.scenes, ni_threshold);
  }
  double moved = 0.0;
  std::size_t objects = 0;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    for (std::size_t k = 0; k < originals[i].objects.size(); ++k) {
      const Vec3 d = out.scenes[i].objects[k].pose.translation - originals[i].objects[k].pose.translation;
      moved += std::sqrt(dot(d, d));
      ++objects;
    }
  }
  s.mean_displacement = objects ? moved / static_cast<double>(objects) : 0.0;
}

}  // namespace

CuratedDataset curate_dataset(std::span<const Scene> scenes, const CurationConfig& config, double ni_threshold) {
  config.validate();
  CuratedDataset out;
  out.scenes.resize(scenes.size());
  out.names.resize(scenes.size());
  out.summary.records.resize(scenes.size());
  const auto n = static_cast<std::ptrdiff_t>(scenes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    auto result = avoid_intersections(scenes[i], config);
    auto& rec = out.summary.records[i];
    rec.name = "scene_" + std::to_string(i);
    rec.mean_displacement = mean_displacement(scenes[i], result.scene);
    rec.report = std::move(result.report);
    out.scenes[i] = std::move(result.scene);
    out.names[i] = rec.name;
  }
  summarize(out, scenes, ni_threshold);
  return out;
}

CuratedDataset curate_files(std::span<const std::filesystem::path> files, const CurationConfig& config,
                            double ni_threshold, const ClassVocabulary& vocab) {
  std::vector<Scene> loaded;
  std::vector<std::string> names;
  std::vector<SceneCurationRecord> errors;
  std::vector<std::size_t> slot;  // position in the final record list
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      loaded.push_back(load_scene(files[i], vocab));
      names.push_back(files[i].filename().string());
      slot.push_back(i);
    } catch (const Error& e) {
      errors.push_back({files[i].filename().string(), std::nullopt, 0.0, e.what()});
    }
  }
  CuratedDataset out = curate_dataset(loaded, config, ni_threshold);
  out.names = names;
  std::vector<SceneCurationRecord> records(files.size());
  for (std::size_t k = 0; k < loaded.size(); ++k) {
    out.summary.records[k].name = names[k];
    records[slot[k]] = std::move(out.summary.records[k]);
  }
  std::size_t e = 0;
  for (auto& r : records) {
    if (r.name.empty()) r = std::move(errors[e++]);
  }
  out.summary.records = std::move(records);
  out.summary.n_errors = errors.size();
  return out;
}

nlohmann::json CurationSummary::to_json() const {
  nlohmann::json scenes = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["file"] = r.name;
    if (r.report) {
      j["iterations"] = r.report->iterations;
      j["initial_overlap"] = r.report->initial_overlap;
      j["final_overlap"] = r.report->final_overlap;
      j["converged"] = r.report->converged;
      j["mean_displacement"] = r.mean_displacement;
    } else {
      j["error"] = r.error;
    }
    scenes.push_back(std::move(j));
  }
  return {{"nirate_before", nirate_before}, {"nirate_after", nirate_after},
          {"mean_displacement", mean_displacement}, {"n_scenes", n_scenes},
          {"n_errors", n_errors}, {"scenes", std::move(scenes)}};
}

}  // namespace cuboidkit
