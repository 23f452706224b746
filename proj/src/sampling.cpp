#include "cuboidkit/sampling.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <optional>

#include "cuboidkit/errors.hpp"
#include "cuboidkit/rng.hpp"

namespace cuboidkit {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

template <typename Map>
typename Map::key_type draw_categorical(const Map& weights, Rng& rng) {
  double total = 0.0;
  for (const auto& [k, w] : weights) total += w;
  double u = rng.uniform() * total;
  for (const auto& [k, w] : weights) {
    if (u < w) return k;
    u -= w;
  }
  // Rounding left a sliver past the last bucket.
  for (auto it = weights.rbegin(); it != weights.rend(); ++it)
    if (it->second > 0.0) return it->first;
  return weights.rbegin()->first;
}

int snap_quadrant(double theta, double& residual) {
  const double q = std::round(theta / kHalfPi);
  residual = theta - q * kHalfPi;
  const long k = static_cast<long>(q) % 4;
  return static_cast<int>(k < 0 ? k + 4 : k);
}

}  // namespace

// ---------------------------------------------------------------------------
// Fitting

BaselineSampler BaselineSampler::fit(std::span<const Scene> dataset) {
  if (dataset.empty()) throw SamplingError("cannot fit a sampler on an empty dataset");
  BaselineSampler s;
  s.absorb(dataset);
  return s;
}

void BaselineSampler::absorb(std::span<const Scene> scenes) {
  for (const auto& scene : scenes) {
    RoomStats& room = rooms_[scene.room_type];
    room.scenes += 1.0;
    room.object_counts[static_cast<int>(scene.objects.size())] += 1.0;
    for (const auto& obj : scene.objects) {
      ClassStats& cs = room.classes[obj.class_label];
      const Vec3 t = obj.pose.translation;
      cs.count += 1.0;
      cs.sum_x += t.x;
      cs.sum_z += t.z;
      cs.sum_xx += t.x * t.x;
      cs.sum_xz += t.x * t.z;
      cs.sum_zz += t.z * t.z;
      cs.sum_y += t.y;
      double residual = 0.0;
      cs.quadrant[static_cast<std::size_t>(snap_quadrant(obj.pose.theta, residual))] += 1.0;
      cs.sum_jitter_sq += residual * residual;
      for (int a = 0; a < 3; ++a) {
        const double l = std::log(obj.pose.size[a]);
        cs.sum_log_size[static_cast<std::size_t>(a)] += l;
        cs.sum_log_size_sq[static_cast<std::size_t>(a)] += l * l;
      }
      if (std::find(cs.assemblies.begin(), cs.assemblies.end(), obj.cuboids) == cs.assemblies.end()) {
        cs.assemblies.push_back(obj.cuboids);
      }
    }
  }
  training_size_ += scenes.size();
}

std::unique_ptr<SceneSampler> BaselineSampler::refit(std::span<const Scene> accepted) const {
  auto next = std::make_unique<BaselineSampler>(*this);
  next->absorb(accepted);
  return next;
}

const RoomStats& BaselineSampler::room(const std::string& room_type) const {
  auto it = rooms_.find(room_type);
  if (it == rooms_.end()) throw SamplingError("sampler has no statistics for room type '" + room_type + "'");
  return it->second;
}

std::map<int, double> BaselineSampler::count_distribution(const std::string& room_type) const {
  const RoomStats& r = room(room_type);
  std::map<int, double> out;
  for (const auto& [n, c] : r.object_counts) out[n] = c / r.scenes;
  return out;
}

std::map<int, ClassModel> BaselineSampler::class_models(const std::string& room_type) const {
  const RoomStats& r = room(room_type);
  double objects = 0.0;
  for (const auto& [label, cs] : r.classes) objects += cs.count;
  std::map<int, ClassModel> out;
  for (const auto& [label, cs] : r.classes) {
    ClassModel m;
    const double n = cs.count;
    m.frequency = n / objects;
    m.mean = {cs.sum_x / n, cs.sum_z / n};
    const double vxx = std::max(0.0, cs.sum_xx / n - m.mean.x * m.mean.x);
    const double vzz = std::max(0.0, cs.sum_zz / n - m.mean.z * m.mean.z);
    double vxz = cs.sum_xz / n - m.mean.x * m.mean.z;
    const double bound = std::sqrt(vxx * vzz);
    vxz = std::clamp(vxz, -bound, bound);
    m.cov = {vxx + kCovarianceRegularization, vxz, vzz + kCovarianceRegularization};
    m.y_mean = cs.sum_y / n;
    for (std::size_t q = 0; q < 4; ++q) m.rotation[q] = cs.quadrant[q] / n;
    m.jitter_sigma = std::sqrt(cs.sum_jitter_sq / n);
    for (std::size_t a = 0; a < 3; ++a) {
      const double mu = cs.sum_log_size[a] / n;
      m.log_size_mean[a] = mu;
      m.log_size_sigma[a] = std::sqrt(std::max(0.0, cs.sum_log_size_sq[a] / n - mu * mu));
    }
    out[label] = m;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

Scene BaselineSampler::sample(const FloorPlan& floor, const std::string& room_type, std::uint64_t seed) const {
  const RoomStats& stats = room(room_type);
  const auto models = class_models(room_type);
  std::map<int, double> class_weights;
  for (const auto& [label, m] : models) class_weights[label] = m.frequency;

  Rng rng(seed);
  Scene scene;
  scene.room_type = room_type;
  scene.floor = floor;
  const auto counts = count_distribution(room_type);
  const int count = std::min(draw_categorical(counts, rng), static_cast<int>(kDefaultMaxObjects));

  for (int k = 0; k < count; ++k) {
    const int label = draw_categorical(class_weights, rng);
    const ClassModel& m = models.at(label);
    const ClassStats& cs = stats.classes.at(label);

    const double l11 = std::sqrt(m.cov[0]);
    const double l21 = m.cov[1] / l11;
    const double l22 = std::sqrt(std::max(0.0, m.cov[2] - l21 * l21));
    std::optional<Vec2> spot;
    for (int attempt = 0; attempt < kPlacementAttempts && !spot; ++attempt) {
      const double u1 = rng.normal();
      const double u2 = rng.normal();
      const Vec2 p{m.mean.x + l11 * u1, m.mean.z + l21 * u1 + l22 * u2};
      if (floor.contains(p)) spot = p;
    }
    if (!spot) {
      throw SamplingError("could not place object " + std::to_string(k) + " inside the floor after " +
                          std::to_string(kPlacementAttempts) + " attempts");
    }

    Vec3 size;
    for (int a = 0; a < 3; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      size[a] = std::exp(m.log_size_mean[ua] + m.log_size_sigma[ua] * rng.normal());
    }
    std::map<int, double> rot;
    for (int q = 0; q < 4; ++q) rot[q] = m.rotation[static_cast<std::size_t>(q)];
    const int quadrant = draw_categorical(rot, rng);
    const double theta = quadrant * kHalfPi + m.jitter_sigma * rng.normal();

    SceneObject obj;
    obj.id = "obj_" + std::to_string(k);
    obj.class_label = label;
    obj.pose = Pose::from_theta({spot->x, m.y_mean, spot->z}, size, theta);
    obj.cuboids = cs.assemblies[static_cast<std::size_t>(rng.below(cs.assemblies.size()))];
    scene.objects.push_back(std::move(obj));
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Persistence

nlohmann::json BaselineSampler::to_json(const ClassVocabulary& vocab) const {
  nlohmann::json rooms = nlohmann::json::object();
  for (const auto& [rt, r] : rooms_) {
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& [n, c] : r.object_counts) counts.push_back({n, c});
    nlohmann::json classes = nlohmann::json::object();
    for (const auto& [label, cs] : r.classes) {
      nlohmann::json assemblies = nlohmann::json::array();
      for (const auto& a : cs.assemblies) assemblies.push_back(cuboids_to_json(a));
      classes[vocab.name(label)] = {
          {"count", cs.count},
          {"sum_x", cs.sum_x},
          {"sum_z", cs.sum_z},
          {"sum_xx", cs.sum_xx},
          {"sum_xz", cs.sum_xz},
          {"sum_zz", cs.sum_zz},
          {"sum_y", cs.sum_y},
          {"quadrant", cs.quadrant},
          {"sum_jitter_sq", cs.sum_jitter_sq},
          {"sum_log_size", cs.sum_log_size},
          {"sum_log_size_sq", cs.sum_log_size_sq},
          {"assemblies", std::move(assemblies)},
      };
    }
    rooms[rt] = {{"scenes", r.scenes}, {"object_counts", std::move(counts)}, {"classes", std::move(classes)}};
  }
  return {{"format", "baseline-sampler"}, {"version", 1}, {"training_size", training_size_}, {"rooms", rooms}};
}

BaselineSampler BaselineSampler::from_json(const nlohmann::json& j, const ClassVocabulary& vocab) {
  try {
    if (j.at("format") != "baseline-sampler") throw ValidationError("format", "not a baseline sampler model");
    BaselineSampler s;
    s.training_size_ = j.at("training_size").get<std::size_t>();
    for (const auto& [rt, rj] : j.at("rooms").items()) {
      RoomStats r;
      r.scenes = rj.at("scenes").get<double>();
      for (const auto& pair : rj.at("object_counts")) r.object_counts[pair.at(0).get<int>()] = pair.at(1).get<double>();
      for (const auto& [name, cj] : rj.at("classes").items()) {
        ClassStats cs;
        cs.count = cj.at("count").get<double>();
        cs.sum_x = cj.at("sum_x").get<double>();
        cs.sum_z = cj.at("sum_z").get<double>();
        cs.sum_xx = cj.at("sum_xx").get<double>();
        cs.sum_xz = cj.at("sum_xz").get<double>();
        cs.sum_zz = cj.at("sum_zz").get<double>();
        cs.sum_y = cj.at("sum_y").get<double>();
        cs.quadrant = cj.at("quadrant").get<std::array<double, 4>>();
        cs.sum_jitter_sq = cj.at("sum_jitter_sq").get<double>();
        cs.sum_log_size = cj.at("sum_log_size").get<std::array<double, 3>>();
        cs.sum_log_size_sq = cj.at("sum_log_size_sq").get<std::array<double, 3>>();
        for (const auto& a : cj.at("assemblies")) cs.assemblies.push_back(cuboids_from_json(a, "assemblies"));
        if (cs.count <= 0.0 || cs.assemblies.empty()) throw ValidationError("classes." + name, "empty class stats");
        r.classes[vocab.index_of(name)] = std::move(cs);
      }
      s.rooms_[rt] = std::move(r);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("model", e.what());
  }
}

void BaselineSampler::save(const std::filesystem::path& path, const ClassVocabulary& vocab) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << to_json(vocab).dump(2) << "\n";
}

BaselineSampler BaselineSampler::load(const std::filesystem::path& path, const ClassVocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("model", e.what());
  }
  return from_json(j, vocab);
}

// ---------------------------------------------------------------------------
// Rejection sampling

std::size_t RejectionConfig::effective_min_accepted() const {
  return min_accepted > 0 ? min_accepted : std::max<std::size_t>(1, k_candidates / 10);
}

void RejectionConfig::validate() const {
  if (k_candidates < 1) throw PreconditionError("k_candidates must be >= 1");
  if (!(t_threshold >= 0.0)) throw PreconditionError("threshold T must be >= 0");
  if (rounds < 1) throw PreconditionError("rounds must be >= 1");
}

FilterResult filter_candidates(std::span<const Scene> scenes, const RejectionConfig& config) {
  FilterResult out;
  for (const auto& s : scenes) {
    if (average_cuboid_iou(s, config.average_mode) <= config.t_threshold) out.accepted.push_back(s);
    else out.rejected.push_back(s);
  }
  return out;
}

nlohmann::json RoundReport::to_json() const {
  return {{"round", round},
          {"candidates", candidates},
          {"accepted", accepted},
          {"acceptance_rate", acceptance_rate},
          {"mean_candidate_ciou", mean_candidate_ciou},
          {"distilled_size", distilled_size},
          {"shortfall", shortfall}};
}

RejectionOutcome rejection_loop(const SceneSampler& initial, std::span<const FloorSpec> floors,
                                const RejectionConfig& config, std::uint64_t seed) {
  config.validate();
  if (floors.empty()) throw PreconditionError("rejection loop needs at least one floor");
  RejectionOutcome outcome;
  outcome.model = initial.refit({});
  const std::size_t k = config.k_candidates;

  for (int round = 1; round <= config.rounds; ++round) {
    std::vector<Scene> candidates(k);
    std::vector<double> cious(k, 0.0);
    std::vector<std::exception_ptr> failures(k);
    const SceneSampler& sampler = *outcome.model;
    const auto kk = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t jj = 0; jj < kk; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      try {
        const FloorSpec& f = floors[j % floors.size()];
        candidates[j] = sampler.sample(f.floor, f.room_type,
                                       derive_seed(seed, static_cast<std::uint64_t>(round), j));
        cious[j] = candidates[j].objects.empty() ? 0.0 : ciou(candidates[j]);
      } catch (...) {
        failures[j] = std::current_exception();
      }
    }
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);

    auto filtered = filter_candidates(candidates, config);
    RoundReport report;
    report.round = round;
    report.candidates = k;
    report.accepted = filtered.accepted.size();
    report.acceptance_rate = static_cast<double>(report.accepted) / static_cast<double>(k);
    double acc = 0.0;
    for (double c : cious) acc += c;
    report.mean_candidate_ciou = acc / static_cast<double>(k);

    if (report.accepted < config.effective_min_accepted()) {
      report.shortfall = true;
      report.distilled_size = outcome.model->training_size();
      outcome.rounds.push_back(report);
      outcome.shortfall = true;
      break;
    }
    outcome.model = outcome.model->refit(filtered.accepted);
    report.distilled_size = outcome.model->training_size();
    outcome.rounds.push_back(report);
    outcome.accepted.push_back(std::move(filtered.accepted));
  }
  return outcome;
}

}  // namespace cuboidkit
