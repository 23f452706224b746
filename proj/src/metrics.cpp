#include "cuboidkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "cuboidkit/errors.hpp"
#include "cuboidkit/kernels.hpp"

namespace cuboidkit {
namespace {

using Polygon = std::vector<Vec2>;

// Keeps the part of `poly` with sign * coord(axis) <= bound.
Polygon clip_half_plane(const Polygon& poly, bool x_axis, double sign, double bound) {
  Polygon out;
  if (poly.empty()) return out;
  auto value = [&](Vec2 p) { return sign * (x_axis ? p.x : p.z) - bound; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 cur = poly[i];
    const Vec2 nxt = poly[(i + 1) % poly.size()];
    const double vc = value(cur);
    const double vn = value(nxt);
    if (vc <= 0.0) out.push_back(cur);
    if ((vc < 0.0 && vn > 0.0) || (vc > 0.0 && vn < 0.0)) {
      const double t = vc / (vc - vn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) acc += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * std::abs(acc);
}

double interval_overlap(double half_a, double center_b, double half_b) {
  return std::max(0.0, std::min(half_a, center_b + half_b) - std::max(-half_a, center_b - half_b));
}

auto order_key(const OrientedCuboid& c) {
  return std::tie(c.center.x, c.center.y, c.center.z, c.extents.x, c.extents.y, c.extents.z, c.theta);
}

double footprint_area_ordered(const OrientedCuboid& a, const OrientedCuboid& b) {
  // Work in a's frame, where a is the axis-aligned box centered at the origin.
  const double sa = std::sin(a.theta), ca = std::cos(a.theta);
  const Vec2 d = rotate_y({b.center.x - a.center.x, b.center.z - a.center.z}, -sa, ca);
  const double phi = b.theta - a.theta;
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double hax = 0.5 * a.extents.x, haz = 0.5 * a.extents.z;
  const double hbx = 0.5 * b.extents.x, hbz = 0.5 * b.extents.z;

  constexpr double kAxisTol = 1e-12;
  if (std::abs(sp) < kAxisTol || std::abs(cp) < kAxisTol) {
    // Relative rotation is a multiple of 90 degrees: plain interval overlap.
    const bool swapped = std::abs(cp) < kAxisTol;
    const double bx = swapped ? hbz : hbx;
    const double bz = swapped ? hbx : hbz;
    return interval_overlap(hax, d.x, bx) * interval_overlap(haz, d.z, bz);
  }

  Polygon poly;
  poly.reserve(8);
  for (Vec2 corner : {Vec2{-hbx, -hbz}, Vec2{hbx, -hbz}, Vec2{hbx, hbz}, Vec2{-hbx, hbz}}) {
    poly.push_back(rotate_y(corner, sp, cp) + d);
  }
  poly = clip_half_plane(poly, true, 1.0, hax);
  poly = clip_half_plane(poly, true, -1.0, hax);
  poly = clip_half_plane(poly, false, 1.0, haz);
  poly = clip_half_plane(poly, false, -1.0, haz);
  return polygon_area(poly);
}

}  // namespace

double footprint_intersection_area(const OrientedCuboid& a, const OrientedCuboid& b) {
  // Evaluate in a fixed operand order so the result is exactly symmetric.
  return order_key(b) < order_key(a) ? footprint_area_ordered(b, a) : footprint_area_ordered(a, b);
}

double intersection_volume(const OrientedCuboid& a, const OrientedCuboid& b) {
  const double dy = std::min(a.top(), b.top()) - std::max(a.bottom(), b.bottom());
  if (dy <= 0.0) return 0.0;
  return footprint_intersection_area(a, b) * dy;
}

double iou(const OrientedCuboid& a, const OrientedCuboid& b) {
  const double inter = intersection_volume(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.volume() + b.volume() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

SceneCuboids collect_world_cuboids(const Scene& scene) {
  SceneCuboids out;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    for (const auto& c : scene.objects[i].cuboids) {
      out.cuboids.push_back(world_cuboid(scene.objects[i], c));
      out.owner.push_back(static_cast<int>(i));
    }
  }
  return out;
}

double IoUMatrix::upper_sum() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = i + 1; j < size; ++j) acc += values[i * size + j];
  return acc;
}

IoUMatrix iou_matrix(const SceneCuboids& sc) {
  auto pairs = kernels::parallel::pairwise_iou(sc.cuboids, sc.owner);
  return {pairs.size, std::move(pairs.values), sc.owner};
}

IoUMatrix scene_iou_matrix(const Scene& scene) { return iou_matrix(collect_world_cuboids(scene)); }

namespace {

struct VolumeSums {
  double intersection = 0.0;
  double total = 0.0;
};

VolumeSums volume_sums(const Scene& scene) {
  const auto sc = collect_world_cuboids(scene);
  VolumeSums s;
  for (std::size_t i = 0; i < sc.cuboids.size(); ++i) {
    s.total += sc.cuboids[i].volume();
    for (std::size_t j = i + 1; j < sc.cuboids.size(); ++j) {
      if (sc.owner[i] != sc.owner[j]) s.intersection += intersection_volume(sc.cuboids[i], sc.cuboids[j]);
    }
  }
  return s;
}

}  // namespace

double ciou(const Scene& scene) {
  const auto s = volume_sums(scene);
  if (!(s.total > 0.0)) throw UndefinedMetricError("CIoU is undefined for a scene without cuboid volume");
  return 1000.0 * s.intersection / s.total;
}

double nirate(std::span<const Scene> scenes, double threshold) {
  if (scenes.empty()) throw UndefinedMetricError("NIRate is undefined for an empty scene list");
  std::size_t pass = 0;
  for (const auto& scene : scenes) {
    const auto s = volume_sums(scene);
    const double value = s.total > 0.0 ? 1000.0 * s.intersection / s.total : 0.0;
    if (value <= threshold) ++pass;
  }
  return 100.0 * static_cast<double>(pass) / static_cast<double>(scenes.size());
}

ClassHistogram class_histogram(std::span<const Scene> scenes, const ClassVocabulary& vocab) {
  ClassHistogram h;
  for (const auto& scene : scenes)
    for (const auto& o : scene.objects) h[vocab.name(o.class_label)] += 1.0;
  return h;
}

double ckl(const ClassHistogram& generated, const ClassHistogram& reference, double epsilon) {
  if (reference.empty()) throw PreconditionError("CKL needs a non-empty reference histogram");
  std::map<std::string, std::pair<double, double>> joint;
  for (const auto& [k, v] : generated) joint[k].first = v;
  for (const auto& [k, v] : reference) joint[k].second = v;
  double zp = 0.0, zq = 0.0;
  for (const auto& [k, pq] : joint) {
    zp += pq.first + epsilon;
    zq += pq.second + epsilon;
  }
  double kl = 0.0;
  for (const auto& [k, pq] : joint) {
    const double p = (pq.first + epsilon) / zp;
    const double q = (pq.second + epsilon) / zq;
    kl += p * std::log(p / q);
  }
  return 0.01 * std::max(0.0, kl);
}

double average_cuboid_iou(const Scene& scene, AverageMode mode) {
  const auto m = scene_iou_matrix(scene);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.size; ++i) {
    for (std::size_t j = i + 1; j < m.size; ++j) {
      if (m.owner[i] == m.owner[j]) continue;
      const double v = m.at(i, j);
      if (mode == AverageMode::nonzero_pairs && v <= 0.0) continue;
      acc += v;
      ++count;
    }
  }
  return count ? acc / static_cast<double>(count) : 0.0;
}

nlohmann::json MetricsReport::to_json() const {
  return {{"ciou", ciou},
          {"nirate", nirate},
          {"ckl", ckl ? nlohmann::json(*ckl) : nlohmann::json(nullptr)},
          {"n_scenes", n_scenes},
          {"threshold", threshold}};
}

MetricsReport evaluate(std::span<const Scene> scenes, double threshold, std::span<const Scene> reference,
                       const ClassVocabulary& vocab) {
  MetricsReport r;
  r.n_scenes = scenes.size();
  r.threshold = threshold;
  r.nirate = nirate(scenes, threshold);
  double acc = 0.0;
  for (const auto& s : scenes) {
    const auto v = volume_sums(s);
    acc += v.total > 0.0 ? 1000.0 * v.intersection / v.total : 0.0;
  }
  r.ciou = acc / static_cast<double>(scenes.size());
  if (!reference.empty()) r.ckl = ckl(class_histogram(scenes, vocab), class_histogram(reference, vocab));
  return r;
}

}  // namespace cuboidkit
