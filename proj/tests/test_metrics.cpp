#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cuboidkit/errors.hpp"
#include "cuboidkit/metrics.hpp"
#include "cuboidkit/rng.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace cuboidkit;

namespace {

OrientedCuboid box(Vec3 c, Vec3 e, double theta = 0.0) { return {c, e, theta}; }

SceneObject object_with(Vec3 t, Vec3 s, double theta, int cls = 0) {
  SceneObject o;
  o.class_label = cls;
  o.pose = Pose::from_theta(t, s, theta);
  o.cuboids = {{{0.5, 0.5, 0.5}, {1, 1, 1}}};
  return o;
}

Scene scene_of(std::vector<SceneObject> objects) {
  Scene s;
  s.room_type = "bedroom";
  s.floor = FloorPlan::rectangle(-10, -10, 10, 10);
  s.objects = std::move(objects);
  return s;
}

OrientedCuboid random_box(Rng& rng) {
  return box({rng.uniform(-0.6, 0.6), rng.uniform(-0.4, 0.4), rng.uniform(-0.6, 0.6)},
             {rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5)}, rng.uniform(-3.2, 3.2));
}

}  // namespace

TEST_CASE("intersection volume examples") {
  const auto u = box({0, 0, 0}, {1, 1, 1});
  CHECK(intersection_volume(u, u) == doctest::Approx(1.0));
  CHECK(intersection_volume(u, box({0.5, 0, 0}, {1, 1, 1})) == doctest::Approx(0.5));
  const double octagon = 2.0 * (std::sqrt(2.0) - 1.0);
  const auto r = box({0, 0, 0}, {1, 1, 1}, std::numbers::pi / 4);
  CHECK(std::abs(intersection_volume(u, r) - octagon) <= 1e-9);
  const auto mc = oracle::mc_intersection_volume(u, r, 100, 17);
  CHECK(std::abs(mc.volume - octagon) <= 2e-3);
}

TEST_CASE("iou examples") {
  const auto u = box({0, 0, 0}, {1, 1, 1});
  CHECK(iou(u, u) == doctest::Approx(1.0));
  CHECK(iou(u, box({3, 0, 0}, {1, 1, 1})) == 0.0);
  CHECK(iou(u, box({0.5, 0, 0}, {1, 1, 1})) == doctest::Approx(1.0 / 3.0));
  CHECK(iou(u, box({0, 1.5, 0}, {1, 1, 1})) == 0.0);
  CHECK(iou(u, box({1, 0, 0}, {1, 1, 1})) == 0.0);
}

TEST_CASE("axis-aligned intersections match interval arithmetic exactly") {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    auto a = random_box(rng);
    auto b = random_box(rng);
    a.theta = 0;
    const bool swap = rng.below(2) == 1;
    const double bx = swap ? b.extents.z : b.extents.x;
    const double bz = swap ? b.extents.x : b.extents.z;
    b.theta = swap ? std::numbers::pi / 2 : 0.0;
    auto overlap = [](double c1, double e1, double c2, double e2) {
      return std::max(0.0, std::min(c1 + e1 / 2, c2 + e2 / 2) - std::max(c1 - e1 / 2, c2 - e2 / 2));
    };
    const double expected = overlap(a.center.x, a.extents.x, b.center.x, bx) *
                            overlap(a.center.y, a.extents.y, b.center.y, b.extents.y) *
                            overlap(a.center.z, a.extents.z, b.center.z, bz);
    CHECK(intersection_volume(a, b) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("intersection is symmetric, bounded and rigid-motion invariant") {
  Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const double v = intersection_volume(a, b);
    CHECK(v == intersection_volume(b, a));
    CHECK(v >= 0.0);
    CHECK(v <= std::min(a.volume(), b.volume()) + 1e-12);

    const double phi = rng.uniform(-3, 3);
    const Vec3 shift{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    auto move = [&](OrientedCuboid c) {
      const Vec2 p = rotate_y({c.center.x, c.center.z}, std::sin(phi), std::cos(phi));
      c.center = Vec3{p.x, c.center.y, p.z} + shift;
      c.theta += phi;
      return c;
    };
    CHECK(std::abs(iou(move(a), move(b)) - iou(a, b)) <= 1e-9);
  }
}

TEST_CASE("random pairs agree with Monte Carlo within 3 sigma") {
  Rng rng(77);
  for (int i = 0; i < 25; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const auto mc = oracle::mc_intersection_volume(a, b, 60, 1000 + i);
    CHECK(std::abs(intersection_volume(a, b) - mc.volume) <= 3 * mc.sigma + 1e-12);
  }
}

TEST_CASE("footprint area of a rotated square") {
  const auto u = box({0, 0, 0}, {2, 1, 2});
  CHECK(footprint_intersection_area(u, box({0, 0, 0}, {2, 1, 2}, std::numbers::pi / 4)) ==
        doctest::Approx(8.0 * (std::sqrt(2.0) - 1.0)));
}

TEST_CASE("scene IoU matrix") {
  const auto single = scene_of({object_with({0, 0.5, 0}, {1, 1, 1}, 0)});
  auto multi_part = single;
  multi_part.objects[0].cuboids = {{{0.25, 0.5, 0.5}, {0.5, 1, 1}}, {{0.5, 0.5, 0.5}, {0.5, 1, 1}}};
  const auto m1 = scene_iou_matrix(multi_part);
  REQUIRE(m1.size == 2);
  for (double v : m1.values) CHECK(v == 0.0);

  const auto m2 = scene_iou_matrix(synthetic::two_cube_scene(0.5));
  REQUIRE(m2.size == 2);
  CHECK(m2.at(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(m2.at(1, 0) == m2.at(0, 1));
  CHECK(m2.at(0, 0) == 0.0);
  CHECK(m2.upper_sum() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("scene IoU matrix matches a 256^3 lattice oracle") {
  const auto s = scene_of({object_with({0, 0.5, 0}, {1.2, 1, 0.8}, 0.3),
                           object_with({0.6, 0.4, 0.2}, {1.0, 0.8, 1.0}, -0.7),
                           object_with({-0.3, 0.6, 0.5}, {0.9, 1.2, 0.7}, 1.2)});
  const auto m = scene_iou_matrix(s);
  const auto sc = collect_world_cuboids(s);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      const double oracle_iou = oracle::lattice_iou(sc.cuboids[i], sc.cuboids[j], 256);
      CHECK(std::abs(m.at(i, j) - oracle_iou) <= 5e-3);
    }
}

TEST_CASE("ciou examples") {
  CHECK(ciou(scene_of({object_with({0, 0.5, 0}, {1, 1, 1}, 0), object_with({3, 0.5, 0}, {1, 1, 1}, 0.4)})) == 0.0);
  // Two 1 x 5 x 1 columns sharing a 0.002 m slab: 10 m^3 total, 0.01 m^3 shared.
  const auto s = scene_of({object_with({0, 2.5, 0}, {1, 5, 1}, 0), object_with({0.998, 2.5, 0}, {1, 5, 1}, 0)});
  CHECK(ciou(s) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(ciou(scene_of({})), UndefinedMetricError);
}

TEST_CASE("ciou of a five-object scene matches the lattice oracle within 1%") {
  const auto s = scene_of({object_with({0, 0.5, 0}, {1.4, 1, 1.0}, 0.2),
                           object_with({0.9, 0.5, 0.3}, {1.0, 1, 1.2}, 0.9),
                           object_with({-0.8, 0.6, 0.6}, {0.8, 1.2, 0.8}, -0.4),
                           object_with({0.2, 0.4, -0.9}, {1.2, 0.8, 0.9}, 0.0),
                           object_with({3.0, 0.5, 3.0}, {1, 1, 1}, 0.0)});
  const auto sc = collect_world_cuboids(s);
  double inter = 0.0, vol = 0.0;
  for (std::size_t i = 0; i < sc.cuboids.size(); ++i) {
    vol += sc.cuboids[i].volume();
    for (std::size_t j = i + 1; j < sc.cuboids.size(); ++j) {
      if (sc.owner[i] == sc.owner[j]) continue;
      inter += oracle::lattice_intersection(sc.cuboids[i], sc.cuboids[j], {-2.5, -0.5, -2.5}, {2.5, 1.5, 2.5}, 200);
    }
  }
  const double expected = 1000.0 * inter / vol;
  REQUIRE(expected > 10.0);
  CHECK(std::abs(ciou(s) - expected) <= 0.01 * expected);
}

TEST_CASE("ciou is scale invariant") {
  for (const auto& s : synthetic::scene_dataset({.scenes = 6, .seed = 12})) {
    Scene big = s;
    for (auto& o : big.objects) {
      o.pose.translation = o.pose.translation * 2.5;
      o.pose.size = o.pose.size * 2.5;
    }
    CHECK(std::abs(ciou(big) - ciou(s)) <= 1e-9 * std::max(1.0, ciou(s)));
  }
}

TEST_CASE("nirate") {
  const auto clean = synthetic::two_cube_scene(3.0);
  const auto dirty = synthetic::two_cube_scene(0.5);
  const std::vector<Scene> all_clean{clean, clean};
  CHECK(nirate(all_clean) == 100.0);
  const std::vector<Scene> mixed{clean, dirty, clean, clean};
  CHECK(nirate(mixed) == 75.0);
  CHECK_THROWS_AS(nirate(std::span<const Scene>{}), UndefinedMetricError);
  // An empty room cannot intersect.
  const std::vector<Scene> empty_room{scene_of({})};
  CHECK(nirate(empty_room) == 100.0);
  // 0.01 on the scaled value sits between these two overlaps.
  const std::vector<Scene> touching{synthetic::two_cube_scene(1.0 - 1e-6), synthetic::two_cube_scene(1.0 - 1e-4)};
  CHECK(nirate(touching) == 50.0);
  CHECK(nirate(touching, 1.0) == 100.0);
}

TEST_CASE("ckl") {
  const ClassHistogram a{{"chair", 3}, {"table", 1}};
  CHECK(ckl(a, a) == 0.0);
  const ClassHistogram gen{{"A", 1}};
  const ClassHistogram ref{{"A", 1}, {"B", 1}};
  const double e = 1e-6;
  const double p_a = (1 + e) / (1 + 2 * e), p_b = e / (1 + 2 * e);
  const double q = 0.5;
  const double expected = 0.01 * (p_a * std::log(p_a / q) + p_b * std::log(p_b / q));
  CHECK(ckl(gen, ref) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ckl(gen, ref) == doctest::Approx(0.01 * std::log(2.0)).epsilon(1e-4));
  const ClassHistogram other{{"C", 5}};
  const double v = ckl(other, ref);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
  CHECK_THROWS_AS(ckl(gen, ClassHistogram{}), PreconditionError);
}

TEST_CASE("class histogram counts objects by name") {
  const auto scenes = synthetic::scene_dataset({.scenes = 4, .seed = 5});
  const auto h = class_histogram(scenes);
  double total = 0;
  for (const auto& [_, c] : h) total += c;
  std::size_t objects = 0;
  for (const auto& s : scenes) objects += s.objects.size();
  CHECK(total == static_cast<double>(objects));
}

TEST_CASE("average cuboid IoU modes") {
  auto s = scene_of({object_with({0, 0.5, 0}, {1, 1, 1}, 0), object_with({0.5, 0.5, 0}, {1, 1, 1}, 0),
                     object_with({5, 0.5, 0}, {1, 1, 1}, 0)});
  CHECK(average_cuboid_iou(s, AverageMode::nonzero_pairs) == doctest::Approx(1.0 / 3.0));
  CHECK(average_cuboid_iou(s, AverageMode::all_pairs) == doctest::Approx(1.0 / 9.0));
  CHECK(average_cuboid_iou(scene_of({}), AverageMode::nonzero_pairs) == 0.0);
  CHECK(average_cuboid_iou(synthetic::two_cube_scene(4.0), AverageMode::all_pairs) == 0.0);
}

TEST_CASE("metrics report") {
  const std::vector<Scene> scenes{synthetic::two_cube_scene(3.0), synthetic::two_cube_scene(0.5)};
  const auto r = evaluate(scenes);
  CHECK(r.n_scenes == 2);
  CHECK(r.nirate == 50.0);
  CHECK(r.ciou == doctest::Approx((0.0 + 1000.0 * 0.5 / 2.0) / 2.0));
  CHECK_FALSE(r.ckl.has_value());
  const auto j = r.to_json();
  for (const char* key : {"ciou", "nirate", "ckl", "n_scenes", "threshold"}) CHECK(j.contains(key));
  CHECK(j["ckl"].is_null());
  const auto with_ref = evaluate(scenes, kDefaultNiThreshold, scenes);
  REQUIRE(with_ref.ckl.has_value());
  CHECK(*with_ref.ckl == 0.0);
}
