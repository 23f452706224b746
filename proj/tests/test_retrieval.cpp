#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "cuboidkit/abstraction.hpp"
#include "cuboidkit/errors.hpp"
#include "cuboidkit/retrieval.hpp"
#include "cuboidkit/voxelizer.hpp"
#include "synthetic.hpp"

using namespace cuboidkit;

namespace {

const int kChair = ClassVocabulary::front_default().index_of("chair");
const int kTable = ClassVocabulary::front_default().index_of("table");

CatalogEntry entry(std::string id, int cls, std::vector<Cuboid> cuboids, int n = 32) {
  return {std::move(id), cls, rasterize_cuboids(cuboids, n), std::move(cuboids)};
}

// Table: top slab plus four legs, leg width `leg`, top thickness `top`.
std::vector<Cuboid> table(double leg, double top) {
  std::vector<Cuboid> cs{{{0.5, 1 - top / 2, 0.5}, {1, top, 1}}};
  const double h = 1 - top;
  for (double x : {leg / 2, 1 - leg / 2})
    for (double z : {leg / 2, 1 - leg / 2}) cs.push_back({{x, h / 2, z}, {leg, h, leg}});
  return cs;
}

std::vector<Cuboid> tall_chair() {
  return {{{0.5, 0.45, 0.5}, {1, 0.1, 1}}, {{0.5, 0.75, 0.95}, {1, 0.5, 0.1}}, {{0.5, 0.2, 0.5}, {1, 0.4, 1}}};
}
std::vector<Cuboid> stool() { return {{{0.5, 0.45, 0.5}, {1, 0.1, 1}}, {{0.5, 0.2, 0.5}, {0.3, 0.4, 0.3}}}; }

}  // namespace

TEST_CASE("rasterization by centre inclusion") {
  const std::vector<Cuboid> full{{{0.5, 0.5, 0.5}, {1, 1, 1}}};
  CHECK(occupancy_count(rasterize_cuboids(full, 4)) == 64);
  CHECK(occupancy_count(rasterize_cuboids({}, 4)) == 0);
  const std::vector<Cuboid> half{{{0.25, 0.5, 0.5}, {0.5, 1, 1}}};
  const auto g = rasterize_cuboids(half, 4);
  CHECK(occupancy_count(g) == 32);
  CHECK(g.test(1, 0, 0));
  CHECK_FALSE(g.test(2, 0, 0));
}

TEST_CASE("voxel IoU") {
  VoxelGrid a(4), b(4);
  a.fill_box(0, 0, 0, 4, 4, 4);
  CHECK(voxel_iou(a, a) == 1.0);
  b.fill_box(0, 0, 0, 2, 4, 4);
  CHECK(voxel_iou(a, b) == 0.5);
  VoxelGrid c(4), d(4);
  c.fill_box(0, 0, 0, 2, 2, 2);
  d.fill_box(2, 2, 2, 4, 4, 4);
  CHECK(voxel_iou(c, d) == 0.0);
  CHECK(voxel_iou(VoxelGrid(4), VoxelGrid(4)) == 1.0);
  CHECK_THROWS_AS(voxel_iou(VoxelGrid(4), VoxelGrid(5)), PreconditionError);
  CHECK(voxel_iou(c, b) == voxel_iou(b, c));
}

TEST_CASE("self retrieval and single-entry classes") {
  const ShapeCatalog cat({entry("c-tall", kChair, tall_chair()), entry("c-stool", kChair, stool()),
                          entry("t-1", kTable, table(0.1, 0.1))});
  for (const auto& e : cat.entries()) {
    const auto m = retrieve(e.cuboids, e.class_label, cat);
    CHECK(m.model_id == e.model_id);
    CHECK(m.iou == 1.0);
  }
  // The only table wins even for a chair-shaped query.
  CHECK(retrieve(stool(), kTable, cat).model_id == "t-1");
  CHECK_THROWS_AS(retrieve(stool(), ClassVocabulary::front_default().index_of("sofa"), cat), EmptyClassError);
}

TEST_CASE("stool query prefers the stool entry") {
  const ShapeCatalog cat({entry("a-tall", kChair, tall_chair()), entry("b-stool", kChair, stool())});
  auto q = stool();
  q[1].size.x = 0.35;  // not an exact copy
  const auto m = retrieve(q, kChair, cat);
  CHECK(m.model_id == "b-stool");
  const auto qg = rasterize_cuboids(q, 32);
  CHECK(m.iou == voxel_iou(qg, cat.entries()[1].grid));
  CHECK(m.iou > voxel_iou(qg, cat.entries()[0].grid));
}

TEST_CASE("retrieval ignores catalog order and breaks ties by id") {
  auto a = entry("m-b", kChair, stool());
  auto b = entry("m-a", kChair, stool());
  auto c = entry("m-c", kChair, tall_chair());
  const ShapeCatalog one({a, b, c});
  const ShapeCatalog two({c, b, a});
  CHECK(retrieve(stool(), kChair, one).model_id == "m-a");
  CHECK(retrieve(stool(), kChair, two).model_id == "m-a");
  CHECK(retrieve(tall_chair(), kChair, two).model_id == "m-c");
}

TEST_CASE("bounding-box mode is fooled by a solid block") {
  // Same bounding box as the query table but solid: perfect box IoU, poor voxel IoU.
  const ShapeCatalog cat({entry("block", kTable, {{{0.5, 0.5, 0.5}, {1, 1, 1}}}),
                          entry("table-thin", kTable, table(0.15, 0.12))});
  std::vector<Cuboid> query = table(0.125, 0.125);
  const auto by_voxels = retrieve(query, kTable, cat, RetrievalMode::cuboid);
  const auto by_box = retrieve(query, kTable, cat, RetrievalMode::bbox);
  CHECK(by_voxels.model_id == "table-thin");
  CHECK(by_box.model_id == "block");
  const auto qg = rasterize_cuboids(query, 32);
  CHECK(voxel_iou(qg, cat.entries()[0].grid) < voxel_iou(qg, cat.entries()[1].grid));
}

TEST_CASE("catalog invariants") {
  CHECK_THROWS_AS(ShapeCatalog({}), PreconditionError);
  CHECK_THROWS_AS(ShapeCatalog({entry("x", kChair, stool(), 16), entry("y", kChair, stool(), 32)}), ValidationError);
  CHECK_THROWS_AS(ShapeCatalog({entry("x", kChair, stool()), entry("x", kChair, stool())}), ValidationError);
}

TEST_CASE("catalog save and load") {
  const auto dir = std::filesystem::temp_directory_path() / "cuboidkit_catalog_test";
  std::filesystem::remove_all(dir);
  const ShapeCatalog cat({entry("c-tall", kChair, tall_chair()), entry("t-1", kTable, table(0.1, 0.1))});
  cat.save(dir);
  const auto back = ShapeCatalog::load(dir);
  REQUIRE(back.entries().size() == 2);
  CHECK(back.resolution() == 32);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.entries()[i].model_id == cat.entries()[i].model_id);
    CHECK(back.entries()[i].class_label == cat.entries()[i].class_label);
    CHECK(back.entries()[i].grid == cat.entries()[i].grid);
    CHECK(back.entries()[i].cuboids == cat.entries()[i].cuboids);
  }
  std::ofstream(dir / "index.json") << R"([{"model_id": "x", "class": "chair"}])";
  CHECK_THROWS_AS(ShapeCatalog::load(dir), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("catalog from meshes") {
  const auto dir = std::filesystem::temp_directory_path() / "cuboidkit_meshes_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "table");
  std::filesystem::create_directories(dir / "chair");
  {
    std::ofstream out(dir / "table" / "t1.obj");
    write_obj(out, synthetic::boxes_mesh({{{0, 0.9, 0}, {1, 1, 1}},
                                          {{0, 0, 0}, {0.1, 0.9, 0.1}},
                                          {{0.9, 0, 0}, {1, 0.9, 0.1}},
                                          {{0, 0, 0.9}, {0.1, 0.9, 1}},
                                          {{0.9, 0, 0.9}, {1, 0.9, 1}}}));
    std::ofstream out2(dir / "chair" / "c1.obj");
    write_obj(out2, synthetic::box_mesh({0, 0, 0}, {0.5, 1, 0.5}));
  }
  const auto cat = build_catalog(dir, 32, MergeConfig::defaults_for(32));
  REQUIRE(cat.entries().size() == 2);
  for (const auto& e : cat.entries()) {
    CHECK(e.grid == rasterize_cuboids(e.cuboids, 32));
    CHECK(retrieve(e.cuboids, e.class_label, cat).iou == 1.0);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("retrieve_scene fills model ids") {
  const ShapeCatalog cat({entry("c-tall", kChair, tall_chair()), entry("c-stool", kChair, stool())});
  Scene s = synthetic::two_cube_scene(3.0);
  for (auto& o : s.objects) {
    o.class_label = kChair;
    o.cuboids = stool();
  }
  retrieve_scene(s, cat);
  for (const auto& o : s.objects) CHECK(o.model_id == "c-stool");
}
