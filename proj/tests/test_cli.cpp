#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cuboidkit/abstraction.hpp"
#include "cuboidkit/curation.hpp"
#include "cuboidkit/mesh_io.hpp"
#include "cuboidkit/metrics.hpp"
#include "cuboidkit/render.hpp"
#include "cuboidkit/scene_io.hpp"
#include "cuboidkit/voxel_grid.hpp"
#include "cuboidkit/voxelizer.hpp"
#include "synthetic.hpp"

using namespace cuboidkit;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;  // stdout and stderr interleaved
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CUBOIDKIT_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cuboidkit_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

fs::path table_obj(const fs::path& dir) {
  const auto mesh = synthetic::boxes_mesh({{{0.0, 0.6, 0.0}, {1.0, 0.7, 0.8}},
                                          {{0.0, 0.0, 0.0}, {0.1, 0.6, 0.1}},
                                          {{0.9, 0.0, 0.0}, {1.0, 0.6, 0.1}},
                                          {{0.0, 0.0, 0.7}, {0.1, 0.6, 0.8}},
                                          {{0.9, 0.0, 0.7}, {1.0, 0.6, 0.8}}});
  const fs::path p = dir / "table.obj";
  std::ofstream out(p);
  write_obj(out, mesh);
  return p;
}

fs::path scene_dir(const fs::path& dir, std::size_t count) {
  const fs::path scenes = dir / "scenes";
  fs::create_directories(scenes);
  synthetic::DatasetOptions opt;
  opt.scenes = count;
  const auto data = synthetic::scene_dataset(opt);
  for (std::size_t i = 0; i < data.size(); ++i) save_scene(scenes / ("s" + std::to_string(10 + i) + ".json"), data[i]);
  return scenes;
}

}  // namespace

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  const auto obj = table_obj(dir);
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("voxelize --out x.cvox").code == 2);  // missing --in
  CHECK(run("voxelize --in " + obj.string() + " --out x.cvox --n abc").code == 2);
  CHECK(run("voxelize --in " + obj.string() + " --out x.cvox --bogus").code == 2);

  const auto bad_n = run("voxelize --in " + obj.string() + " --n 1 --out " + (dir / "a.cvox").string());
  CHECK(bad_n.code == 1);
  CHECK(bad_n.out.find("voxel resolution must be >= 2, got 1") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "a.cvox"));

  CHECK(run("voxelize --in " + (dir / "missing.obj").string() + " --out " + (dir / "b.cvox").string()).code == 1);

  write(dir / "broken.json", "{\"room_type\": \"bedroom\", \"floor\": ");
  fs::create_directories(dir / "bad");
  fs::copy_file(dir / "broken.json", dir / "bad" / "broken.json");
  CHECK(run("metrics --scenes " + (dir / "bad").string()).code == 1);
}

TEST_CASE("voxelize and abstract match the library") {
  const auto dir = scratch("adapter");
  const auto obj = table_obj(dir);
  REQUIRE(run("voxelize --in " + obj.string() + " --n 32 --out " + (dir / "t.cvox").string()).code == 0);
  const auto grid = fill_interior(voxelize_surface(normalize(load_obj(obj)).mesh, 32));
  save_cvox(dir / "ref.cvox", grid);
  CHECK(slurp(dir / "t.cvox") == slurp(dir / "ref.cvox"));

  REQUIRE(run("abstract --in " + (dir / "t.cvox").string() + " --out " + (dir / "t.json").string()).code == 0);
  const auto cuboids = abstract_shape(grid, MergeConfig::defaults_for(32));
  CHECK(slurp(dir / "t.json") == cuboids_to_json(cuboids).dump(2) + "\n");
}

TEST_CASE("config file values sit between flags and defaults") {
  const auto dir = scratch("config");
  const auto obj = table_obj(dir);
  const auto cfg = dir / "cfg.json";
  write(cfg, R"({"seed": 5, "voxelize": {"n": 8}})");
  const std::string base = "voxelize --in " + obj.string() + " --out " + (dir / "v.cvox").string();

  REQUIRE(run(base).code == 0);
  CHECK(load_cvox(dir / "v.cvox").n() == kDefaultResolution);
  REQUIRE(run("--config " + cfg.string() + " " + base).code == 0);
  CHECK(load_cvox(dir / "v.cvox").n() == 8);
  REQUIRE(run("--config " + cfg.string() + " " + base + " --n 12").code == 0);
  CHECK(load_cvox(dir / "v.cvox").n() == 12);

  write(cfg, "{not json");
  CHECK(run("--config " + cfg.string() + " " + base).code == 2);
}

TEST_CASE("metrics and curate match the library") {
  const auto dir = scratch("metrics");
  const auto scenes = scene_dir(dir, 10);
  std::vector<Scene> loaded;
  for (const auto& f : list_json_files(scenes)) loaded.push_back(load_scene(f));

  REQUIRE(run("metrics --scenes " + scenes.string() + " --report " + (dir / "r.json").string()).code == 0);
  CHECK(slurp(dir / "r.json") == evaluate(loaded).to_json().dump(2) + "\n");

  const auto out = dir / "curated";
  REQUIRE(run("curate --in " + scenes.string() + " --out " + out.string() + " --max-iters 50").code == 0);
  CHECK(fs::exists(dir / "curated.summary.json"));
  CurationConfig cfg;
  cfg.max_iters = 50;
  const auto files = list_json_files(scenes);
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto expect = avoid_intersections(loaded[i], cfg).scene;
    CHECK(slurp(out / files[i].filename()) == dump_scene(expect));
  }
}

TEST_CASE("render writes the library svg") {
  const auto dir = scratch("render");
  const auto scenes = scene_dir(dir, 1);
  const auto file = list_json_files(scenes).front();
  REQUIRE(run("render --scene " + file.string() + " --out " + (dir / "a.svg").string() + " --raster " +
              (dir / "a.ppm").string())
              .code == 0);
  CHECK(slurp(dir / "a.svg") == render_topdown_svg(load_scene(file), RenderSpec{}));
  CHECK(slurp(dir / "a.ppm").rfind("P6\n256 256\n255\n", 0) == 0);
}

TEST_CASE("fit and sample are seed-deterministic") {
  const auto dir = scratch("sample");
  const auto scenes = scene_dir(dir, 20);
  REQUIRE(run("fit --scenes " + scenes.string() + " --out " + (dir / "m.json").string()).code == 0);
  const std::string base = "sample --model " + (dir / "m.json").string() + " --floors " + scenes.string() +
                           " --k 40 --rounds 2 --threshold 0.01 --min-accepted 1";
  REQUIRE(run(base + " --seed 3 --out " + (dir / "a").string()).code == 0);
  REQUIRE(run(base + " --seed 3 --out " + (dir / "b").string()).code == 0);
  CHECK(slurp(dir / "a" / "rounds.jsonl") == slurp(dir / "b" / "rounds.jsonl"));
  CHECK(slurp(dir / "a" / "model.json") == slurp(dir / "b" / "model.json"));

  // Nothing can be accepted at min-accepted = k with a near-zero threshold
  // unless every candidate is intersection-free.
  const auto strict = run("sample --model " + (dir / "m.json").string() + " --floors " + scenes.string() +
                          " --k 40 --rounds 1 --threshold 1e-12 --min-accepted 40 --out " + (dir / "c").string());
  CHECK(strict.code == 1);
  CHECK(fs::exists(dir / "c" / "rounds.jsonl"));
}
