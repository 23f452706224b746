#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "cuboidkit/abstraction.hpp"
#include "cuboidkit/curation.hpp"
#include "cuboidkit/errors.hpp"
#include "cuboidkit/mesh_io.hpp"
#include "cuboidkit/metrics.hpp"
#include "cuboidkit/render.hpp"
#include "cuboidkit/retrieval.hpp"
#include "cuboidkit/sampling.hpp"
#include "cuboidkit/scene_io.hpp"
#include "cuboidkit/voxel_grid.hpp"
#include "cuboidkit/voxelizer.hpp"

namespace cuboidkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const ClassVocabulary& Globals::vocab() {
  if (vocab_path.empty()) return ClassVocabulary::front_default();
  if (!loaded) loaded = ClassVocabulary::load(vocab_path);
  return *loaded;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void check_resolution(int n) {
  if (n < 2) throw PreconditionError("voxel resolution must be >= 2, got " + std::to_string(n));
}

std::vector<Scene> load_scene_dir(const fs::path& dir, const ClassVocabulary& vocab) {
  std::vector<Scene> scenes;
  for (const auto& f : list_json_files(dir)) {
    try {
      scenes.push_back(load_scene(f, vocab));
    } catch (const Error& e) {
      throw Error(f.filename().string() + ": " + e.what());
    }
  }
  if (scenes.empty()) throw Error("no scene files in " + dir.string());
  return scenes;
}

// Mesh (.obj) or voxel grid (.cvox) input.
VoxelGrid load_grid(const fs::path& in, int n, bool fill) {
  if (in.extension() == ".cvox") return load_cvox(in);
  check_resolution(n);
  const auto normalized = normalize(load_obj(in));
  auto grid = voxelize_surface(normalized.mesh, n);
  return fill ? fill_interior(grid) : grid;
}

struct MergeOptions {
  double tau_min = 1.0;
  double tau_max = 1.5;
  std::optional<double> scale_s;
  bool use_static = false;
  double tau_static = 1.2;
  int k = 8;

  MergeConfig resolve(int n) const {
    MergeConfig c = MergeConfig::defaults_for(n);
    c.tau_min = tau_min;
    c.tau_max = tau_max;
    if (scale_s) c.scale_s = *scale_s;
    c.use_dynamic = !use_static;
    c.tau_static = tau_static;
    c.max_segments_k = k;
    c.validate();
    return c;
  }
};

void add_merge_options(CLI::App* sub, MergeOptions& m) {
  sub->add_option("--tau-min", m.tau_min, "Lower bound of the dynamic merge threshold")->capture_default_str();
  sub->add_option("--tau-max", m.tau_max, "Upper bound of the dynamic merge threshold")->capture_default_str();
  sub->add_option("--scale-s", m.scale_s, "Decay volume S in voxels [default: (n/4)^3]");
  sub->add_flag("--static", m.use_static, "Use the fixed threshold --tau-static");
  sub->add_option("--tau-static", m.tau_static, "Fixed merge threshold")->capture_default_str();
  sub->add_option("--k", m.k, "Maximum number of segmentation rectangles")->capture_default_str();
}

Command voxelize_command(CLI::App& app) {
  struct Opts {
    std::string in, out;
    int n = kDefaultResolution;
    bool no_fill = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("voxelize", "Voxelize an OBJ mesh into a CVOX grid");
  sub->add_option("--in", o->in, "Input OBJ mesh")->required();
  sub->add_option("--out", o->out, "Output CVOX file")->required();
  sub->add_option("--n", o->n, "Grid resolution")->capture_default_str();
  sub->add_flag("--no-fill", o->no_fill, "Keep the surface shell only");
  return {sub, [o] {
            check_resolution(o->n);
            const auto normalized = normalize(load_obj(o->in));
            auto grid = voxelize_surface(normalized.mesh, o->n);
            if (!o->no_fill) grid = fill_interior(grid);
            save_cvox(o->out, grid);
            std::cout << occupancy_count(grid) << " of " << grid.size() << " voxels set\n";
            return 0;
          }};
}

Command abstract_command(CLI::App& app) {
  struct Opts {
    std::string in, out;
    int n = kDefaultResolution;
    MergeOptions merge;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("abstract", "Abstract a mesh or voxel grid into cuboids");
  sub->add_option("--in", o->in, "Input OBJ mesh or CVOX grid")->required();
  sub->add_option("--out", o->out, "Output cuboid JSON")->required();
  sub->add_option("--n", o->n, "Grid resolution for mesh input")->capture_default_str();
  add_merge_options(sub, o->merge);
  return {sub, [o] {
            const auto grid = load_grid(o->in, o->n, true);
            const auto cuboids = abstract_shape(grid, o->merge.resolve(grid.n()));
            write_text(o->out, cuboids_to_json(cuboids).dump(2) + "\n");
            std::cout << cuboids.size() << " cuboids\n";
            return 0;
          }};
}

Command curate_command(CLI::App& app, Globals& g) {
  struct Opts {
    std::string in, out, summary;
    CurationConfig config;
    double threshold = kDefaultNiThreshold;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("curate", "Move objects apart until their cuboids stop intersecting");
  sub->add_option("--in", o->in, "Directory of scene JSON files")->required();
  sub->add_option("--out", o->out, "Directory for curated scenes")->required();
  sub->add_option("--eta", o->config.eta, "Step size")->capture_default_str();
  sub->add_option("--clip", o->config.clip_norm, "Per-object gradient norm cap")->capture_default_str();
  sub->add_option("--max-iters", o->config.max_iters, "Iteration cap")->capture_default_str();
  sub->add_option("--epsilon", o->config.epsilon_stop, "Stop once total overlap is at most this")
      ->capture_default_str();
  sub->add_option("--fd-step", o->config.fd_step, "Finite-difference step in meters")->capture_default_str();
  sub->add_option("--threshold", o->threshold, "NIRate threshold on the scaled CIoU")->capture_default_str();
  sub->add_option("--summary", o->summary, "Summary JSON [default: <out>.summary.json]");
  return {sub, [o, &g] {
            o->config.validate();
            const auto files = list_json_files(o->in);
            const auto result = curate_files(files, o->config, o->threshold, g.vocab());
            fs::create_directories(o->out);
            for (std::size_t i = 0; i < result.scenes.size(); ++i) {
              save_scene(fs::path(o->out) / result.names[i], result.scenes[i], g.vocab());
            }
            fs::path summary = o->summary;
            if (summary.empty()) {
              fs::path out = fs::path(o->out).lexically_normal();
              if (!out.has_filename()) out = out.parent_path();
              summary = out.string() + ".summary.json";
            }
            write_text(summary, result.summary.to_json().dump(2) + "\n");
            const auto& s = result.summary;
            std::cout << "curated " << s.n_scenes << " scenes (" << s.n_errors << " errors), NIRate "
                      << s.nirate_before << " -> " << s.nirate_after << "\n";
            return 0;
          }};
}

Command metrics_command(CLI::App& app, Globals& g) {
  struct Opts {
    std::string scenes, report, reference;
    double threshold = kDefaultNiThreshold;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("metrics", "CIoU, NIRate and CKL of a scene directory");
  sub->add_option("--scenes", o->scenes, "Directory of scene JSON files")->required();
  sub->add_option("--report", o->report, "Output report JSON");
  sub->add_option("--reference", o->reference, "Reference scenes for CKL");
  sub->add_option("--threshold", o->threshold, "NIRate threshold on the scaled CIoU")->capture_default_str();
  return {sub, [o, &g] {
            const auto scenes = load_scene_dir(o->scenes, g.vocab());
            std::vector<Scene> reference;
            if (!o->reference.empty()) reference = load_scene_dir(o->reference, g.vocab());
            const auto report = evaluate(scenes, o->threshold, reference, g.vocab());
            const std::string text = report.to_json().dump(2) + "\n";
            if (!o->report.empty()) write_text(o->report, text);
            std::cout << text;
            return 0;
          }};
}

Command retrieve_command(CLI::App& app, Globals& g) {
  struct Opts {
    std::string scene, catalog, out;
    RetrievalMode mode = RetrievalMode::cuboid;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("retrieve", "Fill model_id fields from a shape catalog");
  sub->add_option("--scene", o->scene, "Scene JSON, rewritten in place")->required();
  sub->add_option("--catalog", o->catalog, "Catalog directory")->required();
  sub->add_option("--out", o->out, "Write here instead of rewriting --scene");
  sub->add_option("--mode", o->mode, "Matching mode")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, RetrievalMode>{{"cuboid", RetrievalMode::cuboid}, {"bbox", RetrievalMode::bbox}}));
  return {sub, [o, &g] {
            auto scene = load_scene(o->scene, g.vocab());
            const auto catalog = ShapeCatalog::load(o->catalog, g.vocab());
            retrieve_scene(scene, catalog, o->mode);
            save_scene(o->out.empty() ? o->scene : o->out, scene, g.vocab());
            for (const auto& obj : scene.objects) std::cout << obj.id << " -> " << *obj.model_id << "\n";
            return 0;
          }};
}

Command build_catalog_command(CLI::App& app, Globals& g) {
  struct Opts {
    std::string meshes, out;
    int n = kDefaultResolution;
    MergeOptions merge;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("build-catalog", "Build a shape catalog from <dir>/<class>/<model_id>.obj");
  sub->add_option("--meshes", o->meshes, "Mesh directory")->required();
  sub->add_option("--out", o->out, "Catalog directory")->required();
  sub->add_option("--n", o->n, "Grid resolution")->capture_default_str();
  add_merge_options(sub, o->merge);
  return {sub, [o, &g] {
            check_resolution(o->n);
            const auto catalog = build_catalog(o->meshes, o->n, o->merge.resolve(o->n), g.vocab());
            catalog.save(o->out, g.vocab());
            std::cout << catalog.entries().size() << " catalog entries\n";
            return 0;
          }};
}

Command fit_command(CLI::App& app, Globals& g) {
  struct Opts {
    std::string scenes, out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("fit", "Fit the baseline scene sampler");
  sub->add_option("--scenes", o->scenes, "Directory of scene JSON files")->required();
  sub->add_option("--out", o->out, "Output model JSON")->required();
  return {sub, [o, &g] {
            const auto scenes = load_scene_dir(o->scenes, g.vocab());
            BaselineSampler::fit(scenes).save(o->out, g.vocab());
            std::cout << "fitted on " << scenes.size() << " scenes\n";
            return 0;
          }};
}

Command sample_command(CLI::App& app, Globals& g) {
  struct Opts {
    std::string model, floors, out;
    RejectionConfig config;
    bool all_pairs = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("sample", "Rejection-sampling refinement of a fitted sampler");
  sub->add_option("--model", o->model, "Model JSON from `fit`")->required();
  sub->add_option("--floors", o->floors, "Directory of scene JSON files supplying floors")->required();
  sub->add_option("--out", o->out, "Output directory")->required();
  sub->add_option("--k", o->config.k_candidates, "Candidates per round")->capture_default_str();
  sub->add_option("--threshold", o->config.t_threshold, "Maximum average cuboid IoU")->capture_default_str();
  sub->add_option("--rounds", o->config.rounds, "Number of rounds")->capture_default_str();
  sub->add_option("--min-accepted", o->config.min_accepted, "Abort below this many acceptances [default: k/10]");
  sub->add_flag("--all-pairs", o->all_pairs, "Average IoU over every cross-object pair");
  return {sub, [o, &g] {
            if (o->all_pairs) o->config.average_mode = AverageMode::all_pairs;
            o->config.validate();
            const auto model = BaselineSampler::load(o->model, g.vocab());
            std::vector<FloorSpec> floors;
            for (const auto& f : list_json_files(o->floors)) floors.push_back(load_floor(f));
            if (floors.empty()) throw Error("no floor files in " + o->floors);

            const auto outcome = rejection_loop(model, floors, o->config, g.seed);
            const fs::path out = o->out;
            std::string lines;
            for (const auto& r : outcome.rounds) lines += r.to_json().dump() + "\n";
            write_text(out / "rounds.jsonl", lines);
            const auto& final_model = dynamic_cast<const BaselineSampler&>(*outcome.model);
            final_model.save(out / "model.json", g.vocab());
            for (std::size_t r = 0; r < outcome.accepted.size(); ++r) {
              const fs::path dir = out / ("round_" + std::to_string(r + 1));
              fs::create_directories(dir);
              for (std::size_t i = 0; i < outcome.accepted[r].size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "scene_%05zu.json", i);
                save_scene(dir / name, outcome.accepted[r][i], g.vocab());
              }
            }
            std::cout << lines;
            if (outcome.shortfall) {
              const auto& last = outcome.rounds.back();
              throw SamplingError("round " + std::to_string(last.round) + " accepted " +
                                  std::to_string(last.accepted) + " scenes, fewer than the required " +
                                  std::to_string(o->config.effective_min_accepted()));
            }
            return 0;
          }};
}

Command render_command(CLI::App& app, Globals& g) {
  struct Opts {
    std::string scene, out, raster;
    RenderSpec spec;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("render", "Top-down SVG of a scene");
  sub->add_option("--scene", o->scene, "Scene JSON")->required();
  sub->add_option("--out", o->out, "Output SVG")->required();
  sub->add_option("--width", o->spec.width, "Image width in pixels")->capture_default_str();
  sub->add_option("--height", o->spec.height, "Image height in pixels")->capture_default_str();
  sub->add_option("--raster", o->raster, "Also write a binary PPM");
  return {sub, [o, &g] {
            const auto scene = load_scene(o->scene, g.vocab());
            write_text(o->out, render_topdown_svg(scene, o->spec, g.vocab()));
            if (!o->raster.empty()) {
              std::ostringstream ppm;
              render_topdown_raster(scene, o->spec).write_ppm(ppm);
              write_text(o->raster, ppm.str());
            }
            return 0;
          }};
}

Command tokens_command(CLI::App& app, Globals& g) {
  struct Opts {
    std::string scene, out;
    bool permute = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("tokens", "Export the floor/entity/cuboid token sequence as JSON lines");
  sub->add_option("--scene", o->scene, "Scene JSON")->required();
  sub->add_option("--out", o->out, "Output JSON lines");
  sub->add_flag("--permute", o->permute, "Shuffle object order with --seed");
  return {sub, [o, &g] {
            const auto& vocab = g.vocab();
            const auto scene = load_scene(o->scene, vocab);
            const auto tokens = to_token_sequence(scene, o->permute ? std::optional(g.seed) : std::nullopt, vocab);
            std::string lines;
            for (const auto& t : tokens) {
              json j;
              if (t.kind == TokenKind::floor) {
                j["kind"] = "floor";
                json verts = json::array();
                for (const auto& v : t.floor_vertices) verts.push_back({v.x, v.z});
                j["vertices"] = std::move(verts);
              } else {
                j["kind"] = t.kind == TokenKind::entity ? "entity" : "cuboid";
                j["class"] = t.class_label == vocab.sep() ? "[SEP]" : vocab.name(t.class_label);
                j["translation"] = {t.translation.x, t.translation.y, t.translation.z};
                j["size"] = {t.size.x, t.size.y, t.size.z};
                j["sin_theta"] = t.sin_theta;
                j["cos_theta"] = t.cos_theta;
              }
              lines += j.dump() + "\n";
            }
            if (o->out.empty()) {
              std::cout << lines;
            } else {
              write_text(o->out, lines);
            }
            return 0;
          }};
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app, Globals& g) {
  return {voxelize_command(app),   abstract_command(app),       curate_command(app, g),
          metrics_command(app, g), retrieve_command(app, g),    build_catalog_command(app, g),
          fit_command(app, g),     sample_command(app, g),      render_command(app, g),
          tokens_command(app, g)};
}

}  // namespace cuboidkit::cli
