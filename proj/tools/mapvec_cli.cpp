#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <thread>

#include "mapvec/geometry.hpp"
#include "mapvec/io.hpp"

namespace fs = std::filesystem;
using mapvec::Errc;
using mapvec::Error;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

void print_error(const std::string& code, const std::string& message) {
  nlohmann::ordered_json err;
  err["error"] = {{"code", code}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ParseError:
    case Errc::SchemaViolation:
    case Errc::UnknownClass:
    case Errc::InvalidInstance:
    case Errc::IoError:
      return kExitUsage;
    default:
      return kExitInternal;
  }
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::ParseError: return "parse_error";
    case Errc::SchemaViolation: return "schema_violation";
    case Errc::UnknownClass: return "unknown_class";
    case Errc::InvalidInstance: return "invalid_instance";
    case Errc::GeometryError: return "geometry_error";
    case Errc::DimensionMismatch: return "dimension_mismatch";
    case Errc::AmbiguousEgo: return "ambiguous_ego";
    case Errc::IoError: return "io_error";
    case Errc::Internal: return "internal";
  }
  return "internal";
}

// Scene argument = one JSON file or a directory of *.json scenes.
std::vector<fs::path> scene_paths(const fs::path& arg) {
  std::vector<fs::path> out;
  if (fs::is_directory(arg)) {
    for (const auto& entry : fs::directory_iterator(arg)) {
      if (entry.path().extension() == ".json") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
  } else {
    out.push_back(arg);
  }
  if (out.empty()) throw Error(Errc::IoError, "no scene files in " + arg.string());
  return out;
}

void parallel_scenes(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(jobs, static_cast<int>(n));
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct GlobalOpts {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  bool strict = false;

  mapvec::RunConfig load() const {
    mapvec::RunConfig cfg;
    if (!config_path.empty()) cfg = mapvec::load_config(config_path, strict);
    if (seed_set) cfg.perturb.seed = seed;
    return cfg;
  }
};

nlohmann::ordered_json roundtrip_scene(const mapvec::Scene& scene, const mapvec::RunConfig& cfg,
                                       double* worst_cd) {
  const auto masks = mapvec::rasterize_scene(scene, cfg.divider_width_px, cfg.label_dilation);
  const auto outputs = mapvec::vectorize(masks, scene.grid, cfg.trace, cfg.postprocess);

  // Greedy per-class pairing by smallest CD for the per-instance report.
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (size_t i = 0; i < scene.gt_vectors.size(); ++i) {
    const auto& src = scene.gt_vectors[i];
    double best = -1.0;
    for (const auto& out : outputs) {
      if (out.cls != src.cls) continue;
      const double cd = mapvec::chamfer(src, out, cfg.eval);
      if (best < 0 || cd < best) best = cd;
    }
    rows.push_back({{"instance", i},
                    {"class", mapvec::to_string(src.cls)},
                    {"cd", best < 0 ? nlohmann::ordered_json() : nlohmann::ordered_json(best)}});
    if (best >= 0 && worst_cd) *worst_cd = std::max(*worst_cd, best);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raster/vector toolkit for HD-map elements"};
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--config", global.config_path, "Pipeline config JSON");
  app.add_option("--seed", global.seed, "Override the configured RNG seed")
      ->each([&](const std::string&) { global.seed_set = true; });
  app.add_option("--jobs", global.jobs, "Scene-level worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", global.strict, "Reject unknown config/scene fields");

  std::string scene_arg, preds_arg, gts_arg, out_arg, out_dir, difficulty = "easy";
  uint64_t gen_seed = 1;
  int gen_count = 1;
  bool also_png = false;
  std::vector<double> thresholds;

  auto* c_rast = app.add_subcommand("rasterize", "Scene JSON -> per-instance masks");
  c_rast->add_option("scene", scene_arg)->required();
  c_rast->add_option("--out-dir", out_dir)->required();
  c_rast->add_flag("--png", also_png, "Additionally write PNG images");

  auto* c_vect = app.add_subcommand("vectorize", "Mask directory -> scene JSON");
  c_vect->add_option("mask-dir", scene_arg)->required();
  c_vect->add_option("--out", out_arg)->required();

  auto* c_match = app.add_subcommand("match", "Cost matrix + assignment of two mask dirs");
  c_match->add_option("preds", preds_arg)->required();
  c_match->add_option("gts", gts_arg)->required();
  c_match->add_option("--out", out_arg);

  auto* c_eval = app.add_subcommand("eval", "Evaluate predicted scenes against ground truth");
  c_eval->add_option("preds", preds_arg)->required();
  c_eval->add_option("gts", gts_arg)->required();
  c_eval->add_option("--thresholds", thresholds, "CD thresholds in meters");
  c_eval->add_option("--out", out_arg);

  auto* c_round = app.add_subcommand("roundtrip", "rasterize -> vectorize -> CD report");
  c_round->add_option("scene", scene_arg)->required();
  c_round->add_option("--out", out_arg);

  auto* c_gen = app.add_subcommand("gen", "Generate synthetic scenes");
  c_gen->add_option("--seed", gen_seed);
  c_gen->add_option("--count", gen_count)->check(CLI::PositiveNumber);
  c_gen->add_option("--difficulty", difficulty)->check(CLI::IsMember({"easy", "medium", "hard"}));
  c_gen->add_option("--out-dir", out_dir)->required();

  auto* c_svg = app.add_subcommand("svg", "Scene JSON -> SVG visualization");
  c_svg->add_option("scene", scene_arg)->required();
  c_svg->add_option("--out", out_arg)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage", e.what());
    return kExitUsage;
  }

  try {
    const mapvec::RunConfig cfg = global.load();

    if (c_rast->parsed()) {
      const mapvec::Scene scene = mapvec::load_scene(scene_arg, global.strict);
      const auto masks = mapvec::rasterize_scene(scene, cfg.divider_width_px, cfg.label_dilation);
      mapvec::save_mask_dir(masks, scene.grid, out_dir, also_png);
    } else if (c_vect->parsed()) {
      const auto [masks, grid] = mapvec::load_mask_dir(scene_arg);
      const auto vectors = mapvec::vectorize(masks, grid, cfg.trace, cfg.postprocess);
      mapvec::Scene out;
      out.grid = grid;
      out.gt_vectors = vectors;
      mapvec::save_scene(out, out_arg);
    } else if (c_match->parsed()) {
      const auto [pred_masks, pgrid] = mapvec::load_mask_dir(preds_arg);
      const auto [gt_masks, ggrid] = mapvec::load_mask_dir(gts_arg);
      if (pgrid != ggrid) throw Error(Errc::DimensionMismatch, "mask dirs use different grids");
      std::vector<mapvec::Prediction> preds;
      for (const auto& m : pred_masks) {
        mapvec::Prediction p;
        p.mask = m;
        p.class_probs.setZero();
        p.class_probs[static_cast<int>(m.cls)] = 1.0;
        preds.push_back(std::move(p));
      }
      const auto costs = mapvec::cost_matrix(preds, gt_masks, cfg.match_weights, cfg.match_dilation);
      const auto assignment = mapvec::assign(costs);
      const std::string text = mapvec::assignment_to_json(costs, assignment);
      if (out_arg.empty()) {
        std::cout << text;
      } else {
        mapvec::write_file_atomic(out_arg, text);
      }
    } else if (c_eval->parsed()) {
      mapvec::EvalConfig eval_cfg = cfg.eval;
      if (!thresholds.empty()) {
        eval_cfg.cd_thresholds = thresholds;
        std::sort(eval_cfg.cd_thresholds.begin(), eval_cfg.cd_thresholds.end());
      }
      eval_cfg.validate();
      const auto pred_paths = scene_paths(preds_arg);
      const auto gt_paths = scene_paths(gts_arg);
      if (pred_paths.size() != gt_paths.size()) {
        throw Error(Errc::SchemaViolation, "pred and gt scene counts differ");
      }
      std::vector<mapvec::EvalScene> scenes(pred_paths.size());
      parallel_scenes(pred_paths.size(), global.jobs, [&](size_t i) {
        const mapvec::Scene pred = mapvec::load_scene(pred_paths[i], global.strict);
        const mapvec::Scene gt = mapvec::load_scene(gt_paths[i], global.strict);
        scenes[i].pred_vectors = pred.gt_vectors;
        scenes[i].gt_vectors = gt.gt_vectors;
        scenes[i].pred_masks = mapvec::rasterize_scene(pred, cfg.divider_width_px);
        scenes[i].gt_masks = mapvec::rasterize_scene(gt, cfg.divider_width_px);
      });
      const auto report = mapvec::evaluate(scenes, eval_cfg);
      const std::string text = mapvec::report_to_json(report, eval_cfg);
      if (out_arg.empty()) {
        std::cout << text;
      } else {
        mapvec::write_file_atomic(out_arg, text);
      }
    } else if (c_round->parsed()) {
      const auto paths = scene_paths(scene_arg);
      nlohmann::ordered_json doc;
      doc["scenes"] = nlohmann::ordered_json::array();
      std::vector<nlohmann::ordered_json> rows(paths.size());
      std::vector<double> worst(paths.size(), 0.0);
      parallel_scenes(paths.size(), global.jobs, [&](size_t i) {
        const mapvec::Scene scene = mapvec::load_scene(paths[i], global.strict);
        rows[i] = roundtrip_scene(scene, cfg, &worst[i]);
      });
      double worst_cd = 0.0;
      for (size_t i = 0; i < paths.size(); ++i) {
        doc["scenes"].push_back({{"file", paths[i].filename().string()}, {"instances", rows[i]}});
        worst_cd = std::max(worst_cd, worst[i]);
      }
      doc["worst_cd"] = worst_cd;
      const std::string text = doc.dump(2) + "\n";
      if (out_arg.empty()) {
        std::cout << text;
      } else {
        mapvec::write_file_atomic(out_arg, text);
      }
    } else if (c_gen->parsed()) {
      const auto scenes =
          mapvec::gen_synthetic(global.seed_set ? global.seed : gen_seed, gen_count,
                                mapvec::difficulty_from_string(difficulty), cfg.grid);
      fs::create_directories(out_dir);
      for (size_t i = 0; i < scenes.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%04zu.json", i);
        mapvec::save_scene(scenes[i], fs::path(out_dir) / name);
      }
    } else if (c_svg->parsed()) {
      const mapvec::Scene scene = mapvec::load_scene(scene_arg, global.strict);
      mapvec::save_svg(scene, out_arg);
    }
  } catch (const Error& e) {
    print_error(errc_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kExitInternal;
  }
  return 0;
}
