#pragma once

#include <filesystem>

#include "mapvec/match.hpp"
#include "mapvec/metrics.hpp"
#include "mapvec/perturb.hpp"
#include "mapvec/postprocess.hpp"
#include "mapvec/raster.hpp"
#include "mapvec/trace.hpp"
#include "mapvec/types.hpp"

namespace mapvec {

inline constexpr const char* kSceneSchemaVersion = "mapvec-scene/1";
inline constexpr const char* kMaskIndexSchemaVersion = "mapvec-masks/1";
inline constexpr const char* kEvalSchemaVersion = "mapvec-eval/1";

// Full pipeline configuration; every field carries its documented default
// so a partial (or absent) config file still materializes completely.
struct RunConfig {
  GridSpec grid;
  int divider_width_px = 1;
  DilationSpec label_dilation;
  TraceConfig trace;
  PostprocessConfig postprocess;
  CostWeights match_weights;
  DilationSpec match_dilation{2, DilationSpec::Kernel::Square};
  EvalConfig eval;
  PerturbSpec perturb;
};

enum class Difficulty { Easy, Medium, Hard };
Difficulty difficulty_from_string(const std::string& s);

Scene load_scene(const std::filesystem::path& path, bool strict = false,
                 Warnings* warnings = nullptr);
void save_scene(const Scene& scene, const std::filesystem::path& path);
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text, bool strict = false, Warnings* warnings = nullptr);

RunConfig load_config(const std::filesystem::path& path, bool strict = false);
RunConfig config_from_json(const std::string& text, bool strict = false);

// Binary PGM (P5), 0/255 for binary masks, 255*v for probabilities.
void save_pgm(const Bitmap& bitmap, const std::filesystem::path& path);
Bitmap load_pgm(const std::filesystem::path& path);
// 8-bit grayscale PNG via zlib.
void save_png(const Bitmap& bitmap, const std::filesystem::path& path);

// Mask directory = index JSON + one image file per mask.
void save_mask_dir(const std::vector<InstanceMask>& masks, const GridSpec& grid,
                   const std::filesystem::path& dir, bool also_png = false);
std::pair<std::vector<InstanceMask>, GridSpec> load_mask_dir(const std::filesystem::path& dir);

// One path per instance; classes keyed by stroke colour (divider blue,
// ped cross green, curb red).
std::string scene_to_svg(const Scene& scene);
void save_svg(const Scene& scene, const std::filesystem::path& path);

std::string report_to_json(const EvalReport& report, const EvalConfig& cfg);
std::string assignment_to_json(const CostMatrix& costs, const Assignment& assignment);

// Deterministic synthetic scenes: curved dividers, rectangular ped
// crossings, and full-height boundary curbs with the ego in a drivable
// domain.
std::vector<Scene> gen_synthetic(uint64_t seed, int n_scenes, Difficulty difficulty,
                                 const GridSpec& grid = {});

// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace mapvec
