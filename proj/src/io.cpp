#include "mapvec/io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mapvec/geometry.hpp"
#include "mapvec/rng.hpp"

namespace mapvec {

using json = nlohmann::ordered_json;

namespace {

double round6(double v) {
  double r = std::round(v * 1e6) / 1e6;
  if (r == 0.0) r = 0.0;  // normalize -0
  return r;
}

void check_known_keys(const json& obj, std::initializer_list<const char*> known,
                      const std::string& where, bool strict, Warnings* warnings) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok |= key == k;
    if (!ok) {
      if (strict) throw Error(Errc::SchemaViolation, "unknown field '" + key + "' in " + where);
      warn(warnings, "ignoring unknown field '" + key + "' in " + where);
    }
  }
}

json grid_to_json(const GridSpec& g) {
  return json{{"x_min", round6(g.x_min)},
              {"x_max", round6(g.x_max)},
              {"y_min", round6(g.y_min)},
              {"y_max", round6(g.y_max)},
              {"resolution", round6(g.resolution)}};
}

GridSpec grid_from_json(const json& j, bool strict, Warnings* warnings) {
  if (!j.is_object()) throw Error(Errc::SchemaViolation, "grid must be an object");
  check_known_keys(j, {"x_min", "x_max", "y_min", "y_max", "resolution"}, "grid", strict, warnings);
  GridSpec g;
  g.x_min = j.value("x_min", g.x_min);
  g.x_max = j.value("x_max", g.x_max);
  g.y_min = j.value("y_min", g.y_min);
  g.y_max = j.value("y_max", g.y_max);
  g.resolution = j.value("resolution", g.resolution);
  g.validate();
  return g;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, what + ": " + e.what());
  }
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(Errc::IoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string scene_to_json(const Scene& scene) {
  json doc;
  doc["version"] = kSceneSchemaVersion;
  doc["grid"] = grid_to_json(scene.grid);
  doc["ego"] = {round6(scene.ego.x()), round6(scene.ego.y())};
  doc["instances"] = json::array();
  for (const auto& inst : scene.gt_vectors) {
    json points = json::array();
    for (const auto& p : inst.points) points.push_back({round6(p.x()), round6(p.y())});
    doc["instances"].push_back({{"class", to_string(inst.cls)},
                                {"points", std::move(points)},
                                {"closed", inst.closed},
                                {"confidence", round6(inst.confidence)}});
  }
  return doc.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text, bool strict, Warnings* warnings) {
  const json doc = parse_json(text, "scene");
  if (!doc.is_object()) throw Error(Errc::SchemaViolation, "scene must be a JSON object");
  check_known_keys(doc, {"version", "grid", "ego", "instances"}, "scene", strict, warnings);
  if (doc.contains("version") && doc["version"] != kSceneSchemaVersion) {
    warn(warnings, "scene version differs from " + std::string(kSceneSchemaVersion));
  }

  Scene scene;
  if (doc.contains("grid")) scene.grid = grid_from_json(doc["grid"], strict, warnings);
  if (doc.contains("ego")) {
    if (!doc["ego"].is_array() || doc["ego"].size() != 2) {
      throw Error(Errc::SchemaViolation, "ego must be [x, y]");
    }
    scene.ego = {doc["ego"][0].get<double>(), doc["ego"][1].get<double>()};
  }
  if (!doc.contains("instances") || !doc["instances"].is_array()) {
    throw Error(Errc::SchemaViolation, "scene needs an 'instances' array");
  }
  for (const auto& item : doc["instances"]) {
    check_known_keys(item, {"class", "points", "closed", "confidence"}, "instance", strict,
                     warnings);
    if (!item.contains("class") || !item.contains("points")) {
      throw Error(Errc::SchemaViolation, "instance needs 'class' and 'points'");
    }
    VectorInstance inst;
    inst.cls = map_class_from_string(item["class"].get<std::string>());
    inst.closed = item.value("closed", false);
    inst.confidence = item.value("confidence", 1.0);
    for (const auto& p : item["points"]) {
      if (!p.is_array() || p.size() != 2) {
        throw Error(Errc::SchemaViolation, "points must be [x, y] pairs");
      }
      inst.points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    auto clipped = clip_to_extent(inst, scene.grid, warnings);
    if (!clipped) continue;
    clipped->validate();
    scene.gt_vectors.push_back(std::move(*clipped));
  }
  return scene;
}

Scene load_scene(const std::filesystem::path& path, bool strict, Warnings* warnings) {
  return scene_from_json(read_file(path), strict, warnings);
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  write_file_atomic(path, scene_to_json(scene));
}

namespace {

DilationSpec dilation_from_json(const json& j, const std::string& where, bool strict,
                                Warnings* warnings) {
  check_known_keys(j, {"radius", "kernel"}, where, strict, warnings);
  DilationSpec d;
  d.radius = j.value("radius", d.radius);
  if (d.radius < 0) throw Error(Errc::SchemaViolation, where + ": radius must be >= 0");
  const std::string kernel = j.value("kernel", std::string("square"));
  if (kernel == "square") {
    d.kernel_shape = DilationSpec::Kernel::Square;
  } else if (kernel == "disk") {
    d.kernel_shape = DilationSpec::Kernel::Disk;
  } else {
    throw Error(Errc::SchemaViolation, where + ": kernel must be 'square' or 'disk'");
  }
  return d;
}

}  // namespace

RunConfig config_from_json(const std::string& text, bool strict) {
  const json doc = parse_json(text, "config");
  if (!doc.is_object()) throw Error(Errc::SchemaViolation, "config must be a JSON object");
  check_known_keys(doc, {"grid", "raster", "trace", "postprocess", "matcher", "eval", "perturb"},
                   "config", strict, nullptr);
  RunConfig cfg;
  if (doc.contains("grid")) cfg.grid = grid_from_json(doc["grid"], strict, nullptr);
  if (doc.contains("raster")) {
    const auto& r = doc["raster"];
    check_known_keys(r, {"divider_width_px", "label_dilation"}, "raster", strict, nullptr);
    cfg.divider_width_px = r.value("divider_width_px", cfg.divider_width_px);
    if (cfg.divider_width_px < 1) {
      throw Error(Errc::SchemaViolation, "divider_width_px must be >= 1");
    }
    if (r.contains("label_dilation")) {
      cfg.label_dilation = dilation_from_json(r["label_dilation"], "label_dilation", strict, nullptr);
    }
  }
  if (doc.contains("trace")) {
    const auto& t = doc["trace"];
    check_known_keys(t, {"turn_policy", "turd_size", "smooth", "corner_threshold"}, "trace", strict,
                     nullptr);
    const std::string policy = t.value("turn_policy", std::string("minority"));
    if (policy == "minority") {
      cfg.trace.turn_policy = TraceConfig::TurnPolicy::Minority;
    } else if (policy == "majority") {
      cfg.trace.turn_policy = TraceConfig::TurnPolicy::Majority;
    } else if (policy == "left") {
      cfg.trace.turn_policy = TraceConfig::TurnPolicy::Left;
    } else if (policy == "right") {
      cfg.trace.turn_policy = TraceConfig::TurnPolicy::Right;
    } else {
      throw Error(Errc::SchemaViolation, "unknown turn_policy '" + policy + "'");
    }
    cfg.trace.turd_size = t.value("turd_size", cfg.trace.turd_size);
    if (cfg.trace.turd_size < 0) throw Error(Errc::SchemaViolation, "turd_size must be >= 0");
    cfg.trace.smooth = t.value("smooth", cfg.trace.smooth);
    cfg.trace.corner_threshold = t.value("corner_threshold", cfg.trace.corner_threshold);
  }
  if (doc.contains("postprocess")) {
    const auto& p = doc["postprocess"];
    check_known_keys(
        p, {"confidence_threshold", "edge_margin_px", "centerline_samples", "simplify_eps_px"},
        "postprocess", strict, nullptr);
    cfg.postprocess.confidence_threshold =
        p.value("confidence_threshold", cfg.postprocess.confidence_threshold);
    cfg.postprocess.edge_margin_px = p.value("edge_margin_px", cfg.postprocess.edge_margin_px);
    cfg.postprocess.centerline_samples =
        p.value("centerline_samples", cfg.postprocess.centerline_samples);
    cfg.postprocess.simplify_eps_px = p.value("simplify_eps_px", cfg.postprocess.simplify_eps_px);
    if (cfg.postprocess.confidence_threshold < 0.0 || cfg.postprocess.confidence_threshold > 1.0 ||
        cfg.postprocess.edge_margin_px < 0 || cfg.postprocess.centerline_samples < 2) {
      throw Error(Errc::SchemaViolation, "postprocess config out of range");
    }
  }
  if (doc.contains("matcher")) {
    const auto& m = doc["matcher"];
    check_known_keys(m, {"w_cls", "w_ce", "w_dice", "dilation"}, "matcher", strict, nullptr);
    cfg.match_weights.w_cls = m.value("w_cls", cfg.match_weights.w_cls);
    cfg.match_weights.w_ce = m.value("w_ce", cfg.match_weights.w_ce);
    cfg.match_weights.w_dice = m.value("w_dice", cfg.match_weights.w_dice);
    if (cfg.match_weights.w_cls < 0 || cfg.match_weights.w_ce < 0 || cfg.match_weights.w_dice < 0 ||
        (cfg.match_weights.w_cls == 0 && cfg.match_weights.w_ce == 0 &&
         cfg.match_weights.w_dice == 0)) {
      throw Error(Errc::SchemaViolation, "matcher weights must be nonnegative, not all zero");
    }
    if (m.contains("dilation")) {
      cfg.match_dilation = dilation_from_json(m["dilation"], "matcher.dilation", strict, nullptr);
    }
  }
  if (doc.contains("eval")) {
    const auto& e = doc["eval"];
    check_known_keys(e, {"cd_thresholds", "sample_interval"}, "eval", strict, nullptr);
    if (e.contains("cd_thresholds")) {
      cfg.eval.cd_thresholds = e["cd_thresholds"].get<std::vector<double>>();
    }
    cfg.eval.sample_interval = e.value("sample_interval", cfg.eval.sample_interval);
    cfg.eval.validate();
  }
  if (doc.contains("perturb")) {
    const auto& p = doc["perturb"];
    check_known_keys(p,
                     {"seed", "point_noise_sigma", "drop_prob", "spurious_rate", "blur_radius",
                      "confidence_model"},
                     "perturb", strict, nullptr);
    cfg.perturb.seed = p.value("seed", cfg.perturb.seed);
    cfg.perturb.point_noise_sigma = p.value("point_noise_sigma", cfg.perturb.point_noise_sigma);
    cfg.perturb.drop_prob = p.value("drop_prob", cfg.perturb.drop_prob);
    cfg.perturb.spurious_rate = p.value("spurious_rate", cfg.perturb.spurious_rate);
    cfg.perturb.blur_radius = p.value("blur_radius", cfg.perturb.blur_radius);
    const std::string model = p.value("confidence_model", std::string("oracle"));
    if (model == "oracle") {
      cfg.perturb.confidence_model = PerturbSpec::ConfidenceModel::Oracle;
    } else if (model == "noisy_logit") {
      cfg.perturb.confidence_model = PerturbSpec::ConfidenceModel::NoisyLogit;
    } else {
      throw Error(Errc::SchemaViolation, "unknown confidence_model '" + model + "'");
    }
    cfg.perturb.validate();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, bool strict) {
  return config_from_json(read_file(path), strict);
}

void save_pgm(const Bitmap& bitmap, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "P5\n" << bitmap.cols() << " " << bitmap.rows() << "\n255\n";
  std::string body;
  body.reserve(static_cast<size_t>(bitmap.size()));
  for (Eigen::Index r = 0; r < bitmap.rows(); ++r) {
    for (Eigen::Index c = 0; c < bitmap.cols(); ++c) {
      const float v = std::clamp(bitmap(r, c), 0.0f, 1.0f);
      body.push_back(static_cast<char>(std::lround(v * 255.0f)));
    }
  }
  write_file_atomic(path, out.str() + body);
}

Bitmap load_pgm(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::istringstream in(data);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw Error(Errc::ParseError, "not an 8-bit binary PGM: " + path.string());
  }
  in.get();  // single whitespace after maxval
  const size_t offset = static_cast<size_t>(in.tellg());
  if (data.size() < offset + static_cast<size_t>(w) * h) {
    throw Error(Errc::ParseError, "truncated PGM: " + path.string());
  }
  Bitmap out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto byte = static_cast<unsigned char>(data[offset + static_cast<size_t>(r) * w + c]);
      out(r, c) = static_cast<float>(byte) / static_cast<float>(maxval);
    }
  }
  return out;
}

namespace {

void append_be32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>((v >> 24) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>(v & 0xff));
}

void append_chunk(std::string& s, const char type[4], const std::string& payload) {
  append_be32(s, static_cast<uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  s += body;
  const auto crc =
      crc32(0, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  append_be32(s, static_cast<uint32_t>(crc));
}

}  // namespace

void save_png(const Bitmap& bitmap, const std::filesystem::path& path) {
  const int w = static_cast<int>(bitmap.cols());
  const int h = static_cast<int>(bitmap.rows());
  std::string raw;
  raw.reserve(static_cast<size_t>(h) * (w + 1));
  for (int r = 0; r < h; ++r) {
    raw.push_back('\0');  // filter type 0 per scanline
    for (int c = 0; c < w; ++c) {
      const float v = std::clamp(bitmap(r, c), 0.0f, 1.0f);
      raw.push_back(static_cast<char>(std::lround(v * 255.0f)));
    }
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                6) != Z_OK) {
    throw Error(Errc::Internal, "zlib compression failed");
  }
  compressed.resize(bound);

  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  append_be32(ihdr, static_cast<uint32_t>(w));
  append_be32(ihdr, static_cast<uint32_t>(h));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(0);   // grayscale
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // no interlace
  append_chunk(png, "IHDR", ihdr);
  append_chunk(png, "IDAT", compressed);
  append_chunk(png, "IEND", "");
  write_file_atomic(path, png);
}

void save_mask_dir(const std::vector<InstanceMask>& masks, const GridSpec& grid,
                   const std::filesystem::path& dir, bool also_png) {
  std::filesystem::create_directories(dir);
  json index;
  index["version"] = kMaskIndexSchemaVersion;
  index["grid"] = grid_to_json(grid);
  index["masks"] = json::array();
  for (size_t i = 0; i < masks.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "mask_%03zu_%s.pgm", i, to_string(masks[i].cls));
    save_pgm(masks[i].bitmap, dir / name);
    if (also_png) {
      std::string png_name(name);
      png_name.replace(png_name.size() - 3, 3, "png");
      save_png(masks[i].bitmap, dir / png_name);
    }
    index["masks"].push_back({{"file", name},
                              {"class", to_string(masks[i].cls)},
                              {"confidence", round6(masks[i].confidence)}});
  }
  write_file_atomic(dir / "index.json", index.dump(2) + "\n");
}

std::pair<std::vector<InstanceMask>, GridSpec> load_mask_dir(const std::filesystem::path& dir) {
  const json index = parse_json(read_file(dir / "index.json"), "mask index");
  if (!index.is_object() || !index.contains("masks") || !index.contains("grid")) {
    throw Error(Errc::SchemaViolation, "mask index needs 'grid' and 'masks'");
  }
  const GridSpec grid = grid_from_json(index["grid"], false, nullptr);
  std::vector<InstanceMask> masks;
  for (const auto& item : index["masks"]) {
    InstanceMask m;
    m.cls = map_class_from_string(item.at("class").get<std::string>());
    m.confidence = item.value("confidence", 1.0);
    m.bitmap = load_pgm(dir / item.at("file").get<std::string>());
    if (m.height() != grid.height() || m.width() != grid.width()) {
      throw Error(Errc::DimensionMismatch, "mask dimensions do not match the index grid");
    }
    masks.push_back(std::move(m));
  }
  return {std::move(masks), grid};
}

namespace {

const char* svg_color(MapClass cls) {
  switch (cls) {
    case MapClass::Divider: return "#1f5bd8";
    case MapClass::PedCross: return "#2ca02c";
    case MapClass::Curb: return "#d62728";
  }
  return "#000000";
}

}  // namespace

std::string scene_to_svg(const Scene& scene) {
  const GridSpec& g = scene.grid;
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  const double w = g.x_max - g.x_min, h = g.y_max - g.y_min;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << g.x_min << " " << -g.y_max
      << " " << w << " " << h << "\" width=\"" << w * 20 << "\" height=\"" << h * 20 << "\">\n";
  out << "  <rect x=\"" << g.x_min << "\" y=\"" << -g.y_max << "\" width=\"" << w << "\" height=\""
      << h << "\" fill=\"white\" stroke=\"#999999\" stroke-width=\"0.1\"/>\n";
  for (const auto& inst : scene.gt_vectors) {
    out << "  <path d=\"";
    for (size_t i = 0; i < inst.points.size(); ++i) {
      out << (i == 0 ? "M " : "L ") << inst.points[i].x() << " " << -inst.points[i].y() << " ";
    }
    if (inst.closed) out << "Z";
    out << "\" fill=\"none\" stroke=\"" << svg_color(inst.cls) << "\" stroke-width=\"0.15\"/>\n";
  }
  out << "  <circle cx=\"" << scene.ego.x() << "\" cy=\"" << -scene.ego.y()
      << "\" r=\"0.5\" fill=\"#444444\"/>\n";
  out << "</svg>\n";
  return out.str();
}

void save_svg(const Scene& scene, const std::filesystem::path& path) {
  write_file_atomic(path, scene_to_svg(scene));
}

std::string report_to_json(const EvalReport& report, const EvalConfig& cfg) {
  json doc;
  doc["version"] = kEvalSchemaVersion;
  doc["cd_thresholds"] = json::array();
  for (double t : cfg.cd_thresholds) doc["cd_thresholds"].push_back(round6(t));
  doc["classes"] = json::object();
  for (const auto& [cls, cr] : report.classes) {
    json c;
    c["iou"] = round6(cr.iou);
    c["ap_per_threshold"] = json::object();
    for (const auto& [thr, ap] : cr.ap_per_threshold) {
      char key[32];
      std::snprintf(key, sizeof(key), "%.2f", thr);
      c["ap_per_threshold"][key] = round6(ap);
    }
    c["ap"] = round6(cr.ap);
    c["num_gts"] = cr.num_gts;
    c["num_preds"] = cr.num_preds;
    doc["classes"][to_string(cls)] = std::move(c);
  }
  doc["map"] = round6(report.map);
  doc["matches"] = json::array();
  for (const auto& m : report.matches) {
    doc["matches"].push_back({{"scene", m.scene},
                              {"class", to_string(m.cls)},
                              {"pred", m.pred},
                              {"gt", m.gt},
                              {"cd", m.cd < 0 ? json() : json(round6(m.cd))},
                              {"confidence", round6(m.confidence)}});
  }
  return doc.dump(2) + "\n";
}

std::string assignment_to_json(const CostMatrix& costs, const Assignment& assignment) {
  json doc;
  doc["cost_matrix"] = json::array();
  for (Eigen::Index r = 0; r < costs.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < costs.cols(); ++c) row.push_back(round6(costs(r, c)));
    doc["cost_matrix"].push_back(std::move(row));
  }
  doc["pairs"] = json::array();
  double total = 0.0;
  for (const auto& [p, g] : assignment.pairs) {
    doc["pairs"].push_back({p, g});
    total += costs(p, g);
  }
  doc["unmatched_preds"] = assignment.unmatched_preds;
  doc["unmatched_gts"] = assignment.unmatched_gts;
  doc["total_cost"] = round6(total);
  return doc.dump(2) + "\n";
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "easy") return Difficulty::Easy;
  if (s == "medium") return Difficulty::Medium;
  if (s == "hard") return Difficulty::Hard;
  throw Error(Errc::SchemaViolation, "difficulty must be easy|medium|hard");
}

namespace {

VectorInstance make_divider(Rng& rng, const GridSpec& g, double slot_x, double amp) {
  VectorInstance v;
  v.cls = MapClass::Divider;
  const double margin = rng.uniform(0.0, 5.0);
  const double y0 = g.y_min + margin;
  const double y1 = g.y_max - rng.uniform(0.0, 5.0);
  const double wavelength = rng.uniform(18.0, 40.0);
  const double phase = rng.uniform(0.0, 6.283185307179586);
  const double step = 2.5;
  for (double y = y0; y < y1 + step; y += step) {
    const double yy = std::min(y, y1);
    v.points.emplace_back(slot_x + amp * std::sin(6.283185307179586 * yy / wavelength + phase), yy);
    if (yy == y1) break;
  }
  return v;
}

VectorInstance make_ped_cross(Rng& rng, double rot_max_deg) {
  VectorInstance v;
  v.cls = MapClass::PedCross;
  v.closed = true;
  const double cx = rng.uniform(-8.0, 8.0);
  const double cy = rng.uniform(-22.0, 22.0);
  const double hx = rng.uniform(1.5, 3.0);
  const double hy = rng.uniform(1.0, 2.0);
  const double rot = rng.uniform(-rot_max_deg, rot_max_deg) * 0.0174532925199433;
  const double c = std::cos(rot), s = std::sin(rot);
  const double corners[4][2] = {{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}};
  for (const auto& q : corners) {
    v.points.emplace_back(cx + c * q[0] - s * q[1], cy + s * q[0] + c * q[1]);
  }
  return v;
}

VectorInstance make_curb(Rng& rng, const GridSpec& g, bool left, double amp) {
  VectorInstance v;
  v.cls = MapClass::Curb;
  const double offset = rng.uniform(1.2, 3.5);
  const double base = left ? g.x_min + offset + amp : g.x_max - offset - amp;
  const double wavelength = rng.uniform(25.0, 55.0);
  const double phase = rng.uniform(0.0, 6.283185307179586);
  const double step = 3.0;
  for (double y = g.y_min;; y += step) {
    const double yy = std::min(y, g.y_max);
    v.points.emplace_back(base + amp * std::sin(6.283185307179586 * yy / wavelength + phase), yy);
    if (yy == g.y_max) break;
  }
  return v;
}

}  // namespace

std::vector<Scene> gen_synthetic(uint64_t seed, int n_scenes, Difficulty difficulty,
                                 const GridSpec& grid) {
  grid.validate();
  int min_div = 2, max_div = 2, min_ped = 1, max_ped = 1, min_curb = 1, max_curb = 2;
  double amp_lo = 0.5, amp_hi = 1.0, rot = 0.0;
  if (difficulty == Difficulty::Medium) {
    max_div = 3;
    max_ped = 2;
    min_curb = 2;
    amp_lo = 0.8;
    amp_hi = 1.5;
    rot = 10.0;
  } else if (difficulty == Difficulty::Hard) {
    min_div = 3;
    max_div = 4;
    min_ped = 2;
    max_ped = 2;
    min_curb = 2;
    amp_lo = 1.0;
    amp_hi = 2.0;
    rot = 15.0;
  }

  std::vector<Scene> scenes;
  scenes.reserve(n_scenes);
  for (int s = 0; s < n_scenes; ++s) {
    Rng rng = Rng::substream(seed, static_cast<uint64_t>(s));
    Scene scene;
    scene.grid = grid;
    scene.ego = {0.0, 0.0};

    const double slots[6] = {-7.5, -4.5, -1.5, 1.5, 4.5, 7.5};
    int slot_mask = 0;
    const int n_div = rng.uniform_int(min_div, max_div);
    for (int k = 0; k < n_div; ++k) {
      int slot;
      do {
        slot = rng.uniform_int(0, 5);
      } while (slot_mask & (1 << slot));
      slot_mask |= 1 << slot;
      const double x = slots[slot] + rng.uniform(-0.6, 0.6);
      scene.gt_vectors.push_back(make_divider(rng, grid, x, rng.uniform(amp_lo, amp_hi)));
    }
    const int n_ped = rng.uniform_int(min_ped, max_ped);
    for (int k = 0; k < n_ped; ++k) scene.gt_vectors.push_back(make_ped_cross(rng, rot));
    const int n_curb = rng.uniform_int(min_curb, max_curb);
    const bool first_left = n_curb == 2 || rng.bernoulli(0.5);
    for (int k = 0; k < n_curb; ++k) {
      const bool left = k == 0 ? first_left : false;
      scene.gt_vectors.push_back(make_curb(rng, grid, left, rng.uniform(amp_lo * 0.5, amp_hi * 0.5)));
    }

    for (auto& inst : scene.gt_vectors) {
      auto clipped = clip_to_extent(inst, grid);
      if (clipped) inst = std::move(*clipped);
    }
    validate_scene(scene);
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace mapvec
