#include "mapvec/postprocess.hpp"

#include <algorithm>
#include <cmath>

#include "mapvec/geometry.hpp"

namespace mapvec {

namespace {

std::vector<Eigen::Vector2d> chain_between(const std::vector<Eigen::Vector2d>& ring, size_t from,
                                           size_t to) {
  std::vector<Eigen::Vector2d> out;
  for (size_t i = from;; i = (i + 1) % ring.size()) {
    out.push_back(ring[i]);
    if (i == to) break;
  }
  return out;
}

}  // namespace

VectorInstance extract_centerline(const VectorInstance& ring, const PostprocessConfig& cfg,
                                  double meters_per_px, Warnings* warnings) {
  VectorInstance out;
  out.cls = ring.cls;
  out.confidence = ring.confidence;
  out.closed = false;

  const auto& pts = ring.points;
  if (pts.size() < 3) {
    out.points = pts;  // two-vertex loop is already its own midline
    return out;
  }
  if (pts.size() == 3) {
    warn(warnings, "centerline of a 3-vertex ring degraded to its midsegment");
    size_t longest = 0;
    double best = -1.0;
    for (size_t i = 0; i < 3; ++i) {
      const double len = (pts[(i + 1) % 3] - pts[i]).norm();
      if (len > best) {
        best = len;
        longest = i;
      }
    }
    // Midsegment parallel to the longest edge: midpoints of the two others.
    const size_t a = (longest + 1) % 3, b = (longest + 2) % 3;
    out.points = {0.5 * (pts[a] + pts[b]), 0.5 * (pts[b] + pts[longest])};
    return out;
  }

  size_t i1 = 0, i2 = 1;
  double best = -1.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const double d = (pts[i] - pts[j]).squaredNorm();
      if (d > best) {
        best = d;
        i1 = i;
        i2 = j;
      }
    }
  }

  const int samples = std::max(cfg.centerline_samples, 2);
  std::vector<Eigen::Vector2d> side_a =
      resample_uniform(chain_between(pts, i1, i2), false, samples);
  std::vector<Eigen::Vector2d> side_b =
      resample_uniform(chain_between(pts, i2, i1), false, samples);
  std::reverse(side_b.begin(), side_b.end());
  if (side_a.size() != side_b.size()) {
    throw Error(Errc::Internal, "centerline chains resampled to different sizes");
  }

  std::vector<Eigen::Vector2d> mid;
  mid.reserve(side_a.size());
  for (size_t k = 0; k < side_a.size(); ++k) mid.push_back(0.5 * (side_a[k] + side_b[k]));
  if (cfg.simplify_eps_px > 0.0) {
    mid = douglas_peucker(mid, cfg.simplify_eps_px * meters_per_px);
  }

  for (const auto& p : mid) {
    if (out.points.empty() || out.points.back() != p) out.points.push_back(p);
  }
  if (out.points.size() < 2) out.points = {mid.front(), mid.back()};
  return out;
}

std::vector<VectorInstance> remove_image_edges(const VectorInstance& ring, const GridSpec& grid,
                                               const PostprocessConfig& cfg, Warnings* warnings) {
  const double res = grid.resolution;
  // Densify so long straight edges keep interior vertices after the
  // border vertices are dropped; the minimal traced polygon describes a
  // border-to-border edge with just two corner vertices otherwise.
  std::vector<Eigen::Vector2d> pts = densify(ring.points, /*closed=*/ring.points.size() > 2, res);

  // Strictly-inside test: a vertex survives iff it is farther than
  // (margin - eps) pixels from every border, so lattice vertices exactly on
  // the border go and the next lattice line in stays (margin 1).
  const double cut = (cfg.edge_margin_px - 1e-6) * res;
  std::vector<char> keep(pts.size());
  size_t kept = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double d = std::min(std::min(pts[i].x() - grid.x_min, grid.x_max - pts[i].x()),
                              std::min(pts[i].y() - grid.y_min, grid.y_max - pts[i].y()));
    keep[i] = d >= cut ? 1 : 0;
    kept += keep[i];
  }

  std::vector<VectorInstance> out;
  const double simplify_eps = cfg.simplify_eps_px * res;
  auto emit = [&](std::vector<Eigen::Vector2d> run) {
    if (run.size() < 2) return;
    if (simplify_eps > 0.0) run = douglas_peucker(run, simplify_eps);
    VectorInstance v;
    v.cls = ring.cls;
    v.confidence = ring.confidence;
    v.closed = false;
    for (const auto& p : run) {
      if (v.points.empty() || v.points.back() != p) v.points.push_back(p);
    }
    if (v.points.size() >= 2) out.push_back(std::move(v));
  };

  if (kept == 0) {
    warn(warnings, "curb ring lies entirely on the image border; dropped");
    return out;
  }
  if (kept == pts.size()) {
    // Interior loop never touches the border: keep the whole cycle as a
    // polyline that returns to its start.
    std::vector<Eigen::Vector2d> run = pts;
    run.push_back(pts.front());
    emit(std::move(run));
    return out;
  }

  // Maximal cyclic runs of survivors; start scanning just after a deleted
  // vertex so no run is split across the wrap point.
  size_t first_gap = 0;
  while (keep[first_gap]) ++first_gap;
  std::vector<Eigen::Vector2d> run;
  for (size_t t = 0; t <= pts.size(); ++t) {
    const size_t i = (first_gap + t) % pts.size();
    if (t < pts.size() && keep[i]) {
      run.push_back(pts[i]);
    } else if (!run.empty()) {
      emit(std::move(run));
      run.clear();
    }
  }
  return out;
}

std::vector<VectorInstance> vectorize(const std::vector<InstanceMask>& masks, const GridSpec& grid,
                                      const TraceConfig& trace_cfg, const PostprocessConfig& pp_cfg,
                                      Warnings* warnings) {
  std::vector<VectorInstance> out;
  for (const auto& mask : masks) {
    if (!(mask.confidence > pp_cfg.confidence_threshold)) continue;
    const std::vector<VectorInstance> traced = trace(mask, grid, trace_cfg);
    if (traced.empty()) {
      warn(warnings, "mask traced to nothing; skipped");
      continue;
    }
    for (const auto& ring : traced) {
      switch (mask.cls) {
        case MapClass::PedCross:
          out.push_back(ring);
          break;
        case MapClass::Divider:
          out.push_back(extract_centerline(ring, pp_cfg, grid.resolution, warnings));
          break;
        case MapClass::Curb: {
          auto chains = remove_image_edges(ring, grid, pp_cfg, warnings);
          std::move(chains.begin(), chains.end(), std::back_inserter(out));
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace mapvec
