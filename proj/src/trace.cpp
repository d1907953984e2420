#include "mapvec/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mapvec/geometry.hpp"

namespace mapvec {

namespace {

constexpr float kBinarize = 0.5f;

struct WorkBitmap {
  int h = 0, w = 0;
  std::vector<uint8_t> px;

  uint8_t get(int row, int col) const {
    if (row < 0 || row >= h || col < 0 || col >= w) return 0;
    return px[static_cast<size_t>(row) * w + col];
  }
  void flip(int row, int col) { px[static_cast<size_t>(row) * w + col] ^= 1; }
};

WorkBitmap binarize(const Bitmap& bm) {
  WorkBitmap out;
  out.h = static_cast<int>(bm.rows());
  out.w = static_cast<int>(bm.cols());
  out.px.resize(static_cast<size_t>(out.h) * out.w);
  for (int r = 0; r < out.h; ++r) {
    for (int c = 0; c < out.w; ++c) {
      out.px[static_cast<size_t>(r) * out.w + c] = bm(r, c) >= kBinarize ? 1 : 0;
    }
  }
  return out;
}

// Majority vote of the working bitmap on rings of growing radius around a
// corner; decides ambiguous checkerboard turns.
bool majority(const WorkBitmap& bm, int x, int y) {
  for (int i = 2; i < 5; ++i) {
    int ct = 0;
    for (int a = -i + 1; a <= i - 1; ++a) {
      ct += bm.get(y + i - 1, x + a) ? 1 : -1;
      ct += bm.get(y + a - 1, x + i - 1) ? 1 : -1;
      ct += bm.get(y - i, x + a - 1) ? 1 : -1;
      ct += bm.get(y + a, x - i) ? 1 : -1;
    }
    if (ct > 0) return true;
    if (ct < 0) return false;
  }
  return false;
}

// Walk the boundary starting at the top-left corner of pixel (row, col),
// keeping the filled region on the rotated-left side of travel. The first
// set pixel in scan order always has its top edge free, so the initial
// direction is +x along that edge.
std::vector<Eigen::Vector2i> find_path(const WorkBitmap& bm, int col, int row,
                                       TraceConfig::TurnPolicy policy) {
  std::vector<Eigen::Vector2i> corners;
  int x = col, y = row;
  int dx = 1, dy = 0;
  const long long guard = 4ll * bm.h * bm.w + 8;
  long long steps = 0;
  while (true) {
    corners.emplace_back(x, y);
    x += dx;
    y += dy;
    if (x == col && y == row) break;
    if (++steps > guard) throw Error(Errc::Internal, "boundary walk failed to close");

    const bool region_ahead = bm.get(y + (dx + dy - 1) / 2, x + (dx - dy - 1) / 2) != 0;
    const bool other_ahead = bm.get(y + (dy - dx - 1) / 2, x + (dx + dy - 1) / 2) != 0;
    if (other_ahead && !region_ahead) {
      // Checkerboard corner: policy chooses whether to absorb the diagonal
      // neighbour (anti-rotation) or hug the current region (rotation).
      const bool anti = policy == TraceConfig::TurnPolicy::Right ||
                        (policy == TraceConfig::TurnPolicy::Majority && majority(bm, x, y)) ||
                        (policy == TraceConfig::TurnPolicy::Minority && !majority(bm, x, y));
      if (anti) {
        const int t = dx;
        dx = dy;
        dy = -t;
      } else {
        const int t = dx;
        dx = -dy;
        dy = t;
      }
    } else if (other_ahead && region_ahead) {
      const int t = dx;  // concave corner: anti-rotation
      dx = dy;
      dy = -t;
    } else if (!other_ahead && !region_ahead) {
      const int t = dx;  // convex corner: rotation
      dx = -dy;
      dy = t;
    }
  }
  return corners;
}

long long shoelace2(const std::vector<Eigen::Vector2i>& corners) {
  long long a2 = 0;
  for (size_t i = 0; i < corners.size(); ++i) {
    const auto& p = corners[i];
    const auto& q = corners[(i + 1) % corners.size()];
    a2 += static_cast<long long>(p.x()) * q.y() - static_cast<long long>(q.x()) * p.y();
  }
  return a2;
}

// Even-odd flip of the path interior: every vertical edge at column x over
// pixel-row y toggles the parity of that row to its right.
void xor_fill(const std::vector<Eigen::Vector2i>& corners, WorkBitmap& bm) {
  std::vector<std::vector<int>> rows(bm.h);
  for (size_t i = 0; i < corners.size(); ++i) {
    const auto& a = corners[i];
    const auto& b = corners[(i + 1) % corners.size()];
    if (a.x() != b.x()) continue;
    const int r = std::min(a.y(), b.y());
    if (r >= 0 && r < bm.h) rows[r].push_back(a.x());
  }
  for (int r = 0; r < bm.h; ++r) {
    auto& xs = rows[r];
    std::sort(xs.begin(), xs.end());
    for (size_t k = 0; k + 1 < xs.size(); k += 2) {
      for (int c = xs[k]; c < xs[k + 1]; ++c) bm.flip(r, c);
    }
  }
}

}  // namespace

std::vector<PixelPath> decompose(const InstanceMask& mask, const TraceConfig& cfg) {
  WorkBitmap work = binarize(mask.bitmap);
  const WorkBitmap orig = work;
  std::vector<PixelPath> paths;
  size_t scan = 0;
  const size_t total = work.px.size();
  while (true) {
    while (scan < total && work.px[scan] == 0) ++scan;
    if (scan >= total) break;
    const int row = static_cast<int>(scan) / work.w;
    const int col = static_cast<int>(scan) % work.w;

    PixelPath path;
    path.sign = orig.px[scan] ? PixelPath::Sign::Positive : PixelPath::Sign::Negative;
    path.corners = find_path(work, col, row, cfg.turn_policy);
    xor_fill(path.corners, work);

    const long long area = shoelace2(path.corners) / 2;
    path.area = path.sign == PixelPath::Sign::Negative ? -area : area;
    if (std::llabs(path.area) >= cfg.turd_size) paths.push_back(std::move(path));
  }
  return paths;
}

Bitmap refill(const std::vector<PixelPath>& paths, int height, int width) {
  WorkBitmap bm;
  bm.h = height;
  bm.w = width;
  bm.px.assign(static_cast<size_t>(height) * width, 0);
  for (const auto& p : paths) xor_fill(p.corners, bm);
  Bitmap out(height, width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) out(r, c) = bm.px[static_cast<size_t>(r) * width + c];
  }
  return out;
}

namespace {

// Squared-distance tolerance for the "within one pixel-unit" straightness
// criterion. Lattice distances near 1 are rationals separated by far more
// than this, so exact boundary cases are kept.
constexpr double kStraightTol2 = 1.0 + 1e-7;

struct SegmentCandidate {
  int span;
  double penalty;
};

double point_segment_dist2(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).squaredNorm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).squaredNorm();
}

// All admissible chord spans from corner i, with their deviation penalties.
// Axis-aligned straight runs extend in O(1); the scan stops after a run of
// failures on long paths since reconnections further out are not useful.
std::vector<SegmentCandidate> scan_candidates(const std::vector<Eigen::Vector2i>& pts, int i) {
  const int n = static_cast<int>(pts.size());
  std::vector<SegmentCandidate> out;
  const int max_gap = n <= 64 ? n : 8;
  int gap = 0;
  bool straight_run = true;
  const Eigen::Vector2i step0 = pts[(i + 1) % n] - pts[i];
  const Eigen::Vector2d a = pts[i].cast<double>();
  for (int l = 1; l <= n - 1 && gap < max_gap; ++l) {
    const int j = (i + l) % n;
    if (straight_run && l > 1) {
      straight_run = (pts[j] - pts[(i + l - 1) % n]) == step0;
    }
    if (straight_run) {
      out.push_back({l, 0.0});
      continue;
    }
    const Eigen::Vector2d b = pts[j].cast<double>();
    // Newest interior corner fails most often; test it first.
    double penalty = 0.0;
    bool ok = point_segment_dist2(pts[(i + l - 1) % n].cast<double>(), a, b) <= kStraightTol2;
    for (int k = 1; ok && k < l; ++k) {
      const double d2 = point_segment_dist2(pts[(i + k) % n].cast<double>(), a, b);
      if (d2 > kStraightTol2) ok = false;
      penalty += d2;
    }
    if (ok) {
      out.push_back({l, penalty});
      gap = 0;
    } else {
      ++gap;
    }
  }
  return out;
}

struct DpCell {
  int count = std::numeric_limits<int>::max();
  double penalty = std::numeric_limits<double>::infinity();
  int parent = -1;

  bool better(int c, double p) const {
    return c < count || (c == count && p < penalty - 1e-12);
  }
};

}  // namespace

std::vector<Eigen::Vector2d> optimal_polygon(const PixelPath& path) {
  const auto& pts = path.corners;
  const int n = static_cast<int>(pts.size());
  std::vector<Eigen::Vector2d> out;
  if (n < 4) {
    for (const auto& p : pts) out.push_back(p.cast<double>());
    return out;
  }

  std::vector<std::vector<SegmentCandidate>> cands(n);
  int cut = 0;
  int cut_reach = std::numeric_limits<int>::max();
  for (int i = 0; i < n; ++i) {
    cands[i] = scan_candidates(pts, i);
    const int reach = cands[i].back().span;
    if (reach < cut_reach) {
      cut_reach = reach;
      cut = i;
    }
  }

  // Unrolled coordinate p >= cut; some polygon segment covers corner `cut`,
  // so its end vertex is one of the offsets below. Anchoring the cyclic DP
  // at each such vertex keeps the search exact.
  std::vector<char> anchor_offset(n + 1, 0);
  for (int t = 0; t < n; ++t) {
    const int u = (cut - t + n) % n;
    for (const auto& cand : cands[u]) {
      if (cand.span > t) anchor_offset[cand.span - t] = 1;
    }
  }

  int best_count = std::numeric_limits<int>::max();
  double best_penalty = std::numeric_limits<double>::infinity();
  std::vector<int> best_vertices;
  std::vector<DpCell> dp(n + 1);
  for (int d = 1; d <= n; ++d) {
    if (!anchor_offset[d]) continue;
    const int start = (cut + d) % n;  // polygon is forced through this corner
    std::fill(dp.begin(), dp.end(), DpCell{});
    dp[0] = DpCell{0, 0.0, -1};
    for (int p = 0; p < n; ++p) {
      if (dp[p].count == std::numeric_limits<int>::max()) continue;
      for (const auto& cand : cands[(start + p) % n]) {
        const int q = p + cand.span;
        if (q > n) continue;
        if (dp[q].better(dp[p].count + 1, dp[p].penalty + cand.penalty)) {
          dp[q] = DpCell{dp[p].count + 1, dp[p].penalty + cand.penalty, p};
        }
      }
    }
    if (dp[n].count == std::numeric_limits<int>::max()) continue;
    if (dp[n].count < best_count ||
        (dp[n].count == best_count && dp[n].penalty < best_penalty - 1e-12)) {
      best_count = dp[n].count;
      best_penalty = dp[n].penalty;
      best_vertices.clear();
      for (int p = n; p > 0; p = dp[p].parent) best_vertices.push_back((start + p) % n);
      std::reverse(best_vertices.begin(), best_vertices.end());
    }
  }
  if (best_vertices.empty()) throw Error(Errc::Internal, "polygon search found no cover");

  out.reserve(best_vertices.size());
  for (int idx : best_vertices) out.push_back(pts[idx].cast<double>());
  return out;
}

namespace {

void flatten_cubic(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                   const Eigen::Vector2d& p3, double tol, int depth,
                   std::vector<Eigen::Vector2d>& out) {
  const double dev = std::max(point_segment_distance(p1, p0, p3), point_segment_distance(p2, p0, p3));
  if (dev <= tol || depth >= 16) {
    out.push_back(p3);
    return;
  }
  const Eigen::Vector2d q0 = 0.5 * (p0 + p1), q1 = 0.5 * (p1 + p2), q2 = 0.5 * (p2 + p3);
  const Eigen::Vector2d r0 = 0.5 * (q0 + q1), r1 = 0.5 * (q1 + q2);
  const Eigen::Vector2d s = 0.5 * (r0 + r1);
  flatten_cubic(p0, q0, r0, s, tol, depth + 1, out);
  flatten_cubic(s, r1, q2, p3, tol, depth + 1, out);
}

double cross2(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
  return u.x() * v.y() - u.y() * v.x();
}

std::vector<Eigen::Vector2d> prune_collinear(const std::vector<Eigen::Vector2d>& pts) {
  if (pts.size() < 3) return pts;
  std::vector<Eigen::Vector2d> out;
  const size_t n = pts.size();
  for (size_t j = 0; j < n; ++j) {
    const Eigen::Vector2d& prev = pts[(j + n - 1) % n];
    const Eigen::Vector2d& cur = pts[j];
    const Eigen::Vector2d& next = pts[(j + 1) % n];
    if (std::abs(cross2(cur - prev, next - prev)) > 1e-9) out.push_back(cur);
  }
  return out.size() >= 3 ? out : pts;
}

}  // namespace

std::vector<Eigen::Vector2d> smooth(const std::vector<Eigen::Vector2d>& poly,
                                    const TraceConfig& cfg) {
  if (!cfg.smooth || poly.size() < 3) return poly;
  const size_t m = poly.size();
  constexpr double kFlatnessTol = 0.25;
  std::vector<Eigen::Vector2d> out;
  out.push_back(0.5 * (poly[m - 1] + poly[0]));  // start of segment 0
  for (size_t j = 0; j < m; ++j) {
    const Eigen::Vector2d& vi = poly[(j + m - 1) % m];
    const Eigen::Vector2d& vj = poly[j];
    const Eigen::Vector2d& vk = poly[(j + 1) % m];
    const Eigen::Vector2d z0 = 0.5 * (vi + vj);
    const Eigen::Vector2d z1 = 0.5 * (vj + vk);

    const Eigen::Vector2d d = vk - vi;
    const double denom = std::abs(d.x()) + std::abs(d.y());
    double alpha;
    if (denom != 0.0) {
      const double dd = std::abs(cross2(vj - vi, vk - vi)) / denom;
      alpha = dd > 1.0 ? 1.0 - 1.0 / dd : 0.0;
      alpha /= 0.75;
    } else {
      alpha = 4.0 / 3.0;
    }

    if (alpha >= cfg.corner_threshold) {
      out.push_back(vj);
      out.push_back(z1);
    } else {
      const double t = 0.5 + 0.5 * std::clamp(alpha, 0.55, 1.0);
      const Eigen::Vector2d c1 = vi + t * (vj - vi);
      const Eigen::Vector2d c2 = vk + t * (vj - vk);
      flatten_cubic(z0, c1, c2, z1, kFlatnessTol, 0, out);
    }
  }
  out.pop_back();  // final z1 duplicates the ring start
  return prune_collinear(out);
}

std::vector<VectorInstance> trace(const InstanceMask& mask, const GridSpec& grid,
                                  const TraceConfig& cfg) {
  std::vector<VectorInstance> out;
  for (const auto& path : decompose(mask, cfg)) {
    std::vector<Eigen::Vector2d> poly = smooth(optimal_polygon(path), cfg);
    VectorInstance inst;
    inst.cls = mask.cls;
    inst.confidence = mask.confidence;
    inst.closed = true;
    inst.points.reserve(poly.size());
    for (const auto& p : poly) {
      Eigen::Vector2d w{grid.x_min + p.x() * grid.resolution,
                        grid.y_min + p.y() * grid.resolution};
      if (inst.points.empty() || inst.points.back() != w) inst.points.push_back(w);
    }
    if (inst.points.size() >= 2) out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace mapvec
