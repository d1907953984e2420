#include "mapvec/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mapvec {

namespace {

bool lex_less(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  return a.y() < b.y();
}

bool lex_less(const std::vector<Eigen::Vector2d>& a, const std::vector<Eigen::Vector2d>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const auto& p, const auto& q) { return lex_less(p, q); });
}

std::vector<Eigen::Vector2d> rotate_ring(const std::vector<Eigen::Vector2d>& pts, size_t k) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) out.push_back(pts[(i + k) % pts.size()]);
  return out;
}

// Best rotation = the one starting at the lexicographically smallest vertex,
// ties resolved by whole-sequence comparison.
std::vector<Eigen::Vector2d> min_rotation(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<Eigen::Vector2d> best = pts;
  for (size_t k = 1; k < pts.size(); ++k) {
    auto cand = rotate_ring(pts, k);
    if (lex_less(cand, best)) best = cand;
  }
  return best;
}

}  // namespace

Pixel world_to_pixel(const Eigen::Vector2d& p, const GridSpec& grid, bool* inside) {
  if (inside) {
    *inside = p.x() >= grid.x_min && p.x() <= grid.x_max && p.y() >= grid.y_min &&
              p.y() <= grid.y_max;
  }
  int col = static_cast<int>(std::floor((p.x() - grid.x_min) / grid.resolution));
  int row = static_cast<int>(std::floor((p.y() - grid.y_min) / grid.resolution));
  col = std::clamp(col, 0, grid.width() - 1);
  row = std::clamp(row, 0, grid.height() - 1);
  return Pixel{row, col};
}

Eigen::Vector2d pixel_to_world(const Pixel& px, const GridSpec& grid) {
  return {grid.x_min + (px.col + 0.5) * grid.resolution,
          grid.y_min + (px.row + 0.5) * grid.resolution};
}

double signed_area(const std::vector<Eigen::Vector2d>& ring) {
  double a = 0.0;
  for (size_t i = 0; i < ring.size(); ++i) {
    const auto& p = ring[i];
    const auto& q = ring[(i + 1) % ring.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

VectorInstance canonicalize(const VectorInstance& v) {
  if (v.points.size() < 2) {
    throw Error(Errc::InvalidInstance, "canonicalize: instance needs at least 2 points");
  }
  VectorInstance out = v;
  if (!v.closed) {
    std::vector<Eigen::Vector2d> rev(v.points.rbegin(), v.points.rend());
    if (lex_less(rev, out.points)) out.points = std::move(rev);
    return out;
  }
  // Closed: orient counterclockwise first. Zero-area rings compare both
  // directions so the result stays direction-invariant.
  double area = signed_area(v.points);
  if (area < 0.0) {
    std::reverse(out.points.begin(), out.points.end());
    out.points = min_rotation(out.points);
  } else if (area > 0.0) {
    out.points = min_rotation(out.points);
  } else {
    auto fwd = min_rotation(out.points);
    std::vector<Eigen::Vector2d> rev(out.points.rbegin(), out.points.rend());
    rev = min_rotation(rev);
    out.points = lex_less(rev, fwd) ? std::move(rev) : std::move(fwd);
  }
  return out;
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool segments_properly_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                             const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  auto cross = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u.x() * v.y() - u.y() * v.x();
  };
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double polyline_length(const std::vector<Eigen::Vector2d>& pts, bool closed) {
  double len = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
  if (closed && pts.size() > 2) len += (pts.front() - pts.back()).norm();
  return len;
}

namespace {

Eigen::Vector2d point_at_arclength(const std::vector<Eigen::Vector2d>& pts, bool closed,
                                   double s) {
  const size_t n = pts.size();
  const size_t edges = closed ? n : n - 1;
  for (size_t i = 0; i < edges; ++i) {
    const Eigen::Vector2d& a = pts[i];
    const Eigen::Vector2d& b = pts[(i + 1) % n];
    const double l = (b - a).norm();
    if (s <= l || i + 1 == edges) {
      if (l == 0.0) return a;
      return a + std::clamp(s / l, 0.0, 1.0) * (b - a);
    }
    s -= l;
  }
  return pts.back();
}

}  // namespace

std::vector<Eigen::Vector2d> resample_uniform(const std::vector<Eigen::Vector2d>& pts, bool closed,
                                              int n) {
  if (pts.empty()) return {};
  const double len = polyline_length(pts, closed);
  if (len == 0.0 || pts.size() == 1) return {pts.front()};
  std::vector<Eigen::Vector2d> out;
  if (closed) {
    n = std::max(n, 3);
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(point_at_arclength(pts, closed, len * i / n));
  } else {
    n = std::max(n, 2);
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(point_at_arclength(pts, closed, len * i / (n - 1)));
  }
  return out;
}

std::vector<Eigen::Vector2d> densify(const std::vector<Eigen::Vector2d>& pts, bool closed,
                                     double max_spacing) {
  if (pts.size() < 2 || max_spacing <= 0.0) return pts;
  std::vector<Eigen::Vector2d> out;
  const size_t n = pts.size();
  const size_t edges = closed ? n : n - 1;
  for (size_t i = 0; i < edges; ++i) {
    const Eigen::Vector2d& a = pts[i];
    const Eigen::Vector2d& b = pts[(i + 1) % n];
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a).norm() / max_spacing)));
    for (int k = 0; k < steps; ++k) out.push_back(a + (static_cast<double>(k) / steps) * (b - a));
  }
  if (!closed) out.push_back(pts.back());
  return out;
}

namespace {

void dp_recurse(const std::vector<Eigen::Vector2d>& pts, size_t lo, size_t hi, double eps,
                std::vector<bool>& keep) {
  if (hi <= lo + 1) return;
  double max_d = -1.0;
  size_t arg = lo;
  for (size_t i = lo + 1; i < hi; ++i) {
    const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
    if (d > max_d) {
      max_d = d;
      arg = i;
    }
  }
  if (max_d > eps) {
    keep[arg] = true;
    dp_recurse(pts, lo, arg, eps, keep);
    dp_recurse(pts, arg, hi, eps, keep);
  }
}

}  // namespace

std::vector<Eigen::Vector2d> douglas_peucker(const std::vector<Eigen::Vector2d>& pts, double eps) {
  if (pts.size() <= 2) return pts;
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  dp_recurse(pts, 0, pts.size() - 1, eps, keep);
  std::vector<Eigen::Vector2d> out;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (keep[i]) out.push_back(pts[i]);
  }
  return out;
}

std::optional<VectorInstance> clip_to_extent(const VectorInstance& v, const GridSpec& grid,
                                             Warnings* warnings) {
  VectorInstance out = v;
  out.points.clear();
  bool clipped = false;
  for (const auto& p : v.points) {
    Eigen::Vector2d q{std::clamp(p.x(), grid.x_min, grid.x_max),
                      std::clamp(p.y(), grid.y_min, grid.y_max)};
    clipped |= (q != p);
    if (out.points.empty() || out.points.back() != q) out.points.push_back(q);
  }
  if (out.closed && out.points.size() > 2 && out.points.front() == out.points.back()) {
    out.points.pop_back();
  }
  if (clipped) warn(warnings, "instance points clipped to grid extent");
  if (out.points.size() < 2 || (out.closed && out.points.size() < 3)) {
    warn(warnings, "instance collapsed by clipping; dropped");
    return std::nullopt;
  }
  return out;
}

void validate_scene(const Scene& scene) {
  scene.grid.validate();
  for (const auto& v : scene.gt_vectors) {
    v.validate();
    for (const auto& p : v.points) {
      if (p.x() < scene.grid.x_min || p.x() > scene.grid.x_max || p.y() < scene.grid.y_min ||
          p.y() > scene.grid.y_max) {
        throw Error(Errc::InvalidInstance, "scene instance point outside grid extent");
      }
    }
  }
}

}  // namespace mapvec
