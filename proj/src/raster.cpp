#include "mapvec/raster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "mapvec/geometry.hpp"

namespace mapvec {

namespace {

void draw_segment(Bitmap& bm, Pixel a, Pixel b) {
  // Integer Bresenham, 8-connected.
  int x0 = a.col, y0 = a.row, x1 = b.col, y1 = b.row;
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    bm(y0, x0) = 1.0f;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_polyline(Bitmap& bm, const std::vector<Eigen::Vector2d>& points, const GridSpec& grid,
                   bool close) {
  Pixel prev = world_to_pixel(points.front(), grid);
  bm(prev.row, prev.col) = 1.0f;
  for (size_t i = 1; i < points.size(); ++i) {
    const Pixel cur = world_to_pixel(points[i], grid);
    draw_segment(bm, prev, cur);
    prev = cur;
  }
  if (close && points.size() > 2) {
    draw_segment(bm, prev, world_to_pixel(points.front(), grid));
  }
}

Bitmap disk_dilate(const Bitmap& in, double radius) {
  if (radius <= 0.0) return in;
  const int r = static_cast<int>(std::floor(radius));
  const double r2 = radius * radius + 1e-9;
  std::vector<std::pair<int, int>> offsets;
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      if (dr * dr + dc * dc <= r2) offsets.emplace_back(dr, dc);
    }
  }
  Bitmap out = Bitmap::Zero(in.rows(), in.cols());
  for (int row = 0; row < in.rows(); ++row) {
    for (int col = 0; col < in.cols(); ++col) {
      const float v = in(row, col);
      if (v <= 0.0f) continue;
      for (const auto& [dr, dc] : offsets) {
        const int rr = row + dr, cc = col + dc;
        if (rr >= 0 && rr < in.rows() && cc >= 0 && cc < in.cols()) {
          out(rr, cc) = std::max(out(rr, cc), v);
        }
      }
    }
  }
  return out;
}

// 1-D sliding max over a window of 2*radius+1, monotone deque.
void sliding_max_rows(const Bitmap& in, Bitmap& out, int radius) {
  const int n = static_cast<int>(in.cols());
  std::deque<int> dq;
  for (int row = 0; row < in.rows(); ++row) {
    dq.clear();
    for (int col = 0; col < n + radius; ++col) {
      if (col < n) {
        while (!dq.empty() && in(row, dq.back()) <= in(row, col)) dq.pop_back();
        dq.push_back(col);
      }
      const int center = col - radius;
      if (center >= 0) {
        while (dq.front() < center - radius) dq.pop_front();
        out(row, center) = in(row, dq.front());
      }
    }
  }
}

}  // namespace

Bitmap dilate_bitmap(const Bitmap& bitmap, const DilationSpec& spec) {
  if (spec.radius <= 0) return bitmap;
  if (spec.kernel_shape == DilationSpec::Kernel::Disk) {
    return disk_dilate(bitmap, static_cast<double>(spec.radius));
  }
  // Square kernel is separable: max over rows, then over columns.
  Bitmap tmp(bitmap.rows(), bitmap.cols());
  sliding_max_rows(bitmap, tmp, spec.radius);
  Bitmap tmpT = tmp.transpose();
  Bitmap outT(tmpT.rows(), tmpT.cols());
  sliding_max_rows(tmpT, outT, spec.radius);
  return outT.transpose();
}

InstanceMask dilate(const InstanceMask& mask, const DilationSpec& spec) {
  return InstanceMask{mask.cls, dilate_bitmap(mask.bitmap, spec), mask.confidence};
}

InstanceMask rasterize_polyline(const std::vector<Eigen::Vector2d>& points, const GridSpec& grid,
                                int width_px, Warnings* warnings) {
  if (points.size() < 2) {
    throw Error(Errc::InvalidInstance, "rasterize_polyline needs at least 2 points");
  }
  grid.validate();
  InstanceMask mask = make_mask(MapClass::Divider, grid);
  draw_polyline(mask.bitmap, points, grid, /*close=*/false);
  if ((mask.bitmap > 0.5f).count() == 1) {
    warn(warnings, "polyline collapsed to a single pixel");
  }
  if (width_px > 1) {
    mask.bitmap = disk_dilate(mask.bitmap, (width_px - 1) / 2.0);
  }
  return mask;
}

InstanceMask rasterize_polygon(const std::vector<Eigen::Vector2d>& ring, const GridSpec& grid,
                               Warnings* warnings) {
  if (ring.size() < 3) {
    throw Error(Errc::InvalidInstance, "rasterize_polygon needs at least 3 points");
  }
  grid.validate();
  const size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (i == j || (i + 1) % n == j || (j + 1) % n == i) continue;
      if (segments_properly_cross(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) {
        throw Error(Errc::GeometryError, "polygon ring is self-intersecting");
      }
    }
  }

  InstanceMask mask = make_mask(MapClass::PedCross, grid);
  draw_polyline(mask.bitmap, ring, grid, /*close=*/true);
  const auto boundary_count = (mask.bitmap > 0.5f).count();

  // Even-odd interior: a cell belongs iff its center is inside the ring.
  // Half-open edge rule [min_y, max_y) keeps vertex crossings consistent.
  for (int row = 0; row < grid.height(); ++row) {
    const double cy = grid.y_min + (row + 0.5) * grid.resolution;
    std::vector<double> xs;
    for (size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d& a = ring[i];
      const Eigen::Vector2d& b = ring[(i + 1) % n];
      if ((a.y() <= cy) == (b.y() <= cy)) continue;
      xs.push_back(a.x() + (cy - a.y()) / (b.y() - a.y()) * (b.x() - a.x()));
    }
    std::sort(xs.begin(), xs.end());
    for (size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Half-open [x0, x1): a center exactly on the right crossing counts as
      // outside, matching the crossing-parity convention.
      const double t0 = (xs[k] - grid.x_min) / grid.resolution - 0.5;
      const double t1 = (xs[k + 1] - grid.x_min) / grid.resolution - 0.5;
      int c0 = static_cast<int>(std::ceil(t0));
      int c1 = static_cast<int>(std::ceil(t1)) - 1;
      c0 = std::max(c0, 0);
      c1 = std::min(c1, grid.width() - 1);
      for (int col = c0; col <= c1; ++col) mask.bitmap(row, col) = 1.0f;
    }
  }

  if ((mask.bitmap > 0.5f).count() == boundary_count) {
    warn(warnings, "polygon has zero pixel area; boundary-only mask");
  }
  return mask;
}

LabelGrid connected_domains(const Bitmap& binary) {
  const int h = static_cast<int>(binary.rows());
  const int w = static_cast<int>(binary.cols());
  LabelGrid out;
  out.labels.setZero(h, w);
  int next = 0;
  std::vector<int> stack;
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      if (binary(row, col) > 0.5f || out.labels(row, col) != 0) continue;
      ++next;
      stack.push_back(row * w + col);
      out.labels(row, col) = next;
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int r = idx / w, c = idx % w;
        const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
        for (const auto& [rr, cc] : nbr) {
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          if (binary(rr, cc) > 0.5f || out.labels(rr, cc) != 0) continue;
          out.labels(rr, cc) = next;
          stack.push_back(rr * w + cc);
        }
      }
    }
  }
  out.num_components = next;
  return out;
}

std::vector<InstanceMask> gen_curb_masks(const std::vector<VectorInstance>& curbs,
                                         const GridSpec& grid, const Eigen::Vector2d& ego,
                                         Warnings* warnings) {
  grid.validate();
  if (curbs.empty()) return {};
  Bitmap graph = Bitmap::Zero(grid.height(), grid.width());
  for (const auto& curb : curbs) {
    if (curb.cls != MapClass::Curb) {
      throw Error(Errc::InvalidInstance, "gen_curb_masks expects only curb instances");
    }
    if (curb.points.size() < 2) {
      throw Error(Errc::InvalidInstance, "curb instance needs at least 2 points");
    }
    draw_polyline(graph, curb.points, grid, curb.closed);
  }

  const Pixel ego_px = world_to_pixel(ego, grid);
  if (graph(ego_px.row, ego_px.col) > 0.5f) {
    throw Error(Errc::AmbiguousEgo, "ego position lies on a drawn curb pixel");
  }

  const LabelGrid domains = connected_domains(graph);
  const int ego_label = domains.labels(ego_px.row, ego_px.col);

  std::vector<InstanceMask> masks;
  for (int label = 1; label <= domains.num_components; ++label) {
    if (label == ego_label) continue;
    InstanceMask m = make_mask(MapClass::Curb, grid);
    m.bitmap = (domains.labels == label).cast<float>();
    masks.push_back(std::move(m));
  }
  if (masks.empty()) warn(warnings, "all curb domains contain or border the ego; empty result");
  return masks;
}

std::vector<InstanceMask> rasterize_scene(const Scene& scene, int divider_width_px,
                                          const DilationSpec& dilation_for_labels,
                                          Warnings* warnings) {
  std::vector<InstanceMask> masks;
  std::vector<VectorInstance> curbs;
  for (const auto& inst : scene.gt_vectors) {
    switch (inst.cls) {
      case MapClass::Divider:
        masks.push_back(rasterize_polyline(inst.points, scene.grid, divider_width_px, warnings));
        masks.back().cls = MapClass::Divider;
        break;
      case MapClass::PedCross:
        masks.push_back(rasterize_polygon(inst.points, scene.grid, warnings));
        masks.back().cls = MapClass::PedCross;
        break;
      case MapClass::Curb:
        curbs.push_back(inst);
        break;
    }
  }
  for (auto& m : gen_curb_masks(curbs, scene.grid, scene.ego, warnings)) {
    masks.push_back(std::move(m));
  }
  if (dilation_for_labels.radius > 0) {
    for (auto& m : masks) m = dilate(m, dilation_for_labels);
  }
  return masks;
}

}  // namespace mapvec
