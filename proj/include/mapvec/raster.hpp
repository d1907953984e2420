#pragma once

#include "mapvec/types.hpp"

namespace mapvec {

struct DilationSpec {
  enum class Kernel { Square, Disk };
  int radius = 0;  // 0 = identity
  Kernel kernel_shape = Kernel::Square;
};

// Integer component labels; 0 marks foreground (drawn content), background
// components carry contiguous labels 1..K.
struct LabelGrid {
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> labels;
  int num_components = 0;
};

// 8-connected Bresenham polyline raster; width_px > 1 thickens with a disk
// of radius (width_px - 1) / 2.
InstanceMask rasterize_polyline(const std::vector<Eigen::Vector2d>& points, const GridSpec& grid,
                                int width_px = 1, Warnings* warnings = nullptr);

// Scanline even-odd fill of the ring (cell-center rule), boundary pixels
// included. Properly self-intersecting rings are rejected; zero-area rings
// degrade to a boundary-only mask with a warning.
InstanceMask rasterize_polygon(const std::vector<Eigen::Vector2d>& ring, const GridSpec& grid,
                               Warnings* warnings = nullptr);

// Labels 0-valued cells into 4-connected components in row-major discovery
// order; foreground cells keep label 0.
LabelGrid connected_domains(const Bitmap& binary);

// Algorithm: draw every curb polyline into one graph, label the background
// domains, drop the domain containing the ego pixel, and return one filled
// mask per remaining domain. Domain masks exclude the drawn boundary pixels.
std::vector<InstanceMask> gen_curb_masks(const std::vector<VectorInstance>& curbs,
                                         const GridSpec& grid, const Eigen::Vector2d& ego,
                                         Warnings* warnings = nullptr);

// Sliding-window maximum over the kernel neighborhood. Exact morphological
// dilation on binary input, its soft analogue on probabilities.
InstanceMask dilate(const InstanceMask& mask, const DilationSpec& spec);
Bitmap dilate_bitmap(const Bitmap& bitmap, const DilationSpec& spec);

// Per-class dispatch: dividers as polylines, ped crossings as filled
// polygons, curbs jointly through gen_curb_masks; every produced label mask
// gets `dilation_for_labels` applied (radius 0 keeps it untouched).
std::vector<InstanceMask> rasterize_scene(const Scene& scene, int divider_width_px = 1,
                                          const DilationSpec& dilation_for_labels = {},
                                          Warnings* warnings = nullptr);

}  // namespace mapvec
