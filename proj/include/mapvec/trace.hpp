#pragma once

#include "mapvec/types.hpp"

namespace mapvec {

// Closed cycle on the pixel-corner lattice. Corner (x, y) is the top-left
// corner of pixel (row=y, col=x); consecutive corners differ by one unit
// step. Positive paths (outer boundaries) have positive shoelace area in
// (x, y) corner coordinates; holes are Negative and carry negative area.
struct PixelPath {
  enum class Sign { Positive, Negative };
  std::vector<Eigen::Vector2i> corners;
  Sign sign = Sign::Positive;
  long long area = 0;
};

struct TraceConfig {
  enum class TurnPolicy { Minority, Majority, Left, Right };
  TurnPolicy turn_policy = TurnPolicy::Minority;
  int turd_size = 2;              // drop paths with |area| < turd_size
  bool smooth = false;            // emit the Bezier smoothing stage
  double corner_threshold = 1.0;  // alpha above this stays a corner
};

// Boundary path decomposition of the mask binarized at 0.5. Even-odd refill
// of the result reproduces the binarized mask exactly when turd_size is 0.
std::vector<PixelPath> decompose(const InstanceMask& mask, const TraceConfig& cfg = {});

// Even-odd refill of a set of paths (test oracle companion of decompose).
Bitmap refill(const std::vector<PixelPath>& paths, int height, int width);

// Minimum-segment closed polygon whose segments each stay within one
// pixel-unit of the corners they replace; ties broken by least total
// squared deviation. Vertices are path corners, in pixel-corner units.
std::vector<Eigen::Vector2d> optimal_polygon(const PixelPath& path);

// Potrace-style corner analysis and Bezier fitting, flattened back to a
// polygon (pixel units). Identity when cfg.smooth is false.
std::vector<Eigen::Vector2d> smooth(const std::vector<Eigen::Vector2d>& poly,
                                    const TraceConfig& cfg);

// decompose -> optimal_polygon -> optional smooth -> map to meters. Output
// polygons inherit the mask's class and confidence.
std::vector<VectorInstance> trace(const InstanceMask& mask, const GridSpec& grid,
                                  const TraceConfig& cfg = {});

}  // namespace mapvec
