#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mapvec {

// Error taxonomy shared by the library and the CLI exit-code mapping.
enum class Errc {
  ParseError,
  SchemaViolation,
  UnknownClass,
  InvalidInstance,
  GeometryError,
  DimensionMismatch,
  AmbiguousEgo,
  IoError,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

// Non-fatal diagnostics collected by operations that degrade gracefully.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* w, const std::string& msg) {
  if (w) w->push_back(msg);
}

enum class MapClass { Divider, PedCross, Curb };

inline constexpr int kNumClasses = 3;

const char* to_string(MapClass c);
MapClass map_class_from_string(const std::string& s);

// BEV extent in meters plus resolution; the world<->pixel contract used
// everywhere. Pixel (row, col) covers a resolution x resolution cell whose
// world representative is the cell center. Row 0 is the y_min edge.
struct GridSpec {
  double x_min = -15.0;
  double x_max = 15.0;
  double y_min = -30.0;
  double y_max = 30.0;
  double resolution = 0.15;

  int width() const { return static_cast<int>(std::lround((x_max - x_min) / resolution)); }
  int height() const { return static_cast<int>(std::lround((y_max - y_min) / resolution)); }

  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

struct Pixel {
  int row = 0;
  int col = 0;
  bool operator==(const Pixel&) const = default;
};

// Classed ordered point sequence in meters. Open polyline or closed polygon
// (closed rings do not repeat the first vertex).
struct VectorInstance {
  MapClass cls = MapClass::Divider;
  std::vector<Eigen::Vector2d> points;
  bool closed = false;
  double confidence = 1.0;

  void validate() const;
};

using Bitmap = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Classed bitmap on the grid; values in [0,1]. Ground truth is binary with
// confidence 1, predictions may carry probabilities.
struct InstanceMask {
  MapClass cls = MapClass::Divider;
  Bitmap bitmap;
  double confidence = 1.0;

  int height() const { return static_cast<int>(bitmap.rows()); }
  int width() const { return static_cast<int>(bitmap.cols()); }
};

inline InstanceMask make_mask(MapClass cls, const GridSpec& grid, double confidence = 1.0) {
  return InstanceMask{cls, Bitmap::Zero(grid.height(), grid.width()), confidence};
}

// Ground-truth container. Instances are clipped to the extent at load time.
struct Scene {
  GridSpec grid;
  std::vector<VectorInstance> gt_vectors;
  Eigen::Vector2d ego{0.0, 0.0};
};

}  // namespace mapvec
