#pragma once

#include <optional>

#include "mapvec/types.hpp"

namespace mapvec {

// World -> pixel with floor semantics, clamped to the grid. `inside` (when
// given) reports whether the point was within the extent before clamping.
Pixel world_to_pixel(const Eigen::Vector2d& p, const GridSpec& grid, bool* inside = nullptr);

// Cell-center world representative of a pixel.
Eigen::Vector2d pixel_to_world(const Pixel& px, const GridSpec& grid);

// Canonical representative of an instance's equivalence class: open
// polylines pick the lexicographically smaller of the two directions,
// closed rings are oriented counterclockwise and rotated so the
// lexicographically smallest vertex comes first.
VectorInstance canonicalize(const VectorInstance& v);

// Signed shoelace area of a ring (positive = counterclockwise in a y-up frame).
double signed_area(const std::vector<Eigen::Vector2d>& ring);

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b);

// True if two segments properly cross (interiors intersect at a single point).
bool segments_properly_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                             const Eigen::Vector2d& c, const Eigen::Vector2d& d);

double polyline_length(const std::vector<Eigen::Vector2d>& pts, bool closed);

// Arc-length uniform resampling. Open curves keep both endpoints and return
// `n >= 2` points; closed curves return `n >= 3` points around the ring with
// no duplicate of the start. Zero-length input collapses to its single point.
std::vector<Eigen::Vector2d> resample_uniform(const std::vector<Eigen::Vector2d>& pts, bool closed,
                                              int n);

// Resampling by maximum spacing: keeps every original vertex and subdivides
// edges so no gap exceeds `max_spacing`.
std::vector<Eigen::Vector2d> densify(const std::vector<Eigen::Vector2d>& pts, bool closed,
                                     double max_spacing);

std::vector<Eigen::Vector2d> douglas_peucker(const std::vector<Eigen::Vector2d>& pts, double eps);

// Clamp points into the grid extent, dropping consecutive duplicates the
// clamp may create. Returns nullopt (with a warning) if fewer than 2
// distinct points survive.
std::optional<VectorInstance> clip_to_extent(const VectorInstance& v, const GridSpec& grid,
                                             Warnings* warnings = nullptr);

void validate_scene(const Scene& scene);

}  // namespace mapvec
