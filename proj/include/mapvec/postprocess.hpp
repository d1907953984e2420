#pragma once

#include "mapvec/trace.hpp"
#include "mapvec/types.hpp"

namespace mapvec {

struct PostprocessConfig {
  double confidence_threshold = 0.5;
  int edge_margin_px = 1;
  int centerline_samples = 50;
  double simplify_eps_px = 1.0;
};

// Centerline of a traced thin loop: split the ring at its farthest vertex
// pair, resample both chains, and average them pointwise. Output is an open
// polyline in the ring's units.
VectorInstance extract_centerline(const VectorInstance& ring, const PostprocessConfig& cfg,
                                  double meters_per_px, Warnings* warnings = nullptr);

// Drops ring vertices lying on the grid border and returns the surviving
// runs as open polylines. The ring is densified first so border-to-border
// straight edges keep their interior points.
std::vector<VectorInstance> remove_image_edges(const VectorInstance& ring, const GridSpec& grid,
                                               const PostprocessConfig& cfg,
                                               Warnings* warnings = nullptr);

// Confidence gate, trace, then the per-class branch: ped crossings pass
// through, dividers reduce to centerlines, curbs lose their image-edge runs.
std::vector<VectorInstance> vectorize(const std::vector<InstanceMask>& masks, const GridSpec& grid,
                                      const TraceConfig& trace_cfg, const PostprocessConfig& pp_cfg,
                                      Warnings* warnings = nullptr);

}  // namespace mapvec
