#pragma once

#include "mapvec/match.hpp"
#include "mapvec/types.hpp"

namespace mapvec {

// Synthetic stand-in for a segmentation network: jitters ground-truth
// vectors, drops and invents instances, and optionally softens mask edges.
struct PerturbSpec {
  uint64_t seed = 0;
  double point_noise_sigma = 0.0;  // meters
  double drop_prob = 0.0;
  double spurious_rate = 0.0;  // expected spurious instances per scene
  int blur_radius = 0;         // pixels
  enum class ConfidenceModel { Oracle, NoisyLogit };
  ConfidenceModel confidence_model = ConfidenceModel::Oracle;

  void validate() const;
};

// Deterministic under (scene, spec); the all-zero spec reproduces
// rasterize_scene bit for bit. Jitter is applied as integer pixel offsets to
// the vector points so results do not depend on platform float behaviour.
std::vector<Prediction> perturb_scene(const Scene& scene, const PerturbSpec& spec,
                                      int divider_width_px = 1);

}  // namespace mapvec
