#include "mapvec/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "mapvec/geometry.hpp"
#include "mapvec/raster.hpp"
#include "mapvec/rng.hpp"

namespace mapvec {

void PerturbSpec::validate() const {
  if (drop_prob < 0.0 || drop_prob > 1.0) {
    throw Error(Errc::SchemaViolation, "drop_prob must be in [0,1]");
  }
  if (point_noise_sigma < 0.0 || spurious_rate < 0.0 || blur_radius < 0) {
    throw Error(Errc::SchemaViolation, "perturbation magnitudes must be nonnegative");
  }
}

namespace {

Bitmap box_blur(const Bitmap& in, int radius) {
  if (radius <= 0) return in;
  const int h = static_cast<int>(in.rows()), w = static_cast<int>(in.cols());
  Bitmap tmp = Bitmap::Zero(h, w), out = Bitmap::Zero(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      float s = 0.0f;
      int cnt = 0;
      for (int k = std::max(0, c - radius); k <= std::min(w - 1, c + radius); ++k) {
        s += in(r, k);
        ++cnt;
      }
      tmp(r, c) = s / cnt;
    }
  }
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) {
      float s = 0.0f;
      int cnt = 0;
      for (int k = std::max(0, r - radius); k <= std::min(h - 1, r + radius); ++k) {
        s += tmp(k, c);
        ++cnt;
      }
      out(r, c) = s / cnt;
    }
  }
  return out;
}

// Integer pixel jitter with the variance of the requested gaussian: a
// uniform draw over [-r, r] has sigma ~ r/sqrt(3).
std::optional<VectorInstance> jitter_instance(const VectorInstance& v, const GridSpec& grid,
                                              double sigma_m, Rng& rng) {
  const double sigma_px = sigma_m / grid.resolution;
  const int r = static_cast<int>(std::lround(std::sqrt(3.0) * sigma_px));
  if (r == 0) return v;
  VectorInstance out = v;
  for (auto& p : out.points) {
    p.x() += rng.uniform_int(-r, r) * grid.resolution;
    p.y() += rng.uniform_int(-r, r) * grid.resolution;
  }
  return clip_to_extent(out, grid);
}

Eigen::Vector3d class_probs_for(MapClass cls, PerturbSpec::ConfidenceModel model, Rng& rng,
                                double* confidence) {
  if (model == PerturbSpec::ConfidenceModel::Oracle) {
    Eigen::Vector3d probs = Eigen::Vector3d::Zero();
    probs[static_cast<int>(cls)] = 1.0;
    *confidence = 1.0;
    return probs;
  }
  Eigen::Vector3d logits;
  for (int k = 0; k < 3; ++k) logits[k] = rng.uniform(-0.5, 0.5);
  logits[static_cast<int>(cls)] += 3.5;
  const Eigen::Vector3d e = (logits.array() - logits.maxCoeff()).exp();
  Eigen::Vector3d probs = e / e.sum();
  *confidence = probs[static_cast<int>(cls)];
  return probs;
}

}  // namespace

std::vector<Prediction> perturb_scene(const Scene& scene, const PerturbSpec& spec,
                                      int divider_width_px) {
  spec.validate();
  const GridSpec& grid = scene.grid;

  Scene jittered;
  jittered.grid = grid;
  jittered.ego = scene.ego;
  std::vector<MapClass> survived_classes;
  for (size_t i = 0; i < scene.gt_vectors.size(); ++i) {
    Rng rng = Rng::substream(spec.seed, i);
    if (rng.bernoulli(spec.drop_prob)) continue;
    auto moved = jitter_instance(scene.gt_vectors[i], grid, spec.point_noise_sigma, rng);
    if (!moved) continue;
    jittered.gt_vectors.push_back(std::move(*moved));
  }

  std::vector<InstanceMask> masks = rasterize_scene(jittered, divider_width_px);

  std::vector<Prediction> preds;
  preds.reserve(masks.size());
  for (size_t m = 0; m < masks.size(); ++m) {
    Rng rng = Rng::substream(spec.seed ^ 0x5eedc0ffeeull, m);
    Prediction p;
    p.mask = std::move(masks[m]);
    if (spec.blur_radius > 0) p.mask.bitmap = box_blur(p.mask.bitmap, spec.blur_radius);
    p.class_probs = class_probs_for(p.mask.cls, spec.confidence_model, rng, &p.mask.confidence);
    p.no_object = 1.0 - p.class_probs.sum();
    preds.push_back(std::move(p));
  }

  // Spurious detections: short random polylines with a random claimed class.
  Rng srng = Rng::substream(spec.seed ^ 0x5b0adful, scene.gt_vectors.size());
  int n_spurious = static_cast<int>(spec.spurious_rate);
  if (srng.bernoulli(spec.spurious_rate - n_spurious)) ++n_spurious;
  for (int k = 0; k < n_spurious; ++k) {
    Rng rng = Rng::substream(spec.seed ^ 0x5b0adful, scene.gt_vectors.size() + 1 + k);
    VectorInstance ghost;
    ghost.cls = static_cast<MapClass>(rng.uniform_int(0, 2));
    const int n_pts = rng.uniform_int(2, 4);
    Eigen::Vector2d p{rng.uniform(grid.x_min, grid.x_max), rng.uniform(grid.y_min, grid.y_max)};
    for (int t = 0; t < n_pts; ++t) {
      ghost.points.push_back(p);
      p += Eigen::Vector2d{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    }
    auto clipped = clip_to_extent(ghost, grid);
    if (!clipped) continue;
    Prediction pred;
    pred.mask = rasterize_polyline(clipped->points, grid, divider_width_px);
    pred.mask.cls = ghost.cls;
    if (spec.blur_radius > 0) pred.mask.bitmap = box_blur(pred.mask.bitmap, spec.blur_radius);
    double conf = 0.0;
    pred.class_probs = class_probs_for(ghost.cls, spec.confidence_model, rng, &conf);
    pred.mask.confidence = spec.confidence_model == PerturbSpec::ConfidenceModel::Oracle
                               ? rng.uniform(0.55, 0.95)
                               : conf * 0.9;
    pred.no_object = 1.0 - pred.class_probs.sum();
    preds.push_back(std::move(pred));
  }
  return preds;
}

}  // namespace mapvec
