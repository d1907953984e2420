#pragma once

#include "mapvec/raster.hpp"
#include "mapvec/types.hpp"

namespace mapvec {

// Network-style prediction: a (possibly soft) mask plus class probabilities
// over the three map classes; remaining mass is "no object".
struct Prediction {
  InstanceMask mask;
  Eigen::Vector3d class_probs = Eigen::Vector3d::Zero();
  double no_object = 0.0;

  void validate() const;
};

struct CostWeights {
  double w_cls = 2.0;
  double w_ce = 5.0;
  double w_dice = 5.0;
};

// Rows are predictions, columns ground truths.
using CostMatrix = Eigen::MatrixXd;

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (pred index, gt index)
  std::vector<int> unmatched_preds;
  std::vector<int> unmatched_gts;
};

// Negative probability of the true class; in [-1, 0], lower is better.
double classification_cost(const Prediction& pred, MapClass gt_class);

// Mean binary cross-entropy between the dilated prediction and the dilated,
// binarized ground truth; probabilities clamped to [1e-6, 1 - 1e-6].
double ce_cost(const Bitmap& pred_mask, const Bitmap& gt_mask, const DilationSpec& dilation);

// Smoothed dice cost 1 - (2*sum(p*g) + 1) / (sum(p) + sum(g) + 1) on the
// dilated masks; in [0, 1).
double dice_cost(const Bitmap& pred_mask, const Bitmap& gt_mask, const DilationSpec& dilation);

CostMatrix cost_matrix(const std::vector<Prediction>& preds, const std::vector<InstanceMask>& gts,
                       const CostWeights& weights, const DilationSpec& dilation);

// Optimal one-to-one assignment of min(P, G) pairs (Hungarian).
Assignment assign(const CostMatrix& costs);

}  // namespace mapvec
