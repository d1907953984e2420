#include "mapvec/match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mapvec {

void Prediction::validate() const {
  if ((class_probs.array() < -1e-9).any() || (class_probs.array() > 1.0 + 1e-9).any() ||
      no_object < -1e-9) {
    throw Error(Errc::InvalidInstance, "prediction probabilities out of range");
  }
  if (std::abs(class_probs.sum() + no_object - 1.0) > 1e-6) {
    throw Error(Errc::InvalidInstance, "prediction class probabilities must sum to 1");
  }
}

double classification_cost(const Prediction& pred, MapClass gt_class) {
  return -pred.class_probs[static_cast<int>(gt_class)];
}

namespace {

void check_dims(const Bitmap& a, const Bitmap& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::DimensionMismatch, "mask dimensions differ");
  }
}

double ce_cost_dilated(const Bitmap& pred, const Bitmap& gt) {
  constexpr double kEps = 1e-6;
  double total = 0.0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    for (Eigen::Index c = 0; c < pred.cols(); ++c) {
      const double p = std::clamp(static_cast<double>(pred(r, c)), kEps, 1.0 - kEps);
      total += gt(r, c) >= 0.5f ? -std::log(p) : -std::log(1.0 - p);
    }
  }
  return total / static_cast<double>(pred.size());
}

double dice_cost_dilated(const Bitmap& pred, const Bitmap& gt) {
  const double inter = (pred.cast<double>() * gt.cast<double>()).sum();
  const double sums = pred.cast<double>().sum() + gt.cast<double>().sum();
  return 1.0 - (2.0 * inter + 1.0) / (sums + 1.0);
}

}  // namespace

double ce_cost(const Bitmap& pred_mask, const Bitmap& gt_mask, const DilationSpec& dilation) {
  check_dims(pred_mask, gt_mask);
  return ce_cost_dilated(dilate_bitmap(pred_mask, dilation), dilate_bitmap(gt_mask, dilation));
}

double dice_cost(const Bitmap& pred_mask, const Bitmap& gt_mask, const DilationSpec& dilation) {
  check_dims(pred_mask, gt_mask);
  return dice_cost_dilated(dilate_bitmap(pred_mask, dilation), dilate_bitmap(gt_mask, dilation));
}

CostMatrix cost_matrix(const std::vector<Prediction>& preds, const std::vector<InstanceMask>& gts,
                       const CostWeights& weights, const DilationSpec& dilation) {
  // Dilation applies per entry but depends only on one side, so expand each
  // mask once up front.
  std::vector<Bitmap> dil_preds, dil_gts;
  dil_preds.reserve(preds.size());
  dil_gts.reserve(gts.size());
  for (const auto& p : preds) dil_preds.push_back(dilate_bitmap(p.mask.bitmap, dilation));
  for (const auto& g : gts) dil_gts.push_back(dilate_bitmap(g.bitmap, dilation));

  CostMatrix costs(preds.size(), gts.size());
  for (size_t j = 0; j < preds.size(); ++j) {
    for (size_t i = 0; i < gts.size(); ++i) {
      check_dims(preds[j].mask.bitmap, gts[i].bitmap);
      costs(j, i) = weights.w_cls * classification_cost(preds[j], gts[i].cls) +
                    weights.w_ce * ce_cost_dilated(dil_preds[j], dil_gts[i]) +
                    weights.w_dice * dice_cost_dilated(dil_preds[j], dil_gts[i]);
    }
  }
  return costs;
}

namespace {

// Hungarian algorithm with potentials on a square matrix; returns the
// column matched to each row. O(n^3), deterministic.
std::vector<int> hungarian_square(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment assign(const CostMatrix& costs) {
  const int num_preds = static_cast<int>(costs.rows());
  const int num_gts = static_cast<int>(costs.cols());
  Assignment out;
  if (num_preds == 0 || num_gts == 0) {
    for (int j = 0; j < num_preds; ++j) out.unmatched_preds.push_back(j);
    for (int i = 0; i < num_gts; ++i) out.unmatched_gts.push_back(i);
    return out;
  }
  if (!costs.allFinite()) {
    throw Error(Errc::InvalidInstance, "cost matrix must be finite");
  }

  // Pad to square with a constant; dummy rows/cols absorb the surplus side
  // without affecting which real pairs are optimal.
  const int n = std::max(num_preds, num_gts);
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(n, n);
  padded.topLeftCorner(num_preds, num_gts) = costs;
  const std::vector<int> row_to_col = hungarian_square(padded);

  std::vector<char> gt_used(num_gts, 0);
  for (int j = 0; j < num_preds; ++j) {
    const int i = row_to_col[j];
    if (i < num_gts) {
      out.pairs.emplace_back(j, i);
      gt_used[i] = 1;
    } else {
      out.unmatched_preds.push_back(j);
    }
  }
  for (int i = 0; i < num_gts; ++i) {
    if (!gt_used[i]) out.unmatched_gts.push_back(i);
  }
  return out;
}

}  // namespace mapvec
