#pragma once

#include <map>

#include "mapvec/types.hpp"

namespace mapvec {

struct EvalConfig {
  std::vector<double> cd_thresholds = {0.5, 1.0, 1.5};  // meters, ascending
  double sample_interval = 0.1;                         // meters, resampling step before CD

  void validate() const;
};

struct ClassReport {
  double iou = 0.0;
  std::map<double, double> ap_per_threshold;
  double ap = 0.0;  // mean over thresholds
  int num_gts = 0;
  int num_preds = 0;
};

struct MatchRecord {
  int scene = 0;
  MapClass cls = MapClass::Divider;
  int pred = 0;
  int gt = -1;       // -1 when unmatched
  double cd = -1.0;  // CD to the matched gt
  double confidence = 0.0;
};

struct EvalReport {
  std::map<MapClass, ClassReport> classes;
  double map = 0.0;
  std::vector<MatchRecord> matches;
};

// One scene of evaluation input: ground-truth and predicted vectors plus the
// mask sets used for the semantic IoU columns.
struct EvalScene {
  std::vector<VectorInstance> gt_vectors;
  std::vector<VectorInstance> pred_vectors;
  std::vector<InstanceMask> gt_masks;
  std::vector<InstanceMask> pred_masks;
};

// Intersection over union of the binarized masks; both-empty is 1.0.
double iou(const InstanceMask& a, const InstanceMask& b);

// IoU of the per-class union of predictions vs the union of ground truths.
double semantic_iou(const std::vector<InstanceMask>& preds, const std::vector<InstanceMask>& gts,
                    MapClass cls);

// Directed mean nearest-neighbour distance from a to b.
double chamfer_dir(const std::vector<Eigen::Vector2d>& a, const std::vector<Eigen::Vector2d>& b);

// Bidirectional Chamfer distance between two curves after arc-length
// resampling at cfg.sample_interval.
double chamfer(const VectorInstance& a, const VectorInstance& b, const EvalConfig& cfg = {});

// CD-thresholded average precision for one class over a set of scenes:
// predictions sorted by confidence globally, greedy one-to-one gt
// consumption per scene, all-point PR interpolation.
double average_precision(const std::vector<std::vector<VectorInstance>>& pred_scenes,
                         const std::vector<std::vector<VectorInstance>>& gt_scenes, MapClass cls,
                         double threshold, const EvalConfig& cfg = {});

EvalReport evaluate(const std::vector<EvalScene>& scenes, const EvalConfig& cfg = {});

}  // namespace mapvec
