#include "mapvec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mapvec/geometry.hpp"

namespace mapvec {

void EvalConfig::validate() const {
  if (cd_thresholds.empty() || !std::is_sorted(cd_thresholds.begin(), cd_thresholds.end()) ||
      cd_thresholds.front() <= 0.0) {
    throw Error(Errc::SchemaViolation, "cd_thresholds must be positive and ascending");
  }
  if (sample_interval <= 0.0) {
    throw Error(Errc::SchemaViolation, "sample_interval must be positive");
  }
}

double iou(const InstanceMask& a, const InstanceMask& b) {
  if (a.bitmap.rows() != b.bitmap.rows() || a.bitmap.cols() != b.bitmap.cols()) {
    throw Error(Errc::DimensionMismatch, "iou: mask dimensions differ");
  }
  const auto ba = a.bitmap >= 0.5f;
  const auto bb = b.bitmap >= 0.5f;
  const auto inter = (ba && bb).count();
  const auto uni = (ba || bb).count();
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double semantic_iou(const std::vector<InstanceMask>& preds, const std::vector<InstanceMask>& gts,
                    MapClass cls) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& m : preds) rows = std::max(rows, m.bitmap.rows());
  for (const auto& m : gts) rows = std::max(rows, m.bitmap.rows());
  for (const auto& m : preds) cols = std::max(cols, m.bitmap.cols());
  for (const auto& m : gts) cols = std::max(cols, m.bitmap.cols());
  if (rows == 0 || cols == 0) return 1.0;

  InstanceMask pu = InstanceMask{cls, Bitmap::Zero(rows, cols), 1.0};
  InstanceMask gu = InstanceMask{cls, Bitmap::Zero(rows, cols), 1.0};
  for (const auto& m : preds) {
    if (m.cls == cls) pu.bitmap = pu.bitmap.max((m.bitmap >= 0.5f).cast<float>());
  }
  for (const auto& m : gts) {
    if (m.cls == cls) gu.bitmap = gu.bitmap.max((m.bitmap >= 0.5f).cast<float>());
  }
  return iou(pu, gu);
}

namespace {

// Uniform bucket grid for nearest-neighbour queries over a fixed point set.
class PointGrid {
public:
  explicit PointGrid(const std::vector<Eigen::Vector2d>& pts) : pts_(pts) {
    lo_ = pts.front();
    Eigen::Vector2d hi = pts.front();
    for (const auto& p : pts) {
      lo_ = lo_.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double span = std::max({hi.x() - lo_.x(), hi.y() - lo_.y(), 1e-9});
    cell_ = std::max(span / 64.0, 1e-6);
    nx_ = static_cast<int>((hi.x() - lo_.x()) / cell_) + 1;
    ny_ = static_cast<int>((hi.y() - lo_.y()) / cell_) + 1;
    buckets_.resize(static_cast<size_t>(nx_) * ny_);
    for (size_t i = 0; i < pts.size(); ++i) {
      buckets_[bucket_of(pts[i])].push_back(static_cast<int>(i));
    }
  }

  double min_distance(const Eigen::Vector2d& q) const {
    // Unclamped cell coordinates keep the ring-to-distance bound exact:
    // anything in a bucket at Chebyshev ring r is at least (r-1) cells away.
    const int cx = static_cast<int>(std::floor((q.x() - lo_.x()) / cell_));
    const int cy = static_cast<int>(std::floor((q.y() - lo_.y()) / cell_));
    const int to_grid = std::max({0, -cx, cx - (nx_ - 1), -cy, cy - (ny_ - 1)});
    const int first = std::max(0, to_grid - 1);  // closer rings hold no buckets
    const int last = std::max({nx_, ny_, to_grid}) + std::max(nx_, ny_) + 2;
    double best = std::numeric_limits<double>::infinity();
    auto probe = [&](int x, int y) {
      if (x < 0 || x >= nx_ || y < 0 || y >= ny_) return;
      for (int idx : buckets_[static_cast<size_t>(y) * nx_ + x]) {
        best = std::min(best, (pts_[idx] - q).norm());
      }
    };
    for (int ring = first; ring <= last; ++ring) {
      if (std::isfinite(best) && best <= (ring - 1) * cell_) break;
      if (ring == 0) {
        probe(cx, cy);
        continue;
      }
      for (int x = cx - ring; x <= cx + ring; ++x) {
        probe(x, cy - ring);
        probe(x, cy + ring);
      }
      for (int y = cy - ring + 1; y <= cy + ring - 1; ++y) {
        probe(cx - ring, y);
        probe(cx + ring, y);
      }
    }
    return best;
  }

private:
  size_t bucket_of(const Eigen::Vector2d& p) const {
    const int x = std::clamp(static_cast<int>((p.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int y = std::clamp(static_cast<int>((p.y() - lo_.y()) / cell_), 0, ny_ - 1);
    return static_cast<size_t>(y) * nx_ + x;
  }

  const std::vector<Eigen::Vector2d>& pts_;
  Eigen::Vector2d lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

std::vector<Eigen::Vector2d> resample_for_cd(const VectorInstance& v, double interval) {
  const double len = polyline_length(v.points, v.closed);
  if (len == 0.0) return {v.points.front()};
  const int n = v.closed ? std::max(3, static_cast<int>(std::ceil(len / interval)))
                         : std::max(2, static_cast<int>(std::ceil(len / interval)) + 1);
  return resample_uniform(v.points, v.closed, n);
}

}  // namespace

double chamfer_dir(const std::vector<Eigen::Vector2d>& a, const std::vector<Eigen::Vector2d>& b) {
  if (a.empty() || b.empty()) {
    throw Error(Errc::InvalidInstance, "chamfer_dir: point sets must be nonempty");
  }
  const PointGrid grid(b);
  double total = 0.0;
  for (const auto& p : a) total += grid.min_distance(p);
  return total / static_cast<double>(a.size());
}

double chamfer(const VectorInstance& a, const VectorInstance& b, const EvalConfig& cfg) {
  const auto pa = resample_for_cd(a, cfg.sample_interval);
  const auto pb = resample_for_cd(b, cfg.sample_interval);
  return chamfer_dir(pa, pb) + chamfer_dir(pb, pa);
}

namespace {

struct RankedPred {
  double confidence;
  int scene;
  int pred;  // index within the scene's class-filtered predictions
};

double ap_from_flags(const std::vector<char>& tp_flags, int num_gts) {
  if (num_gts == 0) return tp_flags.empty() ? 1.0 : 0.0;
  if (tp_flags.empty()) return 0.0;
  const int n = static_cast<int>(tp_flags.size());
  std::vector<double> precision(n), recall(n);
  int tp = 0;
  for (int k = 0; k < n; ++k) {
    tp += tp_flags[k];
    precision[k] = static_cast<double>(tp) / (k + 1);
    recall[k] = static_cast<double>(tp) / num_gts;
  }
  // All-point interpolation: area under the monotonized envelope.
  for (int k = n - 2; k >= 0; --k) precision[k] = std::max(precision[k], precision[k + 1]);
  double ap = recall[0] * precision[0];
  for (int k = 1; k < n; ++k) ap += (recall[k] - recall[k - 1]) * precision[k];
  return ap;
}

}  // namespace

double average_precision(const std::vector<std::vector<VectorInstance>>& pred_scenes,
                         const std::vector<std::vector<VectorInstance>>& gt_scenes, MapClass cls,
                         double threshold, const EvalConfig& cfg) {
  if (pred_scenes.size() != gt_scenes.size()) {
    throw Error(Errc::DimensionMismatch, "average_precision: scene count mismatch");
  }
  const int num_scenes = static_cast<int>(pred_scenes.size());
  std::vector<std::vector<const VectorInstance*>> preds(num_scenes), gts(num_scenes);
  int total_gts = 0;
  for (int s = 0; s < num_scenes; ++s) {
    for (const auto& v : pred_scenes[s]) {
      if (v.cls == cls) preds[s].push_back(&v);
    }
    for (const auto& v : gt_scenes[s]) {
      if (v.cls == cls) gts[s].push_back(&v);
    }
    total_gts += static_cast<int>(gts[s].size());
  }

  std::vector<RankedPred> ranked;
  for (int s = 0; s < num_scenes; ++s) {
    for (int j = 0; j < static_cast<int>(preds[s].size()); ++j) {
      ranked.push_back({preds[s][j]->confidence, s, j});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedPred& a, const RankedPred& b) {
    return a.confidence > b.confidence;
  });

  std::vector<std::vector<char>> gt_taken(num_scenes);
  for (int s = 0; s < num_scenes; ++s) gt_taken[s].assign(gts[s].size(), 0);

  std::vector<char> tp_flags;
  tp_flags.reserve(ranked.size());
  for (const auto& r : ranked) {
    double best_cd = std::numeric_limits<double>::infinity();
    int best_gt = -1;
    for (int i = 0; i < static_cast<int>(gts[r.scene].size()); ++i) {
      if (gt_taken[r.scene][i]) continue;
      const double cd = chamfer(*preds[r.scene][r.pred], *gts[r.scene][i], cfg);
      if (cd < best_cd) {
        best_cd = cd;
        best_gt = i;
      }
    }
    if (best_gt >= 0 && best_cd < threshold) {
      gt_taken[r.scene][best_gt] = 1;
      tp_flags.push_back(1);
    } else {
      tp_flags.push_back(0);
    }
  }
  return ap_from_flags(tp_flags, total_gts);
}

EvalReport evaluate(const std::vector<EvalScene>& scenes, const EvalConfig& cfg) {
  cfg.validate();
  EvalReport report;
  const MapClass all_classes[] = {MapClass::Divider, MapClass::PedCross, MapClass::Curb};

  for (MapClass cls : all_classes) {
    ClassReport cr;

    // Semantic IoU over the union of all scene masks of this class.
    std::vector<InstanceMask> all_preds, all_gts;
    for (const auto& s : scenes) {
      for (const auto& m : s.pred_masks) {
        if (m.cls == cls) all_preds.push_back(m);
      }
      for (const auto& m : s.gt_masks) {
        if (m.cls == cls) all_gts.push_back(m);
      }
    }
    cr.iou = semantic_iou(all_preds, all_gts, cls);

    std::vector<std::vector<VectorInstance>> pred_scenes(scenes.size()), gt_scenes(scenes.size());
    for (size_t s = 0; s < scenes.size(); ++s) {
      pred_scenes[s] = scenes[s].pred_vectors;
      gt_scenes[s] = scenes[s].gt_vectors;
      for (const auto& v : scenes[s].pred_vectors) cr.num_preds += v.cls == cls;
      for (const auto& v : scenes[s].gt_vectors) cr.num_gts += v.cls == cls;
    }
    for (double thr : cfg.cd_thresholds) {
      cr.ap_per_threshold[thr] = average_precision(pred_scenes, gt_scenes, cls, thr, cfg);
    }
    double sum = 0.0;
    for (const auto& [thr, ap] : cr.ap_per_threshold) sum += ap;
    cr.ap = sum / static_cast<double>(cr.ap_per_threshold.size());
    report.classes[cls] = cr;
  }

  double map_sum = 0.0;
  for (const auto& [cls, cr] : report.classes) map_sum += cr.ap;
  report.map = map_sum / static_cast<double>(report.classes.size());

  // Debug match records at the largest threshold.
  const double thr = cfg.cd_thresholds.back();
  for (size_t s = 0; s < scenes.size(); ++s) {
    for (MapClass cls : all_classes) {
      std::vector<const VectorInstance*> preds, gts;
      for (const auto& v : scenes[s].pred_vectors) {
        if (v.cls == cls) preds.push_back(&v);
      }
      for (const auto& v : scenes[s].gt_vectors) {
        if (v.cls == cls) gts.push_back(&v);
      }
      std::vector<int> order(preds.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return preds[a]->confidence > preds[b]->confidence;
      });
      std::vector<char> taken(gts.size(), 0);
      for (int j : order) {
        MatchRecord rec;
        rec.scene = static_cast<int>(s);
        rec.cls = cls;
        rec.pred = j;
        rec.confidence = preds[j]->confidence;
        double best_cd = std::numeric_limits<double>::infinity();
        int best_gt = -1;
        for (int i = 0; i < static_cast<int>(gts.size()); ++i) {
          if (taken[i]) continue;
          const double cd = chamfer(*preds[j], *gts[i], cfg);
          if (cd < best_cd) {
            best_cd = cd;
            best_gt = i;
          }
        }
        if (best_gt >= 0 && best_cd < thr) {
          taken[best_gt] = 1;
          rec.gt = best_gt;
          rec.cd = best_cd;
        }
        report.matches.push_back(rec);
      }
    }
  }
  return report;
}

}  // namespace mapvec
