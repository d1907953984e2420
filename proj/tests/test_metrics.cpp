#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mapvec/metrics.hpp"
#include "mapvec/raster.hpp"
#include "mapvec/rng.hpp"
#include "oracles.hpp"

using namespace mapvec;

namespace {

InstanceMask mask_of(const Bitmap& bm, MapClass cls = MapClass::Divider) {
  return InstanceMask{cls, bm, 1.0};
}

VectorInstance segment(Eigen::Vector2d a, Eigen::Vector2d b, MapClass cls = MapClass::Divider,
                       double conf = 1.0) {
  VectorInstance v;
  v.cls = cls;
  v.confidence = conf;
  v.points = {std::move(a), std::move(b)};
  return v;
}

// Library AP driven through the same greedy protocol, reproduced by the
// brute-force PR oracle.
double oracle_ap(const std::vector<std::vector<VectorInstance>>& preds,
                 const std::vector<std::vector<VectorInstance>>& gts, MapClass cls, double thr) {
  struct Entry {
    double conf;
    int scene, idx;
  };
  std::vector<Entry> ranked;
  std::vector<std::vector<const VectorInstance*>> ps(preds.size()), gs(gts.size());
  int n_gts = 0;
  for (size_t s = 0; s < preds.size(); ++s) {
    for (const auto& v : preds[s]) {
      if (v.cls == cls) ps[s].push_back(&v);
    }
    for (const auto& v : gts[s]) {
      if (v.cls == cls) gs[s].push_back(&v);
    }
    n_gts += static_cast<int>(gs[s].size());
    for (int j = 0; j < static_cast<int>(ps[s].size()); ++j) {
      ranked.push_back({ps[s][j]->confidence, static_cast<int>(s), j});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Entry& a, const Entry& b) { return a.conf > b.conf; });
  std::vector<std::vector<char>> taken(gts.size());
  for (size_t s = 0; s < gts.size(); ++s) taken[s].assign(gs[s].size(), 0);
  std::vector<oracles::ApCase> cases;
  for (const auto& e : ranked) {
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int i = 0; i < static_cast<int>(gs[e.scene].size()); ++i) {
      if (taken[e.scene][i]) continue;
      const double cd = chamfer(*ps[e.scene][e.idx], *gs[e.scene][i]);
      if (cd < best) {
        best = cd;
        arg = i;
      }
    }
    const bool tp = arg >= 0 && best < thr;
    if (tp) taken[e.scene][arg] = 1;
    cases.push_back({e.conf, tp});
  }
  return oracles::brute_force_ap(cases, n_gts);
}

}  // namespace

TEST_CASE("iou basics") {
  Bitmap a = Bitmap::Zero(8, 8), b = Bitmap::Zero(8, 8);
  a.block(1, 1, 2, 3).setOnes();

  CHECK(iou(mask_of(a), mask_of(a)) == 1.0);

  b.block(5, 5, 2, 2).setOnes();
  CHECK(iou(mask_of(a), mask_of(b)) == 0.0);

  // 2x3 block vs the same block shifted one column: overlap 2x2 of union 8.
  Bitmap shifted = Bitmap::Zero(8, 8);
  shifted.block(1, 2, 2, 3).setOnes();
  CHECK(iou(mask_of(a), mask_of(shifted)) == 0.5);

  CHECK(iou(mask_of(Bitmap::Zero(8, 8)), mask_of(Bitmap::Zero(8, 8))) == 1.0);
  CHECK_THROWS_AS(iou(mask_of(a), mask_of(Bitmap::Zero(4, 4))), Error);
}

TEST_CASE("iou properties on random masks") {
  Rng rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const Bitmap a = oracles::random_blob(rng, 14, 14);
    const Bitmap b = oracles::random_blob(rng, 14, 14);
    const double ab = iou(mask_of(a), mask_of(b));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(iou(mask_of(a), mask_of(a)) == 1.0);
    CHECK(iou(mask_of(b), mask_of(a)) == ab);
  }
}

TEST_CASE("semantic iou unions per class") {
  Bitmap a = Bitmap::Zero(10, 10), b = Bitmap::Zero(10, 10);
  a.block(0, 0, 3, 3).setOnes();
  b.block(6, 6, 3, 3).setOnes();
  const std::vector<InstanceMask> gts{mask_of(a, MapClass::Curb), mask_of(b, MapClass::Curb)};

  CHECK(semantic_iou(gts, gts, MapClass::Curb) == 1.0);
  CHECK(semantic_iou({}, gts, MapClass::Curb) == 0.0);
  CHECK(semantic_iou({gts[0]}, gts, MapClass::Curb) == 0.5);
  // Classes partition the masks: other classes see nothing.
  CHECK(semantic_iou(gts, gts, MapClass::Divider) == 1.0);
}

TEST_CASE("directed chamfer") {
  CHECK(chamfer_dir({{0, 0}, {1, 1}}, {{0, 0}, {1, 1}}) == 0.0);
  CHECK(chamfer_dir({{0, 0}}, {{3, 4}}) == 5.0);
  CHECK(chamfer_dir({{0, 0}, {1, 0}}, {{0, 0}}) == 0.5);
  CHECK_THROWS_AS(chamfer_dir({}, {{0, 0}}), Error);
}

TEST_CASE("chamfer on curves") {
  SUBCASE("identical curves") {
    const auto v = segment({0, 0}, {10, 0});
    CHECK(chamfer(v, v) == 0.0);
  }

  SUBCASE("parallel 10 m segments 0.3 m apart cost 0.6") {
    const auto a = segment({0, 0}, {10, 0});
    const auto b = segment({0, 0.3}, {10, 0.3});
    CHECK(std::abs(chamfer(a, b) - 0.6) <= 1e-9);
  }

  SUBCASE("symmetry on random curves") {
    Rng rng(67);
    for (int trial = 0; trial < 50; ++trial) {
      VectorInstance a, b;
      const int na = rng.uniform_int(2, 6), nb = rng.uniform_int(2, 6);
      for (int i = 0; i < na; ++i) a.points.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
      for (int i = 0; i < nb; ++i) b.points.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
      a.closed = na >= 3 && rng.bernoulli(0.3);
      b.closed = nb >= 3 && rng.bernoulli(0.3);
      const double ab = chamfer(a, b), ba = chamfer(b, a);
      CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
      CHECK(ab >= 0.0);
    }
  }

  SUBCASE("degenerate zero-length curve acts as a point") {
    VectorInstance dot;
    dot.points = {{1, 1}, {1, 1 + 1e-15}};
    const auto far = segment({4, 5}, {4, 5.0001});
    CHECK(chamfer(dot, far) == doctest::Approx(10.0).epsilon(1e-3));
  }
}

TEST_CASE("average precision basics") {
  const auto gt = segment({0, 0}, {10, 0});

  SUBCASE("perfect predictions") {
    CHECK(average_precision({{gt}}, {{gt}}, MapClass::Divider, 0.5) == 1.0);
  }

  SUBCASE("no predictions, nonempty gts") {
    CHECK(average_precision({{}}, {{gt}}, MapClass::Divider, 0.5) == 0.0);
  }

  SUBCASE("no predictions, no gts") {
    CHECK(average_precision({{}}, {{}}, MapClass::Divider, 0.5) == 1.0);
  }

  SUBCASE("predictions but no gts") {
    CHECK(average_precision({{gt}}, {{}}, MapClass::Divider, 0.5) == 0.0);
  }

  SUBCASE("two TPs then an FP") {
    const auto near1 = segment({0, 0.1}, {10, 0.1}, MapClass::Divider, 0.9);
    const auto gt2 = segment({0, 5}, {10, 5});
    const auto near2 = segment({0, 5.1}, {10, 5.1}, MapClass::Divider, 0.8);
    const auto ghost = segment({0, -20}, {10, -20}, MapClass::Divider, 0.7);
    const double ap =
        average_precision({{near1, near2, ghost}}, {{gt, gt2}}, MapClass::Divider, 0.5);
    CHECK(ap == 1.0);  // both gts recovered before the FP
    const double ap_tight =
        average_precision({{ghost, near1, near2}}, {{gt, gt2}}, MapClass::Divider, 0.5);
    CHECK(ap_tight == 1.0);  // confidence ordering puts TPs first regardless of input order
  }
}

TEST_CASE("average precision equals the brute-force PR oracle") {
  Rng rng(71);
  for (int trial = 0; trial < 80; ++trial) {
    const int n_scenes = rng.uniform_int(1, 3);
    std::vector<std::vector<VectorInstance>> preds(n_scenes), gts(n_scenes);
    for (int s = 0; s < n_scenes; ++s) {
      const int ng = rng.uniform_int(0, 4), np = rng.uniform_int(0, 4);
      for (int i = 0; i < ng; ++i) {
        const double y = rng.uniform(-20, 20);
        gts[s].push_back(segment({rng.uniform(-10, 0), y}, {rng.uniform(1, 10), y}));
      }
      for (int j = 0; j < np; ++j) {
        const double y = rng.uniform(-20, 20);
        preds[s].push_back(segment({rng.uniform(-10, 0), y}, {rng.uniform(1, 10), y},
                                   MapClass::Divider, rng.uniform(0.2, 1.0)));
      }
    }
    for (double thr : {0.5, 1.0, 1.5}) {
      const double lib = average_precision(preds, gts, MapClass::Divider, thr);
      const double ref = oracle_ap(preds, gts, MapClass::Divider, thr);
      CHECK(lib == ref);
    }
    // Threshold monotonicity
    double prev = -1.0;
    for (double thr : {0.2, 0.5, 1.0, 1.5}) {
      const double ap = average_precision(preds, gts, MapClass::Divider, thr);
      CHECK(ap >= prev - 1e-12);
      prev = ap;
    }
  }
}

TEST_CASE("evaluate produces a complete report") {
  GridSpec g;
  g.x_min = g.y_min = 0.0;
  g.x_max = g.y_max = 6.0;
  g.resolution = 0.15;

  Scene scene;
  scene.grid = g;
  scene.ego = {3.0, 3.0};
  VectorInstance div = segment({1.0, 0.5}, {1.2, 5.5});
  VectorInstance ped;
  ped.cls = MapClass::PedCross;
  ped.closed = true;
  ped.points = {{3.5, 1.0}, {5.0, 1.0}, {5.0, 2.0}, {3.5, 2.0}};
  VectorInstance curb = segment({5.5, 0.0}, {5.4, 6.0}, MapClass::Curb);
  scene.gt_vectors = {div, ped, curb};

  EvalScene es;
  es.gt_vectors = scene.gt_vectors;
  es.pred_vectors = scene.gt_vectors;
  es.gt_masks = rasterize_scene(scene);
  es.pred_masks = es.gt_masks;

  SUBCASE("perfect predictions score 1.0 everywhere") {
    const auto report = evaluate({es});
    CHECK(report.map == 1.0);
    for (const auto& [cls, cr] : report.classes) {
      CHECK(cr.iou == 1.0);
      CHECK(cr.ap == 1.0);
    }
  }

  SUBCASE("empty predictions score 0") {
    es.pred_vectors.clear();
    es.pred_masks.clear();
    const auto report = evaluate({es});
    CHECK(report.map == 0.0);
    for (const auto& [cls, cr] : report.classes) CHECK(cr.iou == 0.0);
  }

  SUBCASE("mAP is the mean of per-class APs") {
    const auto report = evaluate({es});
    double sum = 0.0;
    for (const auto& [cls, cr] : report.classes) sum += cr.ap;
    CHECK(report.map == doctest::Approx(sum / 3.0).epsilon(1e-12));
  }

  SUBCASE("config validation") {
    EvalConfig bad;
    bad.cd_thresholds = {1.0, 0.5};
    CHECK_THROWS_AS(evaluate({es}, bad), Error);
  }
}
