#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mapvec/match.hpp"
#include "mapvec/metrics.hpp"
#include "mapvec/raster.hpp"
#include "mapvec/rng.hpp"
#include "oracles.hpp"

using namespace mapvec;

namespace {

Prediction pred_of(const Bitmap& bm, Eigen::Vector3d probs, MapClass cls = MapClass::Divider) {
  Prediction p;
  p.mask = InstanceMask{cls, bm, 1.0};
  p.class_probs = std::move(probs);
  p.no_object = 1.0 - p.class_probs.sum();
  return p;
}

Bitmap vline(int h, int w, int col) {
  Bitmap bm = Bitmap::Zero(h, w);
  bm.col(col).setOnes();
  return bm;
}

constexpr DilationSpec kNoDilation{0, DilationSpec::Kernel::Square};

}  // namespace

TEST_CASE("classification cost is the negative true-class probability") {
  const Bitmap bm = Bitmap::Zero(4, 4);
  CHECK(classification_cost(pred_of(bm, {1, 0, 0}), MapClass::Divider) == -1.0);
  CHECK(classification_cost(pred_of(bm, {1.0 / 3, 1.0 / 3, 1.0 / 3}), MapClass::Curb) ==
        doctest::Approx(-1.0 / 3));
  CHECK(classification_cost(pred_of(bm, {0.7, 0.2, 0.1}), MapClass::PedCross) ==
        doctest::Approx(-0.2));

  Prediction bad = pred_of(bm, {0.5, 0.2, 0.1});
  bad.no_object = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("cross-entropy cost") {
  const Bitmap gt = vline(10, 10, 4);

  SUBCASE("identical masks are near zero") {
    CHECK(ce_cost(gt, gt, kNoDilation) <= 1e-5);
  }

  SUBCASE("complement hits the clamp") {
    const Bitmap comp = 1.0f - gt;
    CHECK(ce_cost(comp, gt, kNoDilation) == doctest::Approx(-std::log(1e-6)).epsilon(1e-6));
  }

  SUBCASE("uniform half prediction costs ln 2") {
    const Bitmap half = Bitmap::Constant(10, 10, 0.5f);
    CHECK(ce_cost(half, gt, kNoDilation) == doctest::Approx(std::log(2.0)));
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(ce_cost(Bitmap::Zero(3, 3), gt, kNoDilation), Error);
  }
}

TEST_CASE("dice cost") {
  SUBCASE("identical nonempty masks cost exactly zero") {
    const Bitmap gt = vline(12, 12, 3);
    CHECK(dice_cost(gt, gt, kNoDilation) == 0.0);
  }

  SUBCASE("disjoint masks approach one") {
    const Bitmap a = vline(12, 12, 2), b = vline(12, 12, 9);
    const double sum = 24.0;
    CHECK(dice_cost(a, b, kNoDilation) == doctest::Approx(1.0 - 1.0 / (sum + 1.0)));
  }

  SUBCASE("parallel lines overlap after dilation") {
    const Bitmap gt = vline(30, 30, 12), pred = vline(30, 30, 15);
    CHECK(dice_cost(pred, gt, kNoDilation) > 0.95);
    CHECK(dice_cost(pred, gt, {2, DilationSpec::Kernel::Square}) < 0.9);
  }

  SUBCASE("non-increasing in radius for disjoint elongated pairs") {
    // Gaps of 1-2 px so every dilation step gains overlap; with wider gaps
    // the +1 smoothing terms nudge the cost up while the masks stay
    // disjoint, which is outside the overlap-growth regime this checks.
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
      const int c1 = rng.uniform_int(4, 20);
      const int c2 = c1 + rng.uniform_int(1, 2);
      const Bitmap a = vline(24, 30, c1), b = vline(24, 30, c2);
      double prev = 1.0;
      for (int radius = 0; radius <= 4; ++radius) {
        const double cost = dice_cost(a, b, {radius, DilationSpec::Kernel::Square});
        CHECK(cost <= prev + 1e-12);
        prev = cost;
      }
    }
  }
}

TEST_CASE("cost matrix composes the three costs") {
  const Bitmap gt_bm = vline(10, 10, 4);
  const std::vector<InstanceMask> gts{InstanceMask{MapClass::Divider, gt_bm, 1.0}};
  const CostWeights w;

  SUBCASE("perfect pair costs -w_cls") {
    const auto costs = cost_matrix({pred_of(gt_bm, {1, 0, 0})}, gts, w, kNoDilation);
    REQUIRE(costs.rows() == 1);
    CHECK(costs(0, 0) == doctest::Approx(-w.w_cls).epsilon(1e-4));
  }

  SUBCASE("zero weights select a single term") {
    const Bitmap other = vline(10, 10, 7);
    const auto pred = pred_of(other, {0.5, 0.3, 0.2});
    const auto costs = cost_matrix({pred}, gts, {0, 0, 1}, kNoDilation);
    CHECK(costs(0, 0) == doctest::Approx(dice_cost(other, gt_bm, kNoDilation)));
  }

  SUBCASE("random matrix equals recomposition from the cost ops") {
    Rng rng(29);
    std::vector<Prediction> preds;
    std::vector<InstanceMask> gt3;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d probs{rng.uniform(0.1, 1), rng.uniform(0.1, 1), rng.uniform(0.1, 1)};
      probs /= probs.sum();
      preds.push_back(pred_of(oracles::random_blob(rng, 12, 12), probs));
      gt3.push_back(InstanceMask{static_cast<MapClass>(i % 3), oracles::random_blob(rng, 12, 12), 1.0});
    }
    const DilationSpec dil{1, DilationSpec::Kernel::Square};
    const auto costs = cost_matrix(preds, gt3, w, dil);
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        const double expect = w.w_cls * classification_cost(preds[j], gt3[i].cls) +
                              w.w_ce * ce_cost(preds[j].mask.bitmap, gt3[i].bitmap, dil) +
                              w.w_dice * dice_cost(preds[j].mask.bitmap, gt3[i].bitmap, dil);
        CHECK(costs(j, i) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("assignment") {
  SUBCASE("single pair") {
    CostMatrix m(1, 1);
    m << 3.0;
    const auto a = assign(m);
    REQUIRE(a.pairs.size() == 1);
    CHECK(a.pairs[0] == std::pair<int, int>{0, 0});
  }

  SUBCASE("diagonal dominance") {
    CostMatrix m(2, 2);
    m << 0, 9, 9, 0;
    const auto a = assign(m);
    REQUIRE(a.pairs.size() == 2);
    CHECK(a.pairs[0] == std::pair<int, int>{0, 0});
    CHECK(a.pairs[1] == std::pair<int, int>{1, 1});
  }

  SUBCASE("random 6x6 equals permutation brute force") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
      CostMatrix m(6, 6);
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) m(r, c) = rng.uniform(-5, 5);
      }
      const auto a = assign(m);
      double total = 0.0;
      for (const auto& [p, g] : a.pairs) total += m(p, g);
      CHECK(total == doctest::Approx(oracles::brute_force_assignment(m)).epsilon(1e-9));
    }
  }

  SUBCASE("rectangular matrices match brute force and report the unmatched") {
    Rng rng(43);
    for (int trial = 0; trial < 40; ++trial) {
      const int p = rng.uniform_int(1, 6), g = rng.uniform_int(1, 6);
      CostMatrix m(p, g);
      for (int r = 0; r < p; ++r) {
        for (int c = 0; c < g; ++c) m(r, c) = rng.uniform(-3, 3);
      }
      const auto a = assign(m);
      CHECK(static_cast<int>(a.pairs.size()) == std::min(p, g));
      CHECK(a.unmatched_preds.size() == static_cast<size_t>(p) - a.pairs.size());
      CHECK(a.unmatched_gts.size() == static_cast<size_t>(g) - a.pairs.size());
      double total = 0.0;
      for (const auto& [pi, gi] : a.pairs) total += m(pi, gi);
      CHECK(total == doctest::Approx(oracles::brute_force_assignment(m)).epsilon(1e-9));
    }
  }

  SUBCASE("constant shift keeps the argmin") {
    Rng rng(53);
    CostMatrix m(5, 5);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 5; ++c) m(r, c) = rng.uniform(0, 10);
    }
    const auto base = assign(m);
    const CostMatrix shifted = m.array() + 17.5;
    CHECK(assign(shifted).pairs == base.pairs);
  }

  SUBCASE("empty and non-finite") {
    CHECK(assign(CostMatrix(0, 0)).pairs.empty());
    const auto a = assign(CostMatrix(0, 3));
    CHECK(a.unmatched_gts.size() == 3);
    CostMatrix bad(1, 1);
    bad << std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(assign(bad), Error);
  }
}

TEST_CASE("dilated matching flips the elongated-instance assignment") {
  // Ground truth: vertical line. Prediction A: parallel line 3 px away, no
  // overlap but small Chamfer distance. Prediction B: crossing line with a
  // few shared pixels yet a larger Chamfer distance. Undilated costs pick
  // B; with radius >= 2 the parallel neighbour wins.
  GridSpec g;
  g.x_min = g.y_min = 0.0;
  g.x_max = g.y_max = 9.0;
  g.resolution = 0.15;  // 60x60 px

  VectorInstance gt_vec, a_vec, b_vec;
  gt_vec.cls = a_vec.cls = b_vec.cls = MapClass::Divider;
  gt_vec.points = {{4.5, 0.3}, {4.5, 8.7}};
  a_vec.points = {{4.95, 0.3}, {4.95, 8.7}};          // 3 px to the right
  b_vec.points = {{2.0, 2.0}, {7.0, 7.0}};            // crosses the gt line

  const auto gt_mask = rasterize_polyline(gt_vec.points, g);
  const std::vector<InstanceMask> gts{InstanceMask{MapClass::Divider, gt_mask.bitmap, 1.0}};
  std::vector<Prediction> preds{
      pred_of(rasterize_polyline(a_vec.points, g).bitmap, {1, 0, 0}),
      pred_of(rasterize_polyline(b_vec.points, g).bitmap, {1, 0, 0}),
  };

  // A is geometrically closer but shares no pixels; B overlaps.
  CHECK(chamfer(a_vec, gt_vec) < chamfer(b_vec, gt_vec));
  CHECK(dice_cost(preds[0].mask.bitmap, gts[0].bitmap, kNoDilation) >
        dice_cost(preds[1].mask.bitmap, gts[0].bitmap, kNoDilation));

  const CostWeights w;
  const auto plain = assign(cost_matrix(preds, gts, w, kNoDilation));
  REQUIRE(plain.pairs.size() == 1);
  CHECK(plain.pairs[0].first == 1);  // overlapping-but-farther wins undilated

  for (int radius = 2; radius <= 4; ++radius) {
    const auto dilated = assign(cost_matrix(preds, gts, w, {radius, DilationSpec::Kernel::Square}));
    REQUIRE(dilated.pairs.size() == 1);
    CHECK(dilated.pairs[0].first == 0);  // parallel neighbour wins dilated
  }
}
