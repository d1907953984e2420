#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mapvec/geometry.hpp"
#include "mapvec/rng.hpp"
#include "mapvec/types.hpp"

using namespace mapvec;

namespace {

VectorInstance open_instance(std::vector<Eigen::Vector2d> pts) {
  VectorInstance v;
  v.points = std::move(pts);
  return v;
}

VectorInstance closed_instance(std::vector<Eigen::Vector2d> pts) {
  VectorInstance v;
  v.cls = MapClass::PedCross;
  v.closed = true;
  v.points = std::move(pts);
  return v;
}

}  // namespace

TEST_CASE("grid derives pixel dimensions") {
  GridSpec g;  // defaults: x [-15,15], y [-30,30], 0.15 m/px
  CHECK(g.width() == 200);
  CHECK(g.height() == 400);
  g.validate();

  GridSpec bad = g;
  bad.resolution = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = g;
  bad.x_max = bad.x_min;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("world_to_pixel floor semantics and clamping") {
  GridSpec g;
  bool inside = false;

  CHECK(world_to_pixel({g.x_min, g.y_min}, g, &inside) == Pixel{0, 0});
  CHECK(inside);

  CHECK(world_to_pixel({g.x_min + 0.5 * g.resolution, g.y_min}, g) == Pixel{0, 0});

  // floor((0-(-15))/0.15) = 100, floor((0-(-30))/0.15) = 200
  CHECK(world_to_pixel({0.0, 0.0}, g) == Pixel{200, 100});

  CHECK(world_to_pixel({g.x_max + 5.0, 0.0}, g, &inside).col == g.width() - 1);
  CHECK_FALSE(inside);
}

TEST_CASE("pixel round trip stays within half a cell") {
  GridSpec g;
  Rng rng(99);
  for (int k = 0; k < 500; ++k) {
    const Eigen::Vector2d p{rng.uniform(g.x_min, g.x_max), rng.uniform(g.y_min, g.y_max)};
    const Eigen::Vector2d q = pixel_to_world(world_to_pixel(p, g), g);
    CHECK(std::abs(q.x() - p.x()) <= g.resolution / 2 + 1e-12);
    CHECK(std::abs(q.y() - p.y()) <= g.resolution / 2 + 1e-12);
  }
}

TEST_CASE("canonicalize open instances") {
  const auto a = open_instance({{0, 0}, {1, 0}});
  CHECK(canonicalize(a).points == a.points);

  const auto b = open_instance({{1, 0}, {0, 0}});
  CHECK(canonicalize(b).points == a.points);

  CHECK_THROWS_AS(canonicalize(open_instance({{0, 0}})), Error);
}

TEST_CASE("canonicalize closed ring: rotation and orientation") {
  // Unit square from (1,1), clockwise.
  const auto cw = closed_instance({{1, 1}, {1, 0}, {0, 0}, {0, 1}});
  const auto canon = canonicalize(cw);
  const std::vector<Eigen::Vector2d> expect{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(canon.points == expect);
  CHECK(signed_area(canon.points) > 0);
}

TEST_CASE("canonicalize is idempotent and class-constant") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(2, 8);
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < n; ++i) {
      Eigen::Vector2d p{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      if (!pts.empty() && p == pts.back()) p.x() += 0.5;
      pts.push_back(p);
    }

    SUBCASE("") {}
    if (n >= 3 && rng.bernoulli(0.5)) {
      auto v = closed_instance(pts);
      const auto c1 = canonicalize(v);
      CHECK(canonicalize(c1).points == c1.points);
      const size_t k = static_cast<size_t>(rng.uniform_int(0, n - 1));
      std::rotate(v.points.begin(), v.points.begin() + k, v.points.end());
      CHECK(canonicalize(v).points == c1.points);
      std::reverse(v.points.begin(), v.points.end());
      CHECK(canonicalize(v).points == c1.points);
    } else {
      auto v = open_instance(pts);
      const auto c1 = canonicalize(v);
      CHECK(canonicalize(c1).points == c1.points);
      std::reverse(v.points.begin(), v.points.end());
      CHECK(canonicalize(v).points == c1.points);
    }
  }
}

TEST_CASE("clip_to_extent clamps and can collapse") {
  GridSpec g;
  Warnings w;
  auto v = open_instance({{-20, 0}, {0, 0}, {20, 35}});
  const auto clipped = clip_to_extent(v, g, &w);
  REQUIRE(clipped.has_value());
  CHECK(clipped->points.front() == Eigen::Vector2d{-15, 0});
  CHECK(clipped->points.back() == Eigen::Vector2d{15, 30});
  CHECK_FALSE(w.empty());

  auto gone = open_instance({{-20, -35}, {-16, -31}});
  CHECK_FALSE(clip_to_extent(gone, g).has_value());
}

TEST_CASE("instance validation catches malformed input") {
  auto dup = open_instance({{0, 0}, {0, 0}});
  CHECK_THROWS_AS(dup.validate(), Error);
  auto conf = open_instance({{0, 0}, {1, 1}});
  conf.confidence = 1.5;
  CHECK_THROWS_AS(conf.validate(), Error);
  auto ring = closed_instance({{0, 0}, {1, 1}});
  CHECK_THROWS_AS(ring.validate(), Error);
}

TEST_CASE("scene validation requires points inside the extent") {
  Scene s;
  s.gt_vectors.push_back(open_instance({{0, 0}, {1, 1}}));
  validate_scene(s);
  s.gt_vectors.push_back(open_instance({{0, 0}, {99, 0}}));
  CHECK_THROWS_AS(validate_scene(s), Error);
}
