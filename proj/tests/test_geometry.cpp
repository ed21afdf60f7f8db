#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "uavgen/geometry.hpp"
#include "uavgen/rng.hpp"

using uavgen::BBox;

TEST_CASE("iou identity and disjoint") {
  const BBox a{0, 0, 10, 10};
  CHECK(uavgen::iou(a, a) == 1.0);
  CHECK(uavgen::iou(a, BBox{20, 20, 5, 5}) == 0.0);
}

TEST_CASE("iou hand-computed overlap") {
  // intersection 5x10 = 50, union 100 + 100 - 50 = 150
  const double v = uavgen::iou(BBox{0, 0, 10, 10}, BBox{5, 0, 10, 10});
  CHECK(v == doctest::Approx(50.0 / 150.0).epsilon(1e-12));
}

TEST_CASE("iou symmetry and bounds on random boxes") {
  uavgen::Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const BBox a = testutil::random_box(rng, 300, 300);
    const BBox b = testutil::random_box(rng, 300, 300);
    const double ab = uavgen::iou(a, b);
    CHECK(ab == uavgen::iou(b, a));  // bitwise
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    if (ab == 0.0) CHECK(uavgen::intersection_area(a, b) == 0.0);
  }
  const BBox c{3, 4, 5, 6};
  CHECK(uavgen::iou(c, c) == 1.0);
}

TEST_CASE("contains semantics") {
  const BBox window{0, 0, 256, 256};
  CHECK(uavgen::contains(window, BBox{10, 10, 20, 20}));
  CHECK_FALSE(uavgen::contains(window, BBox{250, 10, 20, 20}));
  CHECK(uavgen::contains(window, BBox{0, 0, 256, 256}));  // boundary equality
}

TEST_CASE("contains implies iou equals area ratio") {
  uavgen::Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    const BBox window = testutil::random_box(rng, 400, 400, 50, 200);
    const double bw = rng.next_uniform(1.0, window.w);
    const double bh = rng.next_uniform(1.0, window.h);
    const BBox inner{window.x + rng.next_uniform(0.0, window.w - bw),
                     window.y + rng.next_uniform(0.0, window.h - bh), bw, bh};
    REQUIRE(uavgen::contains(window, inner));
    CHECK(uavgen::iou(window, inner) ==
          doctest::Approx(inner.area() / window.area()).epsilon(1e-12));
  }
}

TEST_CASE("fit_transform maps corners exactly") {
  SUBCASE("identity") {
    const auto t = uavgen::fit_transform(BBox{0, 0, 10, 10}, BBox{0, 0, 10, 10});
    CHECK(t.sx == 1.0);
    CHECK(t.sy == 1.0);
    CHECK(t.tx == 0.0);
    CHECK(t.ty == 0.0);
  }
  SUBCASE("scale and translate") {
    const auto t =
        uavgen::fit_transform(BBox{0, 0, 10, 20}, BBox{100, 50, 30, 40});
    CHECK(t.sx == doctest::Approx(3.0));
    CHECK(t.sy == doctest::Approx(2.0));
    double ox, oy;
    t.apply(0, 0, ox, oy);
    CHECK(ox == doctest::Approx(100.0));
    CHECK(oy == doctest::Approx(50.0));
    t.apply(10, 20, ox, oy);
    CHECK(ox == doctest::Approx(130.0));
    CHECK(oy == doctest::Approx(90.0));
  }
  SUBCASE("downscale with origin shift") {
    const auto t = uavgen::fit_transform(BBox{5, 5, 10, 10}, BBox{0, 0, 5, 5});
    CHECK(t.sx == doctest::Approx(0.5));
    double ox, oy;
    t.apply(5, 5, ox, oy);
    CHECK(ox == doctest::Approx(0.0));
    CHECK(oy == doctest::Approx(0.0));
  }
  SUBCASE("random corner property") {
    uavgen::Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
      const BBox src = testutil::random_box(rng, 500, 500);
      const BBox dst = testutil::random_box(rng, 500, 500);
      const auto t = uavgen::fit_transform(src, dst);
      const double corners[4][2] = {{src.x, src.y},
                                    {src.x2(), src.y},
                                    {src.x, src.y2()},
                                    {src.x2(), src.y2()}};
      const double expect[4][2] = {{dst.x, dst.y},
                                   {dst.x2(), dst.y},
                                   {dst.x, dst.y2()},
                                   {dst.x2(), dst.y2()}};
      for (int k = 0; k < 4; ++k) {
        double ox, oy;
        t.apply(corners[k][0], corners[k][1], ox, oy);
        CHECK(std::abs(ox - expect[k][0]) < 1e-9);
        CHECK(std::abs(oy - expect[k][1]) < 1e-9);
      }
    }
  }
}
