#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "test_util.hpp"
#include "uavgen/error.hpp"
#include "uavgen/focal.hpp"
#include "uavgen/rng.hpp"

using uavgen::BBox;
using uavgen::Point2;

TEST_CASE("kmeans with k = 1 returns the centroid") {
  const std::vector<Point2> points{{0, 0}, {2, 0}, {4, 6}};
  const auto result = uavgen::kmeans(points, 1, 5);
  REQUIRE(result.centers.size() == 1);
  CHECK(result.centers[0].first == doctest::Approx(2.0));
  CHECK(result.centers[0].second == doctest::Approx(2.0));
  for (auto a : result.assignment) CHECK(a == 0);
}

TEST_CASE("kmeans separates two blobs optimally") {
  // Two 3-point blobs far apart; optimum found by enumerating all
  // 2-partitions.
  const std::vector<Point2> points{{0, 0},   {1, 0},   {0, 1},
                                   {50, 50}, {51, 50}, {50, 51}};
  auto partition_cost = [&](std::uint32_t mask) {
    double cx[2] = {0, 0}, cy[2] = {0, 0};
    int n[2] = {0, 0};
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int side = (mask >> i) & 1;
      cx[side] += points[i].first;
      cy[side] += points[i].second;
      ++n[side];
    }
    if (n[0] == 0 || n[1] == 0) return 1e18;
    double cost = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int side = (mask >> i) & 1;
      const double dx = points[i].first - cx[side] / n[side];
      const double dy = points[i].second - cy[side] / n[side];
      cost += dx * dx + dy * dy;
    }
    return cost;
  };
  double best = 1e18;
  for (std::uint32_t mask = 1; mask < 63; ++mask) {
    best = std::min(best, partition_cost(mask));
  }
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto result = uavgen::kmeans(points, 2, seed);
    if (result.inertia <= best + 1e-9) ++wins;
  }
  CHECK(wins >= 95);
}

TEST_CASE("kmeans degenerate inputs") {
  SUBCASE("identical points have zero inertia") {
    const std::vector<Point2> points(5, {3.0, 4.0});
    const auto result = uavgen::kmeans(points, 3, 1);
    CHECK(result.inertia == 0.0);
  }
  SUBCASE("k larger than point count is clamped") {
    const std::vector<Point2> points{{0, 0}, {9, 9}};
    const auto result = uavgen::kmeans(points, 10, 1);
    CHECK(result.centers.size() == 2);
  }
}

TEST_CASE("kmeans inertia trace is non-increasing") {
  uavgen::Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point2> points;
    const std::size_t n = 2 + rng.next_below(40);
    for (std::size_t i = 0; i < n; ++i) {
      points.push_back({rng.next_uniform(0, 500), rng.next_uniform(0, 500)});
    }
    const auto result =
        uavgen::kmeans(points, 1 + static_cast<std::uint32_t>(rng.next_below(5)),
                       rng.next_u64());
    for (std::size_t i = 1; i < result.inertia_trace.size(); ++i) {
      CHECK(result.inertia_trace[i] <=
            result.inertia_trace[i - 1] * (1.0 + 1e-12) + 1e-9);
    }
    // Recomputable inertia invariant.
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& c = result.centers[result.assignment[i]];
      const double dx = points[i].first - c.first;
      const double dy = points[i].second - c.second;
      inertia += dx * dx + dy * dy;
    }
    CHECK(result.inertia == doctest::Approx(inertia).epsilon(1e-9));
  }
}

TEST_CASE("place_window single box") {
  const std::vector<BBox> boxes{{0, 0, 10, 10}};
  const auto [window, count] =
      uavgen::place_window({5, 5}, boxes, 256, 512, 512);
  CHECK(count == 1);
  CHECK(window.x == 0.0);
  CHECK(window.y == 0.0);
  CHECK(window.w == 256.0);
  CHECK(uavgen::contains(window, boxes[0]));
}

TEST_CASE("place_window with an uncontainable box") {
  const std::vector<BBox> boxes{{50, 50, 300, 300}};
  const auto [window, count] =
      uavgen::place_window({200, 200}, boxes, 256, 512, 512);
  CHECK(count == 0);
  // Window still contains the center and stays inside the image.
  CHECK(window.x <= 200.0);
  CHECK(window.x + 256.0 >= 200.0);
  CHECK(window.x >= 0.0);
  CHECK(window.x + window.w <= 512.0);
}

TEST_CASE("place_window rejects oversized windows") {
  CHECK_THROWS_AS(uavgen::place_window({5, 5}, {}, 256, 128, 512),
                  uavgen::Error);
}

TEST_CASE("place_window equals brute force on random instances") {
  uavgen::Rng rng(53);
  for (int trial = 0; trial < 150; ++trial) {
    const std::uint32_t image_w =
        80 + static_cast<std::uint32_t>(rng.next_below(120));
    const std::uint32_t image_h =
        80 + static_cast<std::uint32_t>(rng.next_below(120));
    const std::uint32_t size =
        32 + static_cast<std::uint32_t>(rng.next_below(
                 std::min(image_w, image_h) - 32 + 1));
    std::vector<BBox> boxes;
    const std::size_t n = rng.next_below(12);
    for (std::size_t i = 0; i < n; ++i) {
      boxes.push_back(testutil::random_int_box(rng, image_w, image_h, 2, 60));
    }
    const Point2 m{rng.next_uniform(0, image_w), rng.next_uniform(0, image_h)};
    const auto [window, count] =
        uavgen::place_window(m, boxes, size, image_w, image_h);
    const std::uint32_t want =
        testutil::brute_force_window_count(m, boxes, size, image_w, image_h);
    CHECK(count == want);
    // Feasibility invariants.
    CHECK(window.x >= 0.0);
    CHECK(window.y >= 0.0);
    CHECK(window.x + window.w <= image_w);
    CHECK(window.y + window.h <= image_h);
    CHECK(window.x <= m.first);
    CHECK(window.x + window.w >= m.first);
    CHECK(window.y <= m.second);
    CHECK(window.y + window.h >= m.second);
    // Returned count is achieved by the returned window.
    std::uint32_t recount = 0;
    for (const auto& b : boxes) {
      if (uavgen::contains(window, b)) ++recount;
    }
    CHECK(recount == count);
  }
}

namespace {

uavgen::Dataset focal_dataset(
    const std::vector<std::vector<BBox>>& boxes_per_image,
    std::uint32_t width = 512, std::uint32_t height = 512) {
  uavgen::Dataset ds;
  ds.categories[1] = "car";
  for (std::size_t i = 0; i < boxes_per_image.size(); ++i) {
    uavgen::ImageRecord rec;
    rec.id = i + 1;
    rec.width = width;
    rec.height = height;
    rec.file_path = "img.png";
    ds.images.push_back(rec);
    for (const auto& b : boxes_per_image[i]) {
      ds.annotations.push_back({rec.id, b, 1});
    }
  }
  ds.reindex();
  return ds;
}

}  // namespace

TEST_CASE("extract_focal_regions") {
  SUBCASE("image without annotations yields no regions") {
    const auto ds = focal_dataset({{}});
    CHECK(uavgen::extract_focal_regions(ds, 3, 256, 1).empty());
  }
  SUBCASE("single annotation with k_default 3 yields one region") {
    const auto ds = focal_dataset({{BBox{100, 100, 20, 20}}});
    const auto regions = uavgen::extract_focal_regions(ds, 3, 256, 1);
    REQUIRE(regions.size() == 1);
    REQUIRE(regions[0].contained.size() == 1);
    // Translated into the window frame and still contained.
    const auto& t = regions[0].contained[0].bbox;
    CHECK(t.x >= 0.0);
    CHECK(t.y >= 0.0);
    CHECK(t.x2() <= 256.0);
    CHECK(t.y2() <= 256.0);
  }
  SUBCASE("too-small images are skipped with a warning") {
    const auto ds = focal_dataset({{BBox{10, 10, 20, 20}}}, 128, 128);
    uavgen::ExtractStats stats;
    const auto regions = uavgen::extract_focal_regions(ds, 3, 256, 1, &stats);
    CHECK(regions.empty());
    CHECK(stats.images_skipped_too_small == 1);
  }
  SUBCASE("deterministic for a fixed seed") {
    uavgen::Rng rng(55);
    std::vector<std::vector<BBox>> per_image(4);
    for (auto& boxes : per_image) {
      const std::size_t n = 1 + rng.next_below(8);
      for (std::size_t i = 0; i < n; ++i) {
        boxes.push_back(testutil::random_int_box(rng, 512, 512, 8, 60));
      }
    }
    const auto ds = focal_dataset(per_image);
    const auto a = uavgen::extract_focal_regions(ds, 3, 256, 99);
    const auto b = uavgen::extract_focal_regions(ds, 3, 256, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].window == b[i].window);
      CHECK(a[i].image_id == b[i].image_id);
      CHECK(a[i].contained.size() == b[i].contained.size());
    }
  }
  SUBCASE("windows are deduplicated per image") {
    // All boxes in one tight cluster: all k centers give the same window.
    const auto ds = focal_dataset({{BBox{100, 100, 10, 10},
                                    BBox{112, 100, 10, 10},
                                    BBox{100, 112, 10, 10},
                                    BBox{112, 112, 10, 10}}});
    uavgen::ExtractStats stats;
    const auto regions = uavgen::extract_focal_regions(ds, 3, 256, 2, &stats);
    std::set<std::pair<double, double>> origins;
    for (const auto& r : regions) {
      CHECK(origins.insert({r.window.x, r.window.y}).second);
    }
  }
}

TEST_CASE("crop_region") {
  uavgen::Rng rng(57);
  const auto image = testutil::random_image(rng, 64, 48);
  SUBCASE("full-image window is identity") {
    uavgen::FocalRegion region;
    region.window = BBox{0, 0, 64, 48};
    CHECK(uavgen::crop_region(image, region) == image);
  }
  SUBCASE("out-of-bounds window is rejected") {
    uavgen::FocalRegion region;
    region.window = BBox{40, 20, 64, 48};
    CHECK_THROWS_AS(uavgen::crop_region(image, region), uavgen::Error);
  }
  SUBCASE("crop then paste back restores the source") {
    uavgen::FocalRegion region;
    region.window = BBox{8, 4, 32, 32};
    const auto patch = uavgen::crop_region(image, region);
    uavgen::RasterImage copy = image;
    uavgen::paste(copy, patch, 8, 4);
    CHECK(copy == image);
  }
}
