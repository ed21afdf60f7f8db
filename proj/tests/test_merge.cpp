#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "uavgen/error.hpp"
#include "uavgen/merge.hpp"

using uavgen::Annotation;
using uavgen::BBox;
using uavgen::MergeMode;
using uavgen::MergePlan;
using uavgen::PatchInput;
using uavgen::RasterImage;

namespace {

std::vector<PatchInput> square_patches(std::size_t n, std::uint32_t side) {
  std::vector<PatchInput> out;
  for (std::size_t i = 0; i < n; ++i) {
    PatchInput p;
    p.patch_id = "p" + std::to_string(i);
    p.width = side;
    p.height = side;
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("plan_mosaic packing arithmetic") {
  SUBCASE("25 default patches fill exactly one 1280 canvas") {
    const auto plans = plan_mosaic(square_patches(25, 256), 1280, 1280);
    REQUIRE(plans.size() == 1);
    CHECK(plans[0].placements.size() == 25);
    // 5x5 grid.
    CHECK(plans[0].placements[0].origin_x == 0);
    CHECK(plans[0].placements[4].origin_x == 1024);
    CHECK(plans[0].placements[5].origin_x == 0);
    CHECK(plans[0].placements[5].origin_y == 256);
    CHECK(plans[0].placements[24].origin_x == 1024);
    CHECK(plans[0].placements[24].origin_y == 1024);
  }
  SUBCASE("single patch at the origin") {
    const auto plans = plan_mosaic(square_patches(1, 256), 1280, 1280);
    REQUIRE(plans.size() == 1);
    CHECK(plans[0].placements[0].origin_x == 0);
    CHECK(plans[0].placements[0].origin_y == 0);
  }
  SUBCASE("26 patches spill into a second canvas") {
    const auto plans = plan_mosaic(square_patches(26, 256), 1280, 1280);
    REQUIRE(plans.size() == 2);
    CHECK(plans[0].placements.size() == 25);
    CHECK(plans[1].placements.size() == 1);
  }
  SUBCASE("oversized patch is rejected") {
    CHECK_THROWS_AS(plan_mosaic(square_patches(1, 2000), 1280, 1280),
                    uavgen::Error);
  }
  SUBCASE("placements are pairwise disjoint with mixed sizes") {
    uavgen::Rng rng(81);
    std::vector<PatchInput> patches;
    for (int i = 0; i < 40; ++i) {
      PatchInput p;
      p.patch_id = "p" + std::to_string(i);
      p.width = 30 + static_cast<std::uint32_t>(rng.next_below(200));
      p.height = 30 + static_cast<std::uint32_t>(rng.next_below(200));
      patches.push_back(p);
    }
    const auto plans = plan_mosaic(patches, 640, 640);
    std::size_t placed = 0;
    for (const auto& plan : plans) {
      std::vector<BBox> rects;
      for (const auto& pl : plan.placements) {
        std::uint32_t w = 0, h = 0;
        for (const auto& p : patches) {
          if (p.patch_id == pl.patch_id) {
            w = p.width;
            h = p.height;
          }
        }
        const BBox rect{static_cast<double>(pl.origin_x),
                        static_cast<double>(pl.origin_y),
                        static_cast<double>(w), static_cast<double>(h)};
        CHECK(rect.x2() <= 640.0);
        CHECK(rect.y2() <= 640.0);
        for (const auto& prev : rects) {
          CHECK(uavgen::intersection_area(prev, rect) == 0.0);
        }
        rects.push_back(rect);
        ++placed;
      }
    }
    CHECK(placed == patches.size());
  }
}

TEST_CASE("execute_merge mosaic") {
  uavgen::Rng rng(83);
  const RasterImage patch = testutil::random_image(rng, 64, 64);
  const std::vector<Annotation> labels{{0, BBox{5, 5, 10, 10}, 1},
                                       {0, BBox{20, 30, 8, 12}, 2}};

  MergePlan plan;
  plan.mode = MergeMode::mosaic;
  plan.canvas_w = 128;
  plan.canvas_h = 128;
  plan.placements = {{"p0", 0, 0}, {"p1", 64, 0}};

  const std::map<std::string, const RasterImage*> images{{"p0", &patch},
                                                         {"p1", &patch}};
  const std::map<std::string, const std::vector<Annotation>*> anns{
      {"p0", &labels}, {"p1", &labels}};

  const auto out = uavgen::execute_merge(plan, images, anns);
  SUBCASE("pixels land at the placements over a zero background") {
    for (std::uint32_t y = 0; y < 64; ++y) {
      for (std::uint32_t x = 0; x < 64; ++x) {
        for (int c = 0; c < 3; ++c) {
          CHECK(out.image.at(x, y, c) == patch.at(x, y, c));
          CHECK(out.image.at(x + 64, y, c) == patch.at(x, y, c));
          CHECK(out.image.at(x, y + 64, c) == 0);
        }
      }
    }
  }
  SUBCASE("annotation count is conserved and translated") {
    REQUIRE(out.annotations.size() == 4);
    CHECK(out.annotations[0].bbox.x == 5.0);
    CHECK(out.annotations[2].bbox.x == 69.0);  // translated by 64
    for (const auto& a : out.annotations) {
      CHECK(a.bbox.x >= 0.0);
      CHECK(a.bbox.x2() <= 128.0);
      CHECK(a.bbox.y2() <= 128.0);
    }
  }
  SUBCASE("overlapping mosaic placements are rejected") {
    MergePlan bad = plan;
    bad.placements = {{"p0", 0, 0}, {"p1", 32, 0}};
    CHECK_THROWS_AS(uavgen::execute_merge(bad, images, anns), uavgen::Error);
  }
  SUBCASE("missing patch is rejected") {
    MergePlan bad = plan;
    bad.placements = {{"zzz", 0, 0}};
    CHECK_THROWS_AS(uavgen::execute_merge(bad, images, anns), uavgen::Error);
  }
  SUBCASE("merging the same plan twice is bit-identical") {
    const auto again = uavgen::execute_merge(plan, images, anns);
    CHECK(again.image == out.image);
  }
}

TEST_CASE("execute_merge paste_back") {
  uavgen::Rng rng(85);
  const RasterImage source = testutil::random_image(rng, 200, 150);

  SUBCASE("pasting an unmodified crop reproduces the source") {
    const RasterImage patch = uavgen::crop(source, {40, 30, 64, 64});
    MergePlan plan;
    plan.mode = MergeMode::paste_back;
    plan.canvas_w = 200;
    plan.canvas_h = 150;
    plan.source_image_id = 1;
    plan.placements = {{"p0", 40, 30}};
    const std::map<std::string, const RasterImage*> images{{"p0", &patch}};
    const auto out = uavgen::execute_merge(plan, images, {}, &source, nullptr);
    CHECK(out.image == source);
  }
  SUBCASE("pixels inside the window come from the patch, outside from source") {
    const RasterImage patch = testutil::random_image(rng, 64, 64);
    MergePlan plan;
    plan.mode = MergeMode::paste_back;
    plan.canvas_w = 200;
    plan.canvas_h = 150;
    plan.source_image_id = 1;
    plan.placements = {{"p0", 40, 30}};
    const std::map<std::string, const RasterImage*> images{{"p0", &patch}};
    const auto out = uavgen::execute_merge(plan, images, {}, &source, nullptr);
    for (std::uint32_t y = 0; y < 150; ++y) {
      for (std::uint32_t x = 0; x < 200; ++x) {
        const bool inside = x >= 40 && x < 104 && y >= 30 && y < 94;
        for (int c = 0; c < 3; ++c) {
          if (inside) {
            CHECK(out.image.at(x, y, c) == patch.at(x - 40, y - 30, c));
          } else {
            CHECK(out.image.at(x, y, c) == source.at(x, y, c));
          }
        }
      }
    }
  }
  SUBCASE("source annotations: outside kept, intersecting dropped") {
    const RasterImage patch = testutil::random_image(rng, 64, 64);
    MergePlan plan;
    plan.mode = MergeMode::paste_back;
    plan.canvas_w = 200;
    plan.canvas_h = 150;
    plan.source_image_id = 1;
    plan.placements = {{"p0", 40, 30}};
    const std::vector<Annotation> patch_labels{{0, BBox{10, 10, 5, 5}, 1}};
    const std::vector<Annotation> source_labels{
        {1, BBox{150, 100, 20, 20}, 1},  // wholly outside the window
        {1, BBox{100, 90, 20, 20}, 1}};  // straddles the window edge
    const std::map<std::string, const RasterImage*> images{{"p0", &patch}};
    const std::map<std::string, const std::vector<Annotation>*> anns{
        {"p0", &patch_labels}};
    const auto out =
        uavgen::execute_merge(plan, images, anns, &source, &source_labels);
    REQUIRE(out.annotations.size() == 2);
    CHECK(out.annotations[0].bbox.x == 50.0);  // patch label translated
    CHECK(out.annotations[0].bbox.y == 40.0);
    CHECK(out.annotations[1].bbox.x == 150.0);  // kept source label
  }
  SUBCASE("size mismatch between plan and source is rejected") {
    MergePlan plan;
    plan.mode = MergeMode::paste_back;
    plan.canvas_w = 100;
    plan.canvas_h = 100;
    plan.source_image_id = 1;
    CHECK_THROWS_AS(uavgen::execute_merge(plan, {}, {}, &source, nullptr),
                    uavgen::Error);
  }
}

TEST_CASE("plan_paste_back groups by source image") {
  std::vector<PatchInput> patches;
  for (int i = 0; i < 4; ++i) {
    PatchInput p;
    p.patch_id = "p" + std::to_string(i);
    p.width = p.height = 64;
    p.source_image_id = (i < 2) ? 1 : 2;
    p.window_x = 10 * i;
    p.window_y = 5 * i;
    patches.push_back(p);
  }
  const std::map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> sizes{
      {1, {300, 200}}, {2, {400, 250}}};
  const auto plans = uavgen::plan_paste_back(patches, sizes);
  REQUIRE(plans.size() == 2);
  CHECK(plans[0].source_image_id == 1);
  CHECK(plans[0].placements.size() == 2);
  CHECK(plans[1].source_image_id == 2);
  CHECK(plans[1].canvas_w == 400);
}
