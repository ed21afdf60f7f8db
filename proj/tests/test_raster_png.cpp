#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "uavgen/error.hpp"
#include "uavgen/png_io.hpp"
#include "uavgen/raster.hpp"

using uavgen::PixelRect;
using uavgen::RasterImage;

namespace {

RasterImage gradient4x4() {
  RasterImage img(4, 4);
  for (std::uint32_t y = 0; y < 4; ++y) {
    for (std::uint32_t x = 0; x < 4; ++x) {
      for (std::uint32_t c = 0; c < 3; ++c) {
        img.at(x, y, c) = static_cast<std::uint8_t>(16 * (y * 4 + x) + c);
      }
    }
  }
  return img;
}

}  // namespace

TEST_CASE("crop extracts the exact block") {
  const RasterImage img = gradient4x4();
  const RasterImage block = uavgen::crop(img, PixelRect{0, 0, 2, 2});
  for (std::uint32_t y = 0; y < 2; ++y) {
    for (std::uint32_t x = 0; x < 2; ++x) {
      for (std::uint32_t c = 0; c < 3; ++c) {
        CHECK(block.at(x, y, c) == img.at(x, y, c));
      }
    }
  }
  CHECK_THROWS_AS(uavgen::crop(img, PixelRect{2, 2, 4, 4}), uavgen::Error);
}

TEST_CASE("crop then paste restores the original") {
  uavgen::Rng rng(3);
  RasterImage img = testutil::random_image(rng, 32, 24);
  const RasterImage original = img;
  const PixelRect rect{5, 7, 12, 9};
  const RasterImage patch = uavgen::crop(img, rect);
  uavgen::paste(img, patch, rect.x, rect.y);
  CHECK(img == original);
}

TEST_CASE("resample identity returns the input") {
  uavgen::Rng rng(5);
  const RasterImage img = testutil::random_image(rng, 17, 9);
  CHECK(uavgen::resample_area(img, 17, 9) == img);
}

TEST_CASE("integer-factor downscale averages blocks exactly") {
  RasterImage img(4, 4);
  // 2x2 blocks of constant values 10, 20, 30, 40.
  const std::uint8_t blocks[2][2] = {{10, 20}, {30, 40}};
  for (std::uint32_t y = 0; y < 4; ++y) {
    for (std::uint32_t x = 0; x < 4; ++x) {
      for (std::uint32_t c = 0; c < 3; ++c) {
        img.at(x, y, c) = blocks[y / 2][x / 2];
      }
    }
  }
  const RasterImage small = uavgen::resample_area(img, 2, 2);
  CHECK(small.at(0, 0, 0) == 10);
  CHECK(small.at(1, 0, 0) == 20);
  CHECK(small.at(0, 1, 0) == 30);
  CHECK(small.at(1, 1, 0) == 40);
}

TEST_CASE("fractional resample matches the scatter oracle") {
  uavgen::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t sw = 3 + static_cast<std::uint32_t>(rng.next_below(30));
    const std::uint32_t sh = 3 + static_cast<std::uint32_t>(rng.next_below(30));
    const std::uint32_t dw = 1 + static_cast<std::uint32_t>(rng.next_below(40));
    const std::uint32_t dh = 1 + static_cast<std::uint32_t>(rng.next_below(40));
    const RasterImage src = testutil::random_image(rng, sw, sh);
    const auto got = uavgen::resample_area_f64(src, dw, dh);
    const auto want = testutil::scatter_resample(src, dw, dh);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("snap_rect keeps boxes inside and at least 1x1") {
  const PixelRect r = uavgen::snap_rect(uavgen::BBox{0.6, 0.4, 9.6, 9.6}, 10, 10);
  CHECK(r.w == 10);
  CHECK(r.h == 10);
  CHECK(r.x == 0);
  CHECK(r.y == 0);
  const PixelRect tiny = uavgen::snap_rect(uavgen::BBox{3.0, 3.0, 0.3, 0.2}, 10, 10);
  CHECK(tiny.w == 1);
  CHECK(tiny.h == 1);
}

TEST_CASE("PNG round trip preserves pixels") {
  testutil::TempDir tmp("png");
  uavgen::Rng rng(9);
  const RasterImage img = testutil::random_image(rng, 41, 23);
  uavgen::write_png(img, tmp.file("a.png"));
  CHECK(uavgen::read_png(tmp.file("a.png")) == img);
}

TEST_CASE("weight map PNG stores milli-units") {
  testutil::TempDir tmp("wpng");
  uavgen::WeightMap map(7, 5, 1.0);
  map.at(3, 2) = 2.0;
  map.at(0, 0) = 1.5;
  uavgen::write_weight_png(map, tmp.file("w.png"));
  const uavgen::WeightMap back = uavgen::read_weight_png(tmp.file("w.png"));
  REQUIRE(back.width == 7);
  REQUIRE(back.height == 5);
  CHECK(back.at(3, 2) == doctest::Approx(2.0));
  CHECK(back.at(0, 0) == doctest::Approx(1.5));
  CHECK(back.at(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("atomic write leaves no temp file") {
  testutil::TempDir tmp("atomic");
  uavgen::Rng rng(10);
  uavgen::write_png_atomic(testutil::random_image(rng, 8, 8), tmp.file("x.png"));
  CHECK(std::filesystem::exists(tmp.file("x.png")));
  CHECK_FALSE(std::filesystem::exists(tmp.file("x.png.tmp")));
}
