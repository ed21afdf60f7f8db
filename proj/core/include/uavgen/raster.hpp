#pragma once

#include <cstdint>
#include <vector>

#include "uavgen/geometry.hpp"

namespace uavgen {

// Interleaved 8-bit RGB image, row-major.
struct RasterImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3

  RasterImage() = default;
  RasterImage(std::uint32_t w, std::uint32_t h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::uint8_t& at(std::uint32_t x, std::uint32_t y, std::uint32_t c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }

  bool empty() const { return width == 0 || height == 0; }

  bool operator==(const RasterImage& o) const {
    return width == o.width && height == o.height && pixels == o.pixels;
  }
};

// Single-channel f64 raster (foreground weight maps).
struct WeightMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> values;  // width * height

  WeightMap() = default;
  WeightMap(std::uint32_t w, std::uint32_t h, double fill = 1.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double& at(std::uint32_t x, std::uint32_t y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  double at(std::uint32_t x, std::uint32_t y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

// Integer pixel rectangle used for crops and paints.
struct PixelRect {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t w = 0;
  std::int64_t h = 0;
};

// Rounds a real-valued box to a pixel rect of at least 1x1, shifted to stay
// inside a bound x bound image when the rounded extent overhangs.
PixelRect snap_rect(const BBox& box, std::uint32_t image_w, std::uint32_t image_h);

// Exact box-filter (area average) resampling; handles both up- and
// down-scaling by fractional pixel coverage.
RasterImage resample_area(const RasterImage& src, std::uint32_t dst_w,
                          std::uint32_t dst_h);

// Same filter without the final 8-bit rounding; interleaved RGB doubles of
// length dst_w * dst_h * 3.
std::vector<double> resample_area_f64(const RasterImage& src,
                                      std::uint32_t dst_w, std::uint32_t dst_h);

// Pixel-exact crop; rect must lie inside src.
RasterImage crop(const RasterImage& src, const PixelRect& rect);

// Copies src into dst with its top-left at (x, y); rect must fit.
void paste(RasterImage& dst, const RasterImage& src, std::int64_t x,
           std::int64_t y);

}  // namespace uavgen
