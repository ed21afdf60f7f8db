#include "uavgen/raster.hpp"

#include <algorithm>
#include <cmath>

#include "uavgen/error.hpp"

namespace uavgen {

PixelRect snap_rect(const BBox& box, std::uint32_t image_w, std::uint32_t image_h) {
  PixelRect r;
  r.w = std::max<std::int64_t>(1, std::llround(box.w));
  r.h = std::max<std::int64_t>(1, std::llround(box.h));
  r.w = std::min<std::int64_t>(r.w, image_w);
  r.h = std::min<std::int64_t>(r.h, image_h);
  r.x = std::clamp<std::int64_t>(std::llround(box.x), 0,
                                 static_cast<std::int64_t>(image_w) - r.w);
  r.y = std::clamp<std::int64_t>(std::llround(box.y), 0,
                                 static_cast<std::int64_t>(image_h) - r.h);
  return r;
}

namespace {

struct CoverageSpan {
  std::uint32_t begin = 0;           // first source index
  std::vector<double> weights;       // per source pixel, sums to 1
};

// For each destination index, the source pixels of the interval
// [d*scale, (d+1)*scale) weighted by overlap length.
std::vector<CoverageSpan> axis_coverage(std::uint32_t src_n, std::uint32_t dst_n) {
  std::vector<CoverageSpan> spans(dst_n);
  const double scale = static_cast<double>(src_n) / dst_n;
  for (std::uint32_t d = 0; d < dst_n; ++d) {
    const double lo = d * scale;
    const double hi = (d + 1) * scale;
    std::uint32_t first = static_cast<std::uint32_t>(lo);
    if (first >= src_n) first = src_n - 1;
    std::uint32_t last = static_cast<std::uint32_t>(std::ceil(hi)) - 1;
    if (last >= src_n) last = src_n - 1;
    CoverageSpan& s = spans[d];
    s.begin = first;
    s.weights.resize(last - first + 1);
    double total = 0.0;
    for (std::uint32_t i = first; i <= last; ++i) {
      const double overlap =
          std::min<double>(hi, i + 1.0) - std::max<double>(lo, i);
      s.weights[i - first] = std::max(overlap, 0.0);
      total += s.weights[i - first];
    }
    for (double& w : s.weights) w /= total;
  }
  return spans;
}

}  // namespace

std::vector<double> resample_area_f64(const RasterImage& src,
                                      std::uint32_t dst_w, std::uint32_t dst_h) {
  if (src.empty() || dst_w == 0 || dst_h == 0) {
    fail(ErrorKind::size_mismatch, "resample_area: empty source or target");
  }
  std::vector<double> dst(static_cast<std::size_t>(dst_w) * dst_h * 3, 0.0);
  const auto xs = axis_coverage(src.width, dst_w);
  const auto ys = axis_coverage(src.height, dst_h);

  for (std::uint32_t dy = 0; dy < dst_h; ++dy) {
    const CoverageSpan& sy = ys[dy];
    for (std::uint32_t dx = 0; dx < dst_w; ++dx) {
      const CoverageSpan& sx = xs[dx];
      double acc[3] = {0.0, 0.0, 0.0};
      for (std::size_t j = 0; j < sy.weights.size(); ++j) {
        const std::uint32_t yy = sy.begin + static_cast<std::uint32_t>(j);
        for (std::size_t i = 0; i < sx.weights.size(); ++i) {
          const std::uint32_t xx = sx.begin + static_cast<std::uint32_t>(i);
          const double w = sy.weights[j] * sx.weights[i];
          for (int c = 0; c < 3; ++c) acc[c] += w * src.at(xx, yy, c);
        }
      }
      double* out = &dst[(static_cast<std::size_t>(dy) * dst_w + dx) * 3];
      for (int c = 0; c < 3; ++c) out[c] = acc[c];
    }
  }
  return dst;
}

RasterImage resample_area(const RasterImage& src, std::uint32_t dst_w,
                          std::uint32_t dst_h) {
  if (src.width == dst_w && src.height == dst_h) return src;
  const std::vector<double> vals = resample_area_f64(src, dst_w, dst_h);
  RasterImage dst(dst_w, dst_h);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    dst.pixels[i] =
        static_cast<std::uint8_t>(std::clamp(std::lround(vals[i]), 0L, 255L));
  }
  return dst;
}

RasterImage crop(const RasterImage& src, const PixelRect& rect) {
  if (rect.x < 0 || rect.y < 0 || rect.w < 1 || rect.h < 1 ||
      rect.x + rect.w > static_cast<std::int64_t>(src.width) ||
      rect.y + rect.h > static_cast<std::int64_t>(src.height)) {
    fail(ErrorKind::window_out_of_bounds, "crop rect outside image");
  }
  RasterImage out(static_cast<std::uint32_t>(rect.w),
                  static_cast<std::uint32_t>(rect.h));
  for (std::int64_t y = 0; y < rect.h; ++y) {
    const std::uint8_t* row =
        &src.pixels[((rect.y + y) * src.width + rect.x) * 3];
    std::copy(row, row + rect.w * 3, &out.pixels[y * rect.w * 3]);
  }
  return out;
}

void paste(RasterImage& dst, const RasterImage& src, std::int64_t x,
           std::int64_t y) {
  if (x < 0 || y < 0 ||
      x + src.width > static_cast<std::int64_t>(dst.width) ||
      y + src.height > static_cast<std::int64_t>(dst.height)) {
    fail(ErrorKind::window_out_of_bounds, "paste rect outside image");
  }
  for (std::uint32_t sy = 0; sy < src.height; ++sy) {
    const std::uint8_t* row = &src.pixels[static_cast<std::size_t>(sy) * src.width * 3];
    std::copy(row, row + static_cast<std::size_t>(src.width) * 3,
              &dst.pixels[((y + sy) * dst.width + x) * 3]);
  }
}

}  // namespace uavgen
