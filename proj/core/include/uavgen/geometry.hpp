#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace uavgen {

// Axis-aligned box in COCO xywh convention: (x, y) is the top-left corner,
// w and h must be positive and finite.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x2() const { return x + w; }
  double y2() const { return y + h; }
  double area() const { return w * h; }
  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }

  bool valid() const {
    return w > 0.0 && h > 0.0 && std::isfinite(x) && std::isfinite(y) &&
           std::isfinite(w) && std::isfinite(h);
  }

  bool operator==(const BBox& o) const {
    return x == o.x && y == o.y && w == o.w && h == o.h;
  }
};

// Anisotropic scale + translation mapping one box onto another exactly.
struct AffineScale {
  double sx = 1.0;
  double sy = 1.0;
  double tx = 0.0;
  double ty = 0.0;

  void apply(double px, double py, double& ox, double& oy) const {
    ox = sx * px + tx;
    oy = sy * py + ty;
  }
};

inline double intersection_area(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x, b.x);
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

// Intersection-over-union in [0, 1]. Every subexpression is symmetric in
// (a, b), so the result is bitwise identical under operand swap.
inline double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

// True iff `box` lies entirely within `window`, boundaries included.
inline bool contains(const BBox& window, const BBox& box) {
  return box.x >= window.x && box.y >= window.y && box.x2() <= window.x2() &&
         box.y2() <= window.y2();
}

// Transform mapping src onto dst exactly (corners to corners).
inline AffineScale fit_transform(const BBox& src, const BBox& dst) {
  AffineScale t;
  t.sx = dst.w / src.w;
  t.sy = dst.h / src.h;
  t.tx = dst.x - t.sx * src.x;
  t.ty = dst.y - t.sy * src.y;
  return t;
}

}  // namespace uavgen
