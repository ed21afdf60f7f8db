#include "uavgen/focal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "uavgen/error.hpp"
#include "uavgen/rng.hpp"

namespace uavgen {

namespace {

double sq_dist(const Point2& a, const Point2& b) {
  const double dx = a.first - b.first;
  const double dy = a.second - b.second;
  return dx * dx + dy * dy;
}

// Index of the nearest center; ties go to the lowest index.
std::uint32_t nearest_center(const Point2& p,
                             const std::vector<Point2>& centers) {
  std::uint32_t best = 0;
  double best_d = sq_dist(p, centers[0]);
  for (std::uint32_t c = 1; c < centers.size(); ++c) {
    const double d = sq_dist(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<Point2> kmeans_pp_seed(const std::vector<Point2>& points,
                                   std::uint32_t k, Rng& rng) {
  std::vector<Point2> centers;
  centers.reserve(k);
  centers.push_back(points[rng.next_below(points.size())]);
  std::vector<double> d2(points.size());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = sq_dist(points[i], centers[0]);
      for (std::size_t c = 1; c < centers.size(); ++c) {
        d2[i] = std::min(d2[i], sq_dist(points[i], centers[c]));
      }
      total += d2[i];
    }
    if (total <= 0.0) {
      // All points coincide with existing centers; any choice is equivalent.
      centers.push_back(points[rng.next_below(points.size())]);
      continue;
    }
    double r = rng.next_double() * total;
    std::size_t chosen = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      r -= d2[i];
      if (r <= 0.0) {
        chosen = i;
        break;
      }
    }
    centers.push_back(points[chosen]);
  }
  return centers;
}

}  // namespace

ClusterResult kmeans(const std::vector<Point2>& points, std::uint32_t k,
                     std::uint64_t seed, std::uint32_t max_iter, double tol) {
  if (points.empty()) {
    fail(ErrorKind::internal, "kmeans: no points");
  }
  if (k < 1) k = 1;
  if (k > points.size()) k = static_cast<std::uint32_t>(points.size());

  Rng rng(seed);
  ClusterResult res;
  res.centers = kmeans_pp_seed(points, k, rng);
  res.assignment.assign(points.size(), 0);

  for (std::uint32_t iter = 0; iter < max_iter; ++iter) {
    // Assignment step.
    for (std::size_t i = 0; i < points.size(); ++i) {
      res.assignment[i] = nearest_center(points[i], res.centers);
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      inertia += sq_dist(points[i], res.centers[res.assignment[i]]);
    }
    res.inertia = inertia;
    res.inertia_trace.push_back(inertia);

    // Update step.
    std::vector<Point2> next(res.centers.size(), {0.0, 0.0});
    std::vector<std::uint64_t> count(res.centers.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      next[res.assignment[i]].first += points[i].first;
      next[res.assignment[i]].second += points[i].second;
      ++count[res.assignment[i]];
    }
    for (std::size_t c = 0; c < next.size(); ++c) {
      if (count[c] > 0) {
        next[c].first /= static_cast<double>(count[c]);
        next[c].second /= static_cast<double>(count[c]);
      }
    }
    // Reseed empty clusters to the point farthest from its assigned center.
    for (std::size_t c = 0; c < next.size(); ++c) {
      if (count[c] > 0) continue;
      double worst = -1.0;
      std::size_t worst_i = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = sq_dist(points[i], res.centers[res.assignment[i]]);
        if (d > worst) {
          worst = d;
          worst_i = i;
        }
      }
      next[c] = points[worst_i];
    }

    double movement = 0.0;
    for (std::size_t c = 0; c < next.size(); ++c) {
      movement = std::max(movement, std::sqrt(sq_dist(next[c], res.centers[c])));
    }
    res.centers = std::move(next);
    if (movement < tol) break;
  }

  // Final assignment against the converged centers.
  for (std::size_t i = 0; i < points.size(); ++i) {
    res.assignment[i] = nearest_center(points[i], res.centers);
  }
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    inertia += sq_dist(points[i], res.centers[res.assignment[i]]);
  }
  res.inertia = inertia;
  res.inertia_trace.push_back(inertia);
  return res;
}

std::pair<BBox, std::uint32_t> place_window(const Point2& center,
                                            const std::vector<BBox>& boxes,
                                            std::uint32_t size,
                                            std::uint32_t image_w,
                                            std::uint32_t image_h) {
  if (size > image_w || size > image_h) {
    fail(ErrorKind::window_larger_than_image,
         "window size exceeds image extent");
  }
  const double s = static_cast<double>(size);
  const double mx = center.first;
  const double my = center.second;

  // Feasible real-valued origin domain: window must contain the center and
  // stay inside the image.
  const double xlo = std::max(0.0, mx - s);
  const double xhi = std::min(mx, static_cast<double>(image_w) - s);
  const double ylo = std::max(0.0, my - s);
  const double yhi = std::min(my, static_cast<double>(image_h) - s);

  // Each containable box contributes a closed rectangle of feasible origins.
  struct OriginRect {
    double x1, x2, y1, y2;
  };
  std::vector<OriginRect> rects;
  rects.reserve(boxes.size());
  for (const BBox& b : boxes) {
    if (b.w > s || b.h > s) continue;  // can never be fully contained
    OriginRect r{b.x + b.w - s, b.x, b.y + b.h - s, b.y};
    r.x1 = std::max(r.x1, xlo);
    r.x2 = std::min(r.x2, xhi);
    r.y1 = std::max(r.y1, ylo);
    r.y2 = std::min(r.y2, yhi);
    if (r.x1 <= r.x2 && r.y1 <= r.y2) rects.push_back(r);
  }

  // The optimum over integer origins is attained at the smallest integer
  // inside some rectangle (or the domain corner), so sweep those candidates
  // in ascending order; the first strict improvement fixes the smallest
  // (x, y) tie break.
  const std::int64_t ix_lo = static_cast<std::int64_t>(std::ceil(xlo));
  const std::int64_t ix_hi = static_cast<std::int64_t>(std::floor(xhi));
  const std::int64_t iy_lo = static_cast<std::int64_t>(std::ceil(ylo));
  const std::int64_t iy_hi = static_cast<std::int64_t>(std::floor(yhi));

  std::vector<std::int64_t> xs{ix_lo};
  for (const auto& r : rects) {
    const std::int64_t cx = static_cast<std::int64_t>(std::ceil(r.x1));
    if (cx >= ix_lo && cx <= ix_hi) xs.push_back(cx);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::uint32_t best_count = 0;
  std::int64_t best_x = ix_lo, best_y = iy_lo;
  std::vector<std::int64_t> ys;
  for (const std::int64_t x : xs) {
    ys.clear();
    ys.push_back(iy_lo);
    // Active rectangles at this x.
    std::vector<const OriginRect*> active;
    for (const auto& r : rects) {
      if (r.x1 <= static_cast<double>(x) && static_cast<double>(x) <= r.x2) {
        active.push_back(&r);
        const std::int64_t cy = static_cast<std::int64_t>(std::ceil(r.y1));
        if (cy >= iy_lo && cy <= iy_hi) ys.push_back(cy);
      }
    }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    // Sweep candidate ys with start/end events of the active intervals.
    std::vector<double> starts, ends;
    starts.reserve(active.size());
    ends.reserve(active.size());
    for (const auto* r : active) {
      starts.push_back(r->y1);
      ends.push_back(r->y2);
    }
    std::sort(starts.begin(), starts.end());
    std::sort(ends.begin(), ends.end());
    std::size_t si = 0, ei = 0;
    for (const std::int64_t y : ys) {
      const double fy = static_cast<double>(y);
      while (si < starts.size() && starts[si] <= fy) ++si;
      while (ei < ends.size() && ends[ei] < fy) ++ei;
      const std::uint32_t count = static_cast<std::uint32_t>(si - ei);
      if (count > best_count) {
        best_count = count;
        best_x = x;
        best_y = y;
      }
    }
  }

  const BBox window{static_cast<double>(best_x), static_cast<double>(best_y),
                    s, s};
  return {window, best_count};
}

std::vector<FocalRegion> extract_focal_regions(const Dataset& dataset,
                                               std::uint32_t k_default,
                                               std::uint32_t size,
                                               std::uint64_t seed,
                                               ExtractStats* stats) {
  ExtractStats local;
  ExtractStats& st = stats ? *stats : local;

  std::map<std::uint64_t, std::vector<Annotation>> by_image;
  for (const Annotation& a : dataset.annotations) {
    by_image[a.image_id].push_back(a);
  }

  std::vector<FocalRegion> out;
  for (const ImageRecord& image : dataset.images) {
    auto it = by_image.find(image.id);
    if (it == by_image.end()) continue;
    if (size > image.width || size > image.height) {
      ++st.images_skipped_too_small;
      continue;
    }
    const std::vector<Annotation>& anns = it->second;

    std::vector<Point2> centroids;
    centroids.reserve(anns.size());
    std::vector<BBox> boxes;
    boxes.reserve(anns.size());
    for (const Annotation& a : anns) {
      centroids.push_back({a.bbox.cx(), a.bbox.cy()});
      boxes.push_back(a.bbox);
    }

    const std::uint32_t k = std::min<std::uint32_t>(
        k_default, static_cast<std::uint32_t>(centroids.size()));
    const ClusterResult clusters =
        kmeans(centroids, k, hash_seed(seed, image.id));

    std::vector<std::pair<std::int64_t, std::int64_t>> seen;
    for (const Point2& m : clusters.centers) {
      // Cluster centers are means of in-image points, hence inside the image.
      auto [window, count] =
          place_window(m, boxes, size, image.width, image.height);
      const std::pair<std::int64_t, std::int64_t> origin{
          static_cast<std::int64_t>(window.x),
          static_cast<std::int64_t>(window.y)};
      if (std::find(seen.begin(), seen.end(), origin) != seen.end()) {
        ++st.regions_deduplicated;
        continue;
      }
      seen.push_back(origin);
      if (count == 0) {
        ++st.regions_empty_dropped;
        continue;
      }

      FocalRegion region;
      region.image_id = image.id;
      region.window = window;
      region.cluster_center = m;
      for (const Annotation& a : anns) {
        if (!contains(window, a.bbox)) continue;
        Annotation translated = a;
        translated.bbox.x -= window.x;
        translated.bbox.y -= window.y;
        region.contained.push_back(translated);
      }
      out.push_back(std::move(region));
    }
  }
  return out;
}

RasterImage crop_region(const RasterImage& image, const FocalRegion& region) {
  PixelRect rect;
  rect.x = static_cast<std::int64_t>(region.window.x);
  rect.y = static_cast<std::int64_t>(region.window.y);
  rect.w = static_cast<std::int64_t>(region.window.w);
  rect.h = static_cast<std::int64_t>(region.window.h);
  return crop(image, rect);
}

}  // namespace uavgen
