#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "uavgen/raster.hpp"
#include "uavgen/types.hpp"

namespace uavgen {

using Point2 = std::pair<double, double>;

struct ClusterResult {
  std::vector<Point2> centers;
  std::vector<std::uint32_t> assignment;
  double inertia = 0.0;
  // Inertia measured after each assignment step; Lloyd guarantees this is
  // non-increasing.
  std::vector<double> inertia_trace;
};

// Lloyd's algorithm with k-means++ seeding. k is lowered to |points| when it
// exceeds it; empty clusters are reseeded to the point farthest from its
// assigned center. Stops when the largest center movement drops below tol.
ClusterResult kmeans(const std::vector<Point2>& points, std::uint32_t k,
                     std::uint64_t seed, std::uint32_t max_iter = 100,
                     double tol = 1e-6);

// A size x size window containing `center`, within an image of the given
// extent, maximizing the number of fully contained boxes. Exact over integer
// window origins; ties resolved to the smallest (x, then y) origin. Returns
// the window and the contained-box count.
std::pair<BBox, std::uint32_t> place_window(const Point2& center,
                                            const std::vector<BBox>& boxes,
                                            std::uint32_t size,
                                            std::uint32_t image_w,
                                            std::uint32_t image_h);

struct FocalRegion {
  std::uint64_t image_id = 0;
  BBox window;
  std::vector<Annotation> contained;  // translated into the window frame
  Point2 cluster_center{0.0, 0.0};
};

struct ExtractStats {
  std::uint64_t images_skipped_too_small = 0;
  std::uint64_t regions_deduplicated = 0;
  std::uint64_t regions_empty_dropped = 0;
};

// Per image: cluster box centroids with k = min(k_default, n_i), place one
// window per cluster center, deduplicate identical windows, and emit regions
// with annotations translated to the window frame. Only fully contained
// boxes are kept; regions containing none are dropped.
std::vector<FocalRegion> extract_focal_regions(const Dataset& dataset,
                                               std::uint32_t k_default,
                                               std::uint32_t size,
                                               std::uint64_t seed,
                                               ExtractStats* stats = nullptr);

// Pixel-exact crop of the region's window.
RasterImage crop_region(const RasterImage& image, const FocalRegion& region);

}  // namespace uavgen
