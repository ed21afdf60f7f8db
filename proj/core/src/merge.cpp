#include "uavgen/merge.hpp"

#include <algorithm>

#include "uavgen/error.hpp"

namespace uavgen {

std::vector<MergePlan> plan_mosaic(const std::vector<PatchInput>& patches,
                                   std::uint32_t canvas_w,
                                   std::uint32_t canvas_h) {
  for (const auto& p : patches) {
    if (p.width > canvas_w || p.height > canvas_h) {
      fail(ErrorKind::patch_larger_than_canvas,
           "patch " + p.patch_id + " exceeds mosaic canvas");
    }
  }

  std::vector<MergePlan> plans;
  std::uint32_t x = 0, y = 0, row_h = 0;
  auto open_canvas = [&] {
    MergePlan plan;
    plan.mode = MergeMode::mosaic;
    plan.canvas_w = canvas_w;
    plan.canvas_h = canvas_h;
    plans.push_back(plan);
    x = 0;
    y = 0;
    row_h = 0;
  };

  for (const auto& p : patches) {
    if (plans.empty()) open_canvas();
    if (x + p.width > canvas_w) {  // next row
      y += row_h;
      x = 0;
      row_h = 0;
    }
    if (y + p.height > canvas_h) open_canvas();
    plans.back().placements.push_back({p.patch_id, x, y});
    x += p.width;
    row_h = std::max(row_h, p.height);
  }
  return plans;
}

std::vector<MergePlan> plan_paste_back(
    const std::vector<PatchInput>& patches,
    const std::map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>>&
        source_sizes) {
  std::map<std::uint64_t, MergePlan> by_source;
  for (const auto& p : patches) {
    auto it = source_sizes.find(p.source_image_id);
    if (it == source_sizes.end()) {
      fail(ErrorKind::missing_patch,
           "no source size for image " + std::to_string(p.source_image_id));
    }
    MergePlan& plan = by_source[p.source_image_id];
    plan.mode = MergeMode::paste_back;
    plan.source_image_id = p.source_image_id;
    plan.canvas_w = it->second.first;
    plan.canvas_h = it->second.second;
    plan.placements.push_back({p.patch_id, p.window_x, p.window_y});
  }
  std::vector<MergePlan> plans;
  plans.reserve(by_source.size());
  for (auto& [id, plan] : by_source) plans.push_back(std::move(plan));
  return plans;
}

MergeOutput execute_merge(
    const MergePlan& plan,
    const std::map<std::string, const RasterImage*>& patch_images,
    const std::map<std::string, const std::vector<Annotation>*>& patch_labels,
    const RasterImage* source_image,
    const std::vector<Annotation>* source_annotations) {
  MergeOutput out;
  if (plan.mode == MergeMode::mosaic) {
    out.image = RasterImage(plan.canvas_w, plan.canvas_h, 0);
  } else {
    if (!source_image) {
      fail(ErrorKind::missing_patch, "paste_back without source image");
    }
    if (source_image->width != plan.canvas_w ||
        source_image->height != plan.canvas_h) {
      fail(ErrorKind::size_mismatch, "source image size differs from plan");
    }
    out.image = *source_image;
  }

  // Validate placements: inside canvas, and pairwise disjoint for mosaic.
  std::vector<BBox> placed;
  for (const auto& pl : plan.placements) {
    auto it = patch_images.find(pl.patch_id);
    if (it == patch_images.end() || !it->second) {
      fail(ErrorKind::missing_patch, "patch " + pl.patch_id + " unavailable");
    }
    const RasterImage& patch = *it->second;
    if (pl.origin_x + patch.width > plan.canvas_w ||
        pl.origin_y + patch.height > plan.canvas_h) {
      fail(ErrorKind::size_mismatch,
           "patch " + pl.patch_id + " exceeds canvas at its origin");
    }
    const BBox rect{static_cast<double>(pl.origin_x),
                    static_cast<double>(pl.origin_y),
                    static_cast<double>(patch.width),
                    static_cast<double>(patch.height)};
    if (plan.mode == MergeMode::mosaic) {
      for (const BBox& prev : placed) {
        if (intersection_area(prev, rect) > 0.0) {
          fail(ErrorKind::overlap_in_mosaic_plan,
               "mosaic placements overlap at patch " + pl.patch_id);
        }
      }
    }
    placed.push_back(rect);
  }

  for (std::size_t i = 0; i < plan.placements.size(); ++i) {
    const Placement& pl = plan.placements[i];
    const RasterImage& patch = *patch_images.at(pl.patch_id);
    paste(out.image, patch, pl.origin_x, pl.origin_y);

    auto lit = patch_labels.find(pl.patch_id);
    if (lit != patch_labels.end() && lit->second) {
      for (Annotation a : *lit->second) {
        a.bbox.x += pl.origin_x;
        a.bbox.y += pl.origin_y;
        out.annotations.push_back(a);
      }
    }
  }

  if (plan.mode == MergeMode::paste_back && source_annotations) {
    // Source labels overlapping any pasted window point at overwritten
    // pixels; keep only the wholly-outside ones.
    for (const Annotation& a : *source_annotations) {
      bool touched = false;
      for (const BBox& rect : placed) {
        if (intersection_area(rect, a.bbox) > 0.0) {
          touched = true;
          break;
        }
      }
      if (!touched) out.annotations.push_back(a);
    }
  }
  return out;
}

}  // namespace uavgen
