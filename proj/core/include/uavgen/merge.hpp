#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uavgen/raster.hpp"
#include "uavgen/types.hpp"

namespace uavgen {

enum class MergeMode { paste_back, mosaic };

struct Placement {
  std::string patch_id;
  std::uint32_t origin_x = 0;
  std::uint32_t origin_y = 0;
};

struct MergePlan {
  MergeMode mode = MergeMode::mosaic;
  std::uint32_t canvas_w = 0;  // mosaic: fresh canvas; paste_back: source size
  std::uint32_t canvas_h = 0;
  std::uint64_t source_image_id = 0;  // paste_back only
  std::vector<Placement> placements;
};

struct PatchInput {
  std::string patch_id;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint64_t source_image_id = 0;  // paste_back
  std::uint32_t window_x = 0;         // recorded focal window origin
  std::uint32_t window_y = 0;
};

// Shelf next-fit packing of patches into fresh canvases, in the given patch
// order: rows fill left to right, a new canvas opens when the next row does
// not fit. Deterministic.
std::vector<MergePlan> plan_mosaic(const std::vector<PatchInput>& patches,
                                   std::uint32_t canvas_w,
                                   std::uint32_t canvas_h);

// One plan per source image; every patch lands at its recorded window origin.
std::vector<MergePlan> plan_paste_back(
    const std::vector<PatchInput>& patches,
    const std::map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>>&
        source_sizes);

struct MergeOutput {
  RasterImage image;
  std::vector<Annotation> annotations;  // image_id left to the caller
};

// Executes one plan. Mosaic: patches over a zero canvas, labels translated
// by placement origins. Paste-back: patches written into a copy of the
// source image; patch labels translated to source coordinates and source
// annotations wholly outside every pasted window retained.
MergeOutput execute_merge(
    const MergePlan& plan,
    const std::map<std::string, const RasterImage*>& patch_images,
    const std::map<std::string, const std::vector<Annotation>*>& patch_labels,
    const RasterImage* source_image = nullptr,
    const std::vector<Annotation>* source_annotations = nullptr);

}  // namespace uavgen
