#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uavgen/prototype.hpp"
#include "uavgen/raster.hpp"
#include "uavgen/types.hpp"

namespace uavgen {

struct ObjectCondition {
  BBox bbox;
  std::uint32_t class_id = 0;
  std::string prompt;
  std::vector<double> fourier;  // 8 * L entries
  std::string prototype_ref;
};

// Everything an external generator consumes for one patch.
struct ConditionBundle {
  std::string patch_id;
  std::uint32_t canvas_w = 0;
  std::uint32_t canvas_h = 0;
  std::vector<RasterImage> per_object_canvases;
  RasterImage flattened_canvas;
  std::string global_prompt;
  std::vector<ObjectCondition> objects;
  WeightMap weight_map;
};

// For each layout object, samples a class prototype with the seeded RNG and
// paints it rescaled onto a zero canvas (one canvas per object). The
// flattened canvas paints all objects in descending box-area order so
// smaller boxes end up on top. Returns the sampled prototype index per
// object alongside the canvases.
struct ComposeResult {
  std::vector<RasterImage> per_object;
  RasterImage flattened;
  std::vector<std::size_t> prototype_indices;
};
ComposeResult compose_canvases(const std::vector<Annotation>& layout,
                               const PrototypeBank& bank,
                               std::uint32_t canvas_w, std::uint32_t canvas_h,
                               std::uint64_t seed);

// Global prompt "An aerial image with {c1},{c2},...,{cn}." (layout order,
// duplicates kept) and per-object prompts "An aerial image of {cj}.".
std::pair<std::string, std::vector<std::string>> build_prompts(
    const std::vector<Annotation>& layout,
    const std::map<std::uint32_t, std::string>& categories);

// Fourier features of the canvas-normalized xywh: for each frequency band k
// and each coordinate v, sin(2^k * pi * v) and cos(2^k * pi * v). Bands are
// the outer dimension, so growing L appends entries without changing the
// existing prefix.
std::vector<double> fourier_embed(const BBox& box, std::uint32_t canvas_w,
                                  std::uint32_t canvas_h, std::uint32_t bands);

// Foreground weight map: w inside any layout box (pixel-center rule),
// 1 elsewhere; overlaps stay at w.
WeightMap build_weight_map(const std::vector<Annotation>& layout,
                           std::uint32_t canvas_w, std::uint32_t canvas_h,
                           double w);

// Builds the full bundle for one patch layout. The per-bundle RNG seed is
// hash(global_seed, patch_id).
ConditionBundle build_condition_bundle(
    const std::string& patch_id, const std::vector<Annotation>& layout,
    const std::map<std::uint32_t, std::string>& categories,
    const PrototypeBank& bank, std::uint32_t canvas_w, std::uint32_t canvas_h,
    std::uint32_t fourier_bands, double weight_w, std::uint64_t global_seed);

// Bundle manifest + canvas/weight PNGs under dir/<patch_id>/. Returns the
// manifest path.
std::string save_condition_bundle(const ConditionBundle& bundle,
                                  const std::string& dir);
ConditionBundle load_condition_bundle(const std::string& manifest_path);

}  // namespace uavgen
