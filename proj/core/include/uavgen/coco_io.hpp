#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavgen/types.hpp"

namespace uavgen {

struct LoadStats {
  std::uint64_t clamped_boxes = 0;
  std::uint64_t dropped_boxes = 0;
  std::uint64_t clamped_scores = 0;
};

// Reads a COCO-format annotation file (objects "images", "annotations" with
// bbox [x,y,w,h], "categories"). Out-of-bounds boxes are clamped to the image
// extent; boxes that degenerate under clamping (or arrive degenerate) are
// dropped and counted in stats.
Dataset load_dataset(const std::string& path, LoadStats* stats = nullptr);

// Reads a COCO-results-format JSON array of
// {"image_id", "category_id", "bbox":[x,y,w,h], "score"}.
// Scores are clamped to [0,1]; clamps are counted in stats.
std::vector<Detection> load_detections(const std::string& path,
                                       LoadStats* stats = nullptr);

void save_dataset(const Dataset& dataset, const std::string& path);
void save_detections(const std::vector<Detection>& detections,
                     const std::string& path);

// Shared JSON file helpers (deterministic, sorted object keys).
nlohmann::json load_json(const std::string& path);
void save_json(const nlohmann::json& value, const std::string& path);

nlohmann::json bbox_to_json(const BBox& box);
BBox bbox_from_json(const nlohmann::json& value);

}  // namespace uavgen
