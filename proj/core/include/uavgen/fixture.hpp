#pragma once

#include <cstdint>
#include <string>

#include "uavgen/types.hpp"

namespace uavgen {

// Writes a small self-contained detection dataset for demos and end-to-end
// tests: textured images with drawn rectangle objects, a COCO annotation
// file, and a simulated-detector results file.
//
// Layout under `dir`:
//   images/img_<id>.png
//   annotations.json
//   detections.json
struct FixtureSpec {
  std::uint32_t n_images = 20;
  std::uint32_t width = 512;
  std::uint32_t height = 384;
  std::uint32_t min_objects = 3;
  std::uint32_t max_objects = 8;
  std::uint64_t seed = 7;
};

Dataset make_synthetic_fixture(const std::string& dir, const FixtureSpec& spec);

}  // namespace uavgen
