#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavgen/condition.hpp"
#include "uavgen/raster.hpp"

namespace uavgen {

struct GenerationRequest {
  std::string patch_id;
  std::string bundle_manifest;
  std::string output_path;
};

struct GenerationResult {
  std::string patch_id;
  bool ok = false;
  std::string reason;      // set when !ok
  std::string image_path;  // set when ok
};

// Drives an external generator process over the file protocol:
//   argv = [command..., request_manifest, results_manifest]
// Requests are written as JSON Lines, split into contiguous batches run with
// bounded parallelism. A child that exits nonzero or times out fails its
// pending requests; missing or wrongly-sized outputs fail individually.
// Results always cover every request exactly once, in request order.
std::vector<GenerationResult> run_external(
    const std::vector<GenerationRequest>& requests, const std::string& command,
    std::uint32_t parallelism, std::uint32_t timeout_s,
    const std::string& work_dir);

struct Background {
  enum class Kind { zero, solid, image } kind = Kind::zero;
  std::uint8_t rgb[3] = {0, 0, 0};  // solid
  std::string image_path;           // image

  static Background parse(const std::string& text);
};

// Deterministic stand-in for a real generator (and the copy-paste baseline):
// paints the bundle's objects over the chosen background using the same
// order rule as the flattened canvas.
RasterImage run_builtin_compositor(const ConditionBundle& bundle,
                                   const Background& background,
                                   std::uint64_t seed);

}  // namespace uavgen
