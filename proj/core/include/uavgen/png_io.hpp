#pragma once

#include <string>

#include "uavgen/raster.hpp"

namespace uavgen {

// 8-bit RGB PNG. Reads convert gray/palette/alpha inputs to plain RGB.
RasterImage read_png(const std::string& path);
void write_png(const RasterImage& image, const std::string& path);

// Weight maps as 16-bit grayscale PNG, fixed point: stored = round(1000 * w).
void write_weight_png(const WeightMap& map, const std::string& path);
WeightMap read_weight_png(const std::string& path);

// Writes to <path>.tmp then renames, so a crashed run never leaves a
// truncated file at the final path.
void write_png_atomic(const RasterImage& image, const std::string& path);

}  // namespace uavgen
