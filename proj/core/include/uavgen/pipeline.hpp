#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "uavgen/config.hpp"

namespace uavgen {

// Stage drivers behind the CLI subcommands. Each validates its inputs,
// writes its outputs under config.paths.output_dir, and returns the summary
// the CLI prints as JSON. All are deterministic for fixed (config, inputs);
// `jobs` only controls intra-stage parallelism.

nlohmann::json stage_select_prototypes(const PipelineConfig& config,
                                       std::uint32_t jobs);
nlohmann::json stage_extract_regions(const PipelineConfig& config,
                                     std::uint32_t jobs);
nlohmann::json stage_build_conditions(const PipelineConfig& config,
                                      std::uint32_t jobs);
nlohmann::json stage_generate(const PipelineConfig& config, std::uint32_t jobs);
nlohmann::json stage_refine(const PipelineConfig& config, std::uint32_t jobs);
nlohmann::json stage_merge(const PipelineConfig& config, std::uint32_t jobs);
nlohmann::json stage_report(const PipelineConfig& config);

}  // namespace uavgen
