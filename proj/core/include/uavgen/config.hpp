#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "uavgen/merge.hpp"
#include "uavgen/refine.hpp"

namespace uavgen {

// Whole-pipeline configuration. Loaded from a versioned JSON file; unknown
// keys are rejected so a mistyped threshold name cannot silently fall back
// to a default.
struct PipelineConfig {
  static constexpr int kSchemaVersion = 1;

  struct Paths {
    std::string dataset;       // COCO annotation file of the real dataset
    std::string images_dir;    // directory of the real images
    std::string detections;    // detector results on the real dataset
    std::string output_dir;    // root of all stage outputs
  } paths;

  struct Prototype {
    double tau_det = 0.5;
    double alpha = 0.5;
    double tau_lat_quantile = 0.5;
    std::string embedding_source = "builtin";  // "builtin" or embeddings file
  } prototype;

  struct Focal {
    std::uint32_t k_default = 3;
    std::uint32_t window_size = 256;
    std::optional<std::uint64_t> seed;  // defaults to global_seed
  } focal;

  struct Condition {
    std::uint32_t fourier_bands = 8;
    double weight_w = 2.0;
  } condition;

  struct Generator {
    std::string mode = "builtin";  // "builtin" or "external"
    std::string command;           // external only
    std::uint32_t parallelism = 1;
    std::uint32_t timeout_s = 120;
    std::string background = "zero";  // builtin: zero | solid:R,G,B | image:path
  } generator;

  struct Refine {
    double tau_ref = 0.5;
    double alpha = 0.1;
    double beta = 0.9;
    double gamma = 0.9;
    std::string detections_path;  // detections over the synthetic patches
    bool simulate = false;        // derive detections with the simulator
    double simulate_miss_rate = 0.0;
    double simulate_false_rate = 0.0;
    double simulate_jitter_std_px = 0.0;
  } refine;

  struct Merge {
    std::string mode = "mosaic";  // "mosaic" or "paste_back"
    std::uint32_t canvas_w = 1280;
    std::uint32_t canvas_h = 1280;
  } merge;

  std::uint64_t global_seed = 0;

  std::uint64_t focal_seed() const {
    return focal.seed.value_or(global_seed);
  }
  RefineConfig refine_config() const {
    return RefineConfig{refine.tau_ref, refine.alpha, refine.beta, refine.gamma};
  }
  MergeMode merge_mode() const;

  void validate() const;
};

PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& config, const std::string& path);

}  // namespace uavgen
