#include "uavgen/config.hpp"

#include <set>

#include <json.hpp>

#include "uavgen/coco_io.hpp"
#include "uavgen/error.hpp"

namespace uavgen {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      fail(ErrorKind::config_error,
           "unknown config key '" + where + key + "'");
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

}  // namespace

MergeMode PipelineConfig::merge_mode() const {
  if (merge.mode == "mosaic") return MergeMode::mosaic;
  if (merge.mode == "paste_back") return MergeMode::paste_back;
  fail(ErrorKind::config_error, "merge.mode must be mosaic or paste_back");
}

void PipelineConfig::validate() const {
  auto in_unit = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) {
      fail(ErrorKind::config_error, std::string(name) + " must lie in (0,1]");
    }
  };
  in_unit(prototype.tau_det, "prototype.tau_det");
  if (!(prototype.alpha > 0.0 && prototype.alpha < 1.0)) {
    fail(ErrorKind::config_error, "prototype.alpha must lie in (0,1)");
  }
  in_unit(prototype.tau_lat_quantile, "prototype.tau_lat_quantile");
  if (focal.k_default < 1) {
    fail(ErrorKind::config_error, "focal.k_default must be >= 1");
  }
  if (focal.window_size < 1) {
    fail(ErrorKind::config_error, "focal.window_size must be >= 1");
  }
  if (condition.fourier_bands < 1) {
    fail(ErrorKind::config_error, "condition.fourier_bands must be >= 1");
  }
  if (condition.weight_w < 1.0) {
    fail(ErrorKind::config_error, "condition.weight_w must be >= 1");
  }
  if (generator.mode != "builtin" && generator.mode != "external") {
    fail(ErrorKind::config_error, "generator.mode must be builtin or external");
  }
  if (generator.mode == "external" && generator.command.empty()) {
    fail(ErrorKind::config_error, "generator.command required in external mode");
  }
  if (generator.parallelism < 1) {
    fail(ErrorKind::config_error, "generator.parallelism must be >= 1");
  }
  refine_config().validate();
  for (double r : {refine.simulate_miss_rate, refine.simulate_false_rate}) {
    if (r < 0.0 || r > 1.0) {
      fail(ErrorKind::config_error, "simulate rates must lie in [0,1]");
    }
  }
  if (refine.simulate_jitter_std_px < 0.0) {
    fail(ErrorKind::config_error, "simulate jitter must be >= 0");
  }
  merge_mode();
  if (merge.canvas_w < 1 || merge.canvas_h < 1) {
    fail(ErrorKind::config_error, "merge.canvas must be at least 1x1");
  }
}

PipelineConfig load_config(const std::string& path) {
  const json root = load_json(path);
  if (!root.is_object()) {
    fail(ErrorKind::config_error, path + ": config must be a JSON object");
  }
  reject_unknown_keys(root,
                      {"schema", "paths", "prototype", "focal", "condition",
                       "generator", "refine", "merge", "global_seed"},
                      "");
  if (!root.contains("schema") ||
      root.at("schema").get<int>() != PipelineConfig::kSchemaVersion) {
    fail(ErrorKind::config_error,
         path + ": missing or unsupported schema version (want " +
             std::to_string(PipelineConfig::kSchemaVersion) + ")");
  }

  PipelineConfig cfg;
  read_field(root, "global_seed", cfg.global_seed);

  if (root.contains("paths")) {
    const json& p = root.at("paths");
    reject_unknown_keys(p, {"dataset", "images_dir", "detections", "output_dir"},
                        "paths.");
    read_field(p, "dataset", cfg.paths.dataset);
    read_field(p, "images_dir", cfg.paths.images_dir);
    read_field(p, "detections", cfg.paths.detections);
    read_field(p, "output_dir", cfg.paths.output_dir);
  }
  if (root.contains("prototype")) {
    const json& p = root.at("prototype");
    reject_unknown_keys(
        p, {"tau_det", "alpha", "tau_lat_quantile", "embedding_source"},
        "prototype.");
    read_field(p, "tau_det", cfg.prototype.tau_det);
    read_field(p, "alpha", cfg.prototype.alpha);
    read_field(p, "tau_lat_quantile", cfg.prototype.tau_lat_quantile);
    read_field(p, "embedding_source", cfg.prototype.embedding_source);
  }
  if (root.contains("focal")) {
    const json& p = root.at("focal");
    reject_unknown_keys(p, {"k_default", "window_size", "seed"}, "focal.");
    read_field(p, "k_default", cfg.focal.k_default);
    read_field(p, "window_size", cfg.focal.window_size);
    if (p.contains("seed")) cfg.focal.seed = p.at("seed").get<std::uint64_t>();
  }
  if (root.contains("condition")) {
    const json& p = root.at("condition");
    reject_unknown_keys(p, {"fourier_bands", "weight_w"}, "condition.");
    read_field(p, "fourier_bands", cfg.condition.fourier_bands);
    read_field(p, "weight_w", cfg.condition.weight_w);
  }
  if (root.contains("generator")) {
    const json& p = root.at("generator");
    reject_unknown_keys(
        p, {"mode", "command", "parallelism", "timeout_s", "background"},
        "generator.");
    read_field(p, "mode", cfg.generator.mode);
    read_field(p, "command", cfg.generator.command);
    read_field(p, "parallelism", cfg.generator.parallelism);
    read_field(p, "timeout_s", cfg.generator.timeout_s);
    read_field(p, "background", cfg.generator.background);
  }
  if (root.contains("refine")) {
    const json& p = root.at("refine");
    reject_unknown_keys(p,
                        {"tau_ref", "alpha", "beta", "gamma", "detections_path",
                         "simulate", "simulate_miss_rate", "simulate_false_rate",
                         "simulate_jitter_std_px"},
                        "refine.");
    read_field(p, "tau_ref", cfg.refine.tau_ref);
    read_field(p, "alpha", cfg.refine.alpha);
    read_field(p, "beta", cfg.refine.beta);
    read_field(p, "gamma", cfg.refine.gamma);
    read_field(p, "detections_path", cfg.refine.detections_path);
    read_field(p, "simulate", cfg.refine.simulate);
    read_field(p, "simulate_miss_rate", cfg.refine.simulate_miss_rate);
    read_field(p, "simulate_false_rate", cfg.refine.simulate_false_rate);
    read_field(p, "simulate_jitter_std_px", cfg.refine.simulate_jitter_std_px);
  }
  if (root.contains("merge")) {
    const json& p = root.at("merge");
    reject_unknown_keys(p, {"mode", "canvas"}, "merge.");
    read_field(p, "mode", cfg.merge.mode);
    if (p.contains("canvas")) {
      const json& c = p.at("canvas");
      if (!c.is_array() || c.size() != 2) {
        fail(ErrorKind::config_error, "merge.canvas must be [w,h]");
      }
      cfg.merge.canvas_w = c.at(0).get<std::uint32_t>();
      cfg.merge.canvas_h = c.at(1).get<std::uint32_t>();
    }
  }

  cfg.validate();
  return cfg;
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
  json root{
      {"schema", PipelineConfig::kSchemaVersion},
      {"paths",
       {{"dataset", cfg.paths.dataset},
        {"images_dir", cfg.paths.images_dir},
        {"detections", cfg.paths.detections},
        {"output_dir", cfg.paths.output_dir}}},
      {"prototype",
       {{"tau_det", cfg.prototype.tau_det},
        {"alpha", cfg.prototype.alpha},
        {"tau_lat_quantile", cfg.prototype.tau_lat_quantile},
        {"embedding_source", cfg.prototype.embedding_source}}},
      {"focal",
       {{"k_default", cfg.focal.k_default},
        {"window_size", cfg.focal.window_size}}},
      {"condition",
       {{"fourier_bands", cfg.condition.fourier_bands},
        {"weight_w", cfg.condition.weight_w}}},
      {"generator",
       {{"mode", cfg.generator.mode},
        {"command", cfg.generator.command},
        {"parallelism", cfg.generator.parallelism},
        {"timeout_s", cfg.generator.timeout_s},
        {"background", cfg.generator.background}}},
      {"refine",
       {{"tau_ref", cfg.refine.tau_ref},
        {"alpha", cfg.refine.alpha},
        {"beta", cfg.refine.beta},
        {"gamma", cfg.refine.gamma},
        {"detections_path", cfg.refine.detections_path},
        {"simulate", cfg.refine.simulate},
        {"simulate_miss_rate", cfg.refine.simulate_miss_rate},
        {"simulate_false_rate", cfg.refine.simulate_false_rate},
        {"simulate_jitter_std_px", cfg.refine.simulate_jitter_std_px}}},
      {"merge",
       {{"mode", cfg.merge.mode},
        {"canvas", {cfg.merge.canvas_w, cfg.merge.canvas_h}}}},
      {"global_seed", cfg.global_seed}};
  if (cfg.focal.seed) root["focal"]["seed"] = *cfg.focal.seed;
  save_json(root, path);
}

}  // namespace uavgen
