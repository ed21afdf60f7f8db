#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavgen/config.hpp"
#include "uavgen/error.hpp"
#include "uavgen/pipeline.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::uint32_t jobs = 1;
  std::int64_t seed_override = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline config JSON")
      ->required();
  cmd->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed_override, "override config global_seed");
}

uavgen::PipelineConfig load(const CommonOptions& opts) {
  uavgen::PipelineConfig cfg = uavgen::load_config(opts.config_path);
  if (opts.seed_override >= 0) {
    cfg.global_seed = static_cast<std::uint64_t>(opts.seed_override);
  }
  return cfg;
}

int run_stage(const CommonOptions& opts,
              nlohmann::json (*stage)(const uavgen::PipelineConfig&,
                                      std::uint32_t)) {
  const nlohmann::json summary = stage(load(opts), opts.jobs);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV detection dataset synthesis pipeline"};
  app.require_subcommand(1);

  CommonOptions select_opts, extract_opts, conditions_opts, generate_opts,
      refine_opts, merge_opts, report_opts;

  add_common(app.add_subcommand("select-prototypes",
                                "build per-class visual prototype banks"),
             select_opts);
  add_common(app.add_subcommand("extract-regions",
                                "crop object-dense focal regions"),
             extract_opts);
  add_common(app.add_subcommand("build-conditions",
                                "build generator condition bundles"),
             conditions_opts);
  add_common(app.add_subcommand("generate",
                                "run the builtin or external generator"),
             generate_opts);
  add_common(app.add_subcommand("refine",
                                "detector-guided label refinement"),
             refine_opts);
  add_common(app.add_subcommand("merge",
                                "assemble patches into full images"),
             merge_opts);
  add_common(app.add_subcommand("report", "aggregate stage sidecars"),
             report_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("select-prototypes")) {
      return run_stage(select_opts, uavgen::stage_select_prototypes);
    }
    if (app.got_subcommand("extract-regions")) {
      return run_stage(extract_opts, uavgen::stage_extract_regions);
    }
    if (app.got_subcommand("build-conditions")) {
      return run_stage(conditions_opts, uavgen::stage_build_conditions);
    }
    if (app.got_subcommand("generate")) {
      return run_stage(generate_opts, uavgen::stage_generate);
    }
    if (app.got_subcommand("refine")) {
      return run_stage(refine_opts, uavgen::stage_refine);
    }
    if (app.got_subcommand("merge")) {
      return run_stage(merge_opts, uavgen::stage_merge);
    }
    if (app.got_subcommand("report")) {
      const nlohmann::json summary = uavgen::stage_report(load(report_opts));
      std::cout << summary.dump(2) << "\n";
      return 0;
    }
  } catch (const uavgen::Error& e) {
    std::cerr << nlohmann::json{{"error", uavgen::to_string(e.kind())},
                                {"message", e.what()}}
                     .dump()
              << "\n";
    return uavgen::is_user_error(e.kind()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}
                     .dump()
              << "\n";
    return 1;
  }
  return 1;
}
