#include "uavgen/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>

#include "uavgen/coco_io.hpp"
#include "uavgen/condition.hpp"
#include "uavgen/error.hpp"
#include "uavgen/focal.hpp"
#include "uavgen/generator.hpp"
#include "uavgen/merge.hpp"
#include "uavgen/parallel.hpp"
#include "uavgen/png_io.hpp"
#include "uavgen/prototype.hpp"
#include "uavgen/refine.hpp"
#include "uavgen/rng.hpp"

namespace uavgen {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_file(const std::string& path, const std::string& needed_by) {
  if (!fs::exists(path)) {
    fail(ErrorKind::io_error,
         needed_by + " requires '" + path + "', which does not exist");
  }
}

ImageLoader disk_loader(const std::string& images_dir) {
  return [images_dir](const ImageRecord& rec) {
    return read_png(images_dir + "/" + rec.file_path);
  };
}

// Identity of one dense patch, shared by every stage past extraction.
struct PatchRef {
  std::string patch_id;        // "{source_image_id}_{k}"
  std::uint64_t numeric_id;    // image id inside the dense COCO file
  std::uint64_t source_image_id;
  std::uint32_t window_x, window_y, window_size;
};

std::vector<PatchRef> load_patch_refs(const std::string& output_dir) {
  const std::string path = output_dir + "/dense/windows.json";
  require_file(path, "this stage");
  const json root = load_json(path);
  std::vector<PatchRef> out;
  for (const auto& rec : root) {
    PatchRef ref;
    ref.patch_id = rec.at("patch_id").get<std::string>();
    ref.numeric_id = rec.at("patch_image_id").get<std::uint64_t>();
    ref.source_image_id = rec.at("source_image_id").get<std::uint64_t>();
    ref.window_x = rec.at("window").at(0).get<std::uint32_t>();
    ref.window_y = rec.at("window").at(1).get<std::uint32_t>();
    ref.window_size = rec.at("window").at(2).get<std::uint32_t>();
    out.push_back(std::move(ref));
  }
  return out;
}

std::map<std::uint64_t, std::vector<Annotation>> annotations_by_image(
    const Dataset& ds) {
  std::map<std::uint64_t, std::vector<Annotation>> out;
  for (const auto& a : ds.annotations) out[a.image_id].push_back(a);
  return out;
}

// Generation results keyed by patch_id; only ok entries carry image paths.
std::map<std::string, std::string> load_ok_generations(
    const std::string& output_dir) {
  const std::string path = output_dir + "/generated/results.jsonl";
  require_file(path, "this stage");
  std::map<std::string, std::string> ok;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    if (rec.at("status").get<std::string>() == "ok") {
      ok[rec.at("patch_id").get<std::string>()] =
          rec.at("image_path").get<std::string>();
    }
  }
  return ok;
}

}  // namespace

json stage_select_prototypes(const PipelineConfig& cfg, std::uint32_t jobs) {
  require_file(cfg.paths.dataset, "select-prototypes");
  require_file(cfg.paths.detections, "select-prototypes");

  LoadStats stats;
  const Dataset dataset = load_dataset(cfg.paths.dataset, &stats);
  const std::vector<Detection> dets =
      load_detections(cfg.paths.detections, &stats);
  const ClassScoreModel model = fit_class_score_model(dets);

  std::vector<std::uint32_t> unfitted;
  const auto candidates = select_visual_candidates(
      dataset, dets, model, cfg.prototype.tau_det, cfg.prototype.alpha,
      &unfitted);

  std::unique_ptr<EmbeddingProvider> provider;
  if (cfg.prototype.embedding_source == "builtin") {
    provider = std::make_unique<BuiltinEmbedding>();
  } else {
    require_file(cfg.prototype.embedding_source, "select-prototypes");
    provider = std::make_unique<FileEmbedding>(cfg.prototype.embedding_source);
  }

  const PrototypeBank bank =
      select_prototypes(candidates, dataset, disk_loader(cfg.paths.images_dir),
                        cfg.prototype.tau_lat_quantile, *provider);
  (void)jobs;  // selection cost is dominated by image decode, done lazily

  const std::string bank_dir = cfg.paths.output_dir + "/prototype_bank";
  save_prototype_bank(bank, bank_dir);

  json per_class = json::object();
  std::uint64_t total = 0;
  for (const auto& [class_id, protos] : bank) {
    per_class[std::to_string(class_id)] = protos.size();
    total += protos.size();
  }
  json candidates_per_class = json::object();
  for (const auto& [class_id, set] : candidates) {
    candidates_per_class[std::to_string(class_id)] = set.members.size();
  }
  return json{{"stage", "select-prototypes"},
              {"bank_dir", bank_dir},
              {"prototypes", total},
              {"prototypes_per_class", per_class},
              {"candidates_per_class", candidates_per_class},
              {"unfitted_classes", unfitted},
              {"clamped_boxes", stats.clamped_boxes},
              {"dropped_boxes", stats.dropped_boxes}};
}

json stage_extract_regions(const PipelineConfig& cfg, std::uint32_t jobs) {
  require_file(cfg.paths.dataset, "extract-regions");
  const Dataset dataset = load_dataset(cfg.paths.dataset);

  ExtractStats stats;
  const std::vector<FocalRegion> regions =
      extract_focal_regions(dataset, cfg.focal.k_default,
                            cfg.focal.window_size, cfg.focal_seed(), &stats);

  const std::string dense_dir = cfg.paths.output_dir + "/dense";
  fs::create_directories(dense_dir + "/patches");

  // Patch ids: per-image region counter k; numeric ids sequential in region
  // order, fixed before the parallel crop loop.
  std::map<std::uint64_t, std::uint32_t> per_image_counter;
  struct Assigned {
    std::string patch_id;
    std::uint64_t numeric_id;
  };
  std::vector<Assigned> assigned(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::uint32_t k = per_image_counter[regions[i].image_id]++;
    assigned[i].patch_id =
        std::to_string(regions[i].image_id) + "_" + std::to_string(k);
    assigned[i].numeric_id = static_cast<std::uint64_t>(i) + 1;
  }

  parallel_for(regions.size(), jobs, [&](std::size_t i) {
    const FocalRegion& region = regions[i];
    const ImageRecord& rec = dataset.image_by_id(region.image_id);
    const RasterImage source = read_png(cfg.paths.images_dir + "/" + rec.file_path);
    const RasterImage patch = crop_region(source, region);
    write_png_atomic(patch,
                     dense_dir + "/patches/" + assigned[i].patch_id + ".png");
  });

  Dataset dense;
  dense.categories = dataset.categories;
  json windows = json::array();
  std::map<std::uint64_t, std::uint64_t> hist;  // regions per source image
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const FocalRegion& region = regions[i];
    ImageRecord rec;
    rec.id = assigned[i].numeric_id;
    rec.width = cfg.focal.window_size;
    rec.height = cfg.focal.window_size;
    rec.file_path = assigned[i].patch_id + ".png";
    dense.images.push_back(rec);
    for (Annotation a : region.contained) {
      a.image_id = rec.id;
      dense.annotations.push_back(a);
    }
    windows.push_back(
        {{"patch_id", assigned[i].patch_id},
         {"patch_image_id", rec.id},
         {"source_image_id", region.image_id},
         {"window",
          {static_cast<std::uint32_t>(region.window.x),
           static_cast<std::uint32_t>(region.window.y), cfg.focal.window_size}},
         {"cluster_center",
          {region.cluster_center.first, region.cluster_center.second}}});
    ++hist[region.image_id];
  }
  dense.reindex();
  save_dataset(dense, dense_dir + "/annotations.json");
  save_json(windows, dense_dir + "/windows.json");

  json histogram = json::object();
  for (const auto& [image_id, count] : hist) {
    histogram[std::to_string(image_id)] = count;
  }
  return json{{"stage", "extract-regions"},
              {"dense_dir", dense_dir},
              {"patches", regions.size()},
              {"regions_per_image", histogram},
              {"images_skipped_too_small", stats.images_skipped_too_small},
              {"regions_deduplicated", stats.regions_deduplicated},
              {"regions_empty_dropped", stats.regions_empty_dropped}};
}

json stage_build_conditions(const PipelineConfig& cfg, std::uint32_t jobs) {
  const std::string dense_dir = cfg.paths.output_dir + "/dense";
  require_file(dense_dir + "/annotations.json", "build-conditions");
  const Dataset dense = load_dataset(dense_dir + "/annotations.json");
  const std::vector<PatchRef> patches = load_patch_refs(cfg.paths.output_dir);
  const std::string bank_dir = cfg.paths.output_dir + "/prototype_bank";
  require_file(bank_dir + "/index.json", "build-conditions");
  const PrototypeBank bank = load_prototype_bank(bank_dir);

  const auto by_image = annotations_by_image(dense);
  const std::string conditions_dir = cfg.paths.output_dir + "/conditions";
  fs::create_directories(conditions_dir);

  std::vector<std::uint64_t> object_counts(patches.size(), 0);
  parallel_for(patches.size(), jobs, [&](std::size_t i) {
    const PatchRef& ref = patches[i];
    auto it = by_image.find(ref.numeric_id);
    if (it == by_image.end() || it->second.empty()) {
      fail(ErrorKind::empty_layout,
           "patch " + ref.patch_id + " has no annotations");
    }
    const ConditionBundle bundle = build_condition_bundle(
        ref.patch_id, it->second, dense.categories, bank, ref.window_size,
        ref.window_size, cfg.condition.fourier_bands, cfg.condition.weight_w,
        cfg.global_seed);
    save_condition_bundle(bundle, conditions_dir);
    object_counts[i] = it->second.size();
  });

  std::uint64_t total_objects = 0;
  for (std::uint64_t c : object_counts) total_objects += c;
  return json{{"stage", "build-conditions"},
              {"conditions_dir", conditions_dir},
              {"bundles", patches.size()},
              {"objects", total_objects}};
}

json stage_generate(const PipelineConfig& cfg, std::uint32_t jobs) {
  const std::vector<PatchRef> patches = load_patch_refs(cfg.paths.output_dir);
  const std::string conditions_dir = cfg.paths.output_dir + "/conditions";
  const std::string gen_dir = cfg.paths.output_dir + "/generated";
  fs::create_directories(gen_dir + "/images");

  std::vector<GenerationRequest> requests;
  requests.reserve(patches.size());
  for (const auto& ref : patches) {
    const std::string manifest =
        conditions_dir + "/" + ref.patch_id + "/manifest.json";
    require_file(manifest, "generate");
    requests.push_back(
        {ref.patch_id, manifest, gen_dir + "/images/" + ref.patch_id + ".png"});
  }

  std::vector<GenerationResult> results;
  if (cfg.generator.mode == "external") {
    results = run_external(requests, cfg.generator.command,
                           cfg.generator.parallelism, cfg.generator.timeout_s,
                           gen_dir);
  } else {
    const Background background = Background::parse(cfg.generator.background);
    results.resize(requests.size());
    // Requests manifest mirrors the external protocol for auditability.
    {
      std::ofstream out(gen_dir + "/requests.jsonl");
      for (const auto& r : requests) {
        out << json{{"patch_id", r.patch_id},
                    {"bundle_manifest", r.bundle_manifest},
                    {"output_path", r.output_path}}
                   .dump()
            << "\n";
      }
    }
    parallel_for(requests.size(), jobs, [&](std::size_t i) {
      const GenerationRequest& req = requests[i];
      const ConditionBundle bundle = load_condition_bundle(req.bundle_manifest);
      const RasterImage image = run_builtin_compositor(
          bundle, background, hash_seed(cfg.global_seed, req.patch_id));
      write_png_atomic(image, req.output_path);
      results[i] = {req.patch_id, true, "", req.output_path};
    });
    std::ofstream out(gen_dir + "/results.jsonl");
    for (const auto& r : results) {
      out << json{{"patch_id", r.patch_id},
                  {"status", "ok"},
                  {"image_path", r.image_path}}
                 .dump()
          << "\n";
    }
  }

  std::uint64_t ok = 0, failed = 0;
  json failures = json::array();
  for (const auto& r : results) {
    if (r.ok) {
      ++ok;
    } else {
      ++failed;
      failures.push_back({{"patch_id", r.patch_id}, {"reason", r.reason}});
    }
  }
  return json{{"stage", "generate"},
              {"mode", cfg.generator.mode},
              {"requests", requests.size()},
              {"ok", ok},
              {"failed", failed},
              {"failures", failures}};
}

json stage_refine(const PipelineConfig& cfg, std::uint32_t jobs) {
  const std::string dense_dir = cfg.paths.output_dir + "/dense";
  require_file(dense_dir + "/annotations.json", "refine");
  const Dataset dense = load_dataset(dense_dir + "/annotations.json");
  const std::vector<PatchRef> patches = load_patch_refs(cfg.paths.output_dir);
  const auto ok_generated = load_ok_generations(cfg.paths.output_dir);
  const auto by_image = annotations_by_image(dense);

  std::vector<std::uint32_t> class_ids;
  for (const auto& [id, name] : dense.categories) class_ids.push_back(id);

  // Detections over the synthetic patches: external file or simulator.
  std::map<std::uint64_t, std::vector<Detection>> dets_by_patch;
  if (cfg.refine.simulate) {
    DetectorNoise noise;
    noise.miss_rate = cfg.refine.simulate_miss_rate;
    noise.false_rate = cfg.refine.simulate_false_rate;
    noise.jitter_std_px = cfg.refine.simulate_jitter_std_px;
    const std::uint64_t base = hash_seed(cfg.global_seed, "refine");
    for (const auto& ref : patches) {
      if (!ok_generated.count(ref.patch_id)) continue;
      auto it = by_image.find(ref.numeric_id);
      if (it == by_image.end()) continue;
      const SimulationResult sim =
          simulate_detector(it->second, noise, ref.window_size,
                            ref.window_size, class_ids,
                            hash_seed(base, ref.numeric_id));
      dets_by_patch[ref.numeric_id] = sim.detections();
    }
  } else {
    if (cfg.refine.detections_path.empty()) {
      fail(ErrorKind::config_error,
           "refine needs detections_path or simulate=true");
    }
    require_file(cfg.refine.detections_path, "refine");
    for (const auto& d : load_detections(cfg.refine.detections_path)) {
      dets_by_patch[d.image_id].push_back(d);
    }
  }

  // Self-calibrating score model over the whole synthetic-detection
  // population.
  std::vector<Detection> all_dets;
  for (const auto& [id, dets] : dets_by_patch) {
    all_dets.insert(all_dets.end(), dets.begin(), dets.end());
  }
  const ClassScoreModel model = fit_class_score_model(all_dets);
  const RefineConfig rcfg = cfg.refine_config();

  std::vector<const PatchRef*> targets;
  for (const auto& ref : patches) {
    if (ok_generated.count(ref.patch_id)) targets.push_back(&ref);
  }

  std::vector<std::vector<RefinedLabel>> refined(targets.size());
  std::vector<RefineReport> reports(targets.size());
  parallel_for(targets.size(), jobs, [&](std::size_t i) {
    const PatchRef& ref = *targets[i];
    auto lit = by_image.find(ref.numeric_id);
    const std::vector<Annotation> empty;
    const std::vector<Annotation>& labels =
        lit == by_image.end() ? empty : lit->second;
    auto dit = dets_by_patch.find(ref.numeric_id);
    const std::vector<Detection> no_dets;
    const std::vector<Detection>& dets =
        dit == dets_by_patch.end() ? no_dets : dit->second;
    auto [out, report] = refine(labels, dets, model, rcfg);
    refined[i] = std::move(out);
    reports[i] = report;
  });

  const std::string refined_dir = cfg.paths.output_dir + "/refined";
  fs::create_directories(refined_dir);

  Dataset out_ds;
  out_ds.categories = dense.categories;
  json provenance = json::object();
  RefineReport total;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const PatchRef& ref = *targets[i];
    ImageRecord rec;
    rec.id = ref.numeric_id;
    rec.width = ref.window_size;
    rec.height = ref.window_size;
    rec.file_path = ref.patch_id + ".png";
    out_ds.images.push_back(rec);

    json entries = json::array();
    for (const RefinedLabel& label : refined[i]) {
      Annotation a;
      a.image_id = ref.numeric_id;
      a.bbox = label.bbox;
      a.category_id = label.class_id;
      out_ds.annotations.push_back(a);
      entries.push_back({{"bbox", bbox_to_json(label.bbox)},
                         {"class_id", label.class_id},
                         {"provenance", to_string(label.provenance)},
                         {"matched_score", label.matched_score},
                         {"source_index", label.source_index},
                         {"detection_index", label.detection_index}});
    }
    provenance[ref.patch_id] = std::move(entries);
    total += reports[i];
  }
  out_ds.reindex();
  save_dataset(out_ds, refined_dir + "/annotations.json");
  save_json(provenance, refined_dir + "/provenance.json");

  const json report_json{{"n_input", total.n_input},
                         {"n_missed_dropped", total.n_missed_dropped},
                         {"n_low_conf_dropped", total.n_low_conf_dropped},
                         {"n_false_added", total.n_false_added},
                         {"n_replaced", total.n_replaced},
                         {"n_output", total.n_output},
                         {"n_unfitted_class_warnings",
                          total.n_unfitted_class_warnings},
                         {"patches_refined", targets.size()}};
  save_json(report_json, refined_dir + "/report.json");

  json summary = report_json;
  summary["stage"] = "refine";
  summary["refined_dir"] = refined_dir;
  return summary;
}

json stage_merge(const PipelineConfig& cfg, std::uint32_t jobs) {
  const std::string refined_dir = cfg.paths.output_dir + "/refined";
  require_file(refined_dir + "/annotations.json", "merge");
  const Dataset refined = load_dataset(refined_dir + "/annotations.json");
  const std::vector<PatchRef> patches = load_patch_refs(cfg.paths.output_dir);
  const auto ok_generated = load_ok_generations(cfg.paths.output_dir);
  const auto labels_by_patch = annotations_by_image(refined);

  const std::string merged_dir = cfg.paths.output_dir + "/merged";
  fs::create_directories(merged_dir + "/images");

  // Patches that were generated and refined, in dense patch order.
  std::vector<const PatchRef*> used;
  for (const auto& ref : patches) {
    if (ok_generated.count(ref.patch_id) && refined.has_image(ref.numeric_id)) {
      used.push_back(&ref);
    }
  }

  std::map<std::string, RasterImage> patch_images;
  for (const PatchRef* ref : used) {
    patch_images[ref->patch_id] = read_png(ok_generated.at(ref->patch_id));
  }
  std::map<std::string, const RasterImage*> patch_image_ptrs;
  std::map<std::string, std::vector<Annotation>> patch_label_store;
  std::map<std::string, const std::vector<Annotation>*> patch_label_ptrs;
  for (const PatchRef* ref : used) {
    patch_image_ptrs[ref->patch_id] = &patch_images.at(ref->patch_id);
    auto it = labels_by_patch.find(ref->numeric_id);
    patch_label_store[ref->patch_id] =
        it == labels_by_patch.end() ? std::vector<Annotation>{} : it->second;
    patch_label_ptrs[ref->patch_id] = &patch_label_store.at(ref->patch_id);
  }

  std::vector<PatchInput> inputs;
  for (const PatchRef* ref : used) {
    PatchInput in;
    in.patch_id = ref->patch_id;
    in.width = ref->window_size;
    in.height = ref->window_size;
    in.source_image_id = ref->source_image_id;
    in.window_x = ref->window_x;
    in.window_y = ref->window_y;
    inputs.push_back(in);
  }

  const MergeMode mode = cfg.merge_mode();
  std::vector<MergePlan> plans;
  Dataset source_ds;
  if (mode == MergeMode::mosaic) {
    plans = plan_mosaic(inputs, cfg.merge.canvas_w, cfg.merge.canvas_h);
  } else {
    require_file(cfg.paths.dataset, "merge (paste_back)");
    source_ds = load_dataset(cfg.paths.dataset);
    std::map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> sizes;
    for (const auto& im : source_ds.images) {
      sizes[im.id] = {im.width, im.height};
    }
    plans = plan_paste_back(inputs, sizes);
  }
  const auto source_anns = annotations_by_image(source_ds);

  Dataset out_ds;
  out_ds.categories = refined.categories;
  std::vector<std::vector<Annotation>> out_annotations(plans.size());
  std::vector<std::string> out_names(plans.size());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out_sizes(plans.size());

  parallel_for(plans.size(), jobs, [&](std::size_t i) {
    const MergePlan& plan = plans[i];
    RasterImage source;
    const std::vector<Annotation>* src_ann = nullptr;
    if (plan.mode == MergeMode::paste_back) {
      const ImageRecord& rec = source_ds.image_by_id(plan.source_image_id);
      source = read_png(cfg.paths.images_dir + "/" + rec.file_path);
      auto it = source_anns.find(plan.source_image_id);
      if (it != source_anns.end()) src_ann = &it->second;
    }
    MergeOutput merged = execute_merge(
        plan, patch_image_ptrs, patch_label_ptrs,
        plan.mode == MergeMode::paste_back ? &source : nullptr, src_ann);

    char name[64];
    if (plan.mode == MergeMode::mosaic) {
      std::snprintf(name, sizeof(name), "mosaic_%04zu.png", i);
    } else {
      std::snprintf(name, sizeof(name), "pasteback_%llu.png",
                    static_cast<unsigned long long>(plan.source_image_id));
    }
    write_png_atomic(merged.image, merged_dir + "/images/" + name);
    out_names[i] = name;
    out_sizes[i] = {merged.image.width, merged.image.height};
    out_annotations[i] = std::move(merged.annotations);
  });

  json plan_json = json::array();
  for (std::size_t i = 0; i < plans.size(); ++i) {
    ImageRecord rec;
    rec.id = static_cast<std::uint64_t>(i) + 1;
    rec.width = out_sizes[i].first;
    rec.height = out_sizes[i].second;
    rec.file_path = out_names[i];
    out_ds.images.push_back(rec);
    for (Annotation a : out_annotations[i]) {
      a.image_id = rec.id;
      out_ds.annotations.push_back(a);
    }
    json placements = json::array();
    for (const auto& pl : plans[i].placements) {
      placements.push_back({{"patch_id", pl.patch_id},
                            {"origin", {pl.origin_x, pl.origin_y}}});
    }
    plan_json.push_back(
        {{"image", out_names[i]},
         {"mode", plans[i].mode == MergeMode::mosaic ? "mosaic" : "paste_back"},
         {"source_image_id", plans[i].source_image_id},
         {"placements", placements}});
  }
  out_ds.reindex();
  save_dataset(out_ds, merged_dir + "/annotations.json");
  save_json(plan_json, merged_dir + "/plan.json");

  return json{{"stage", "merge"},
              {"merged_dir", merged_dir},
              {"mode", cfg.merge.mode},
              {"outputs", plans.size()},
              {"patches_merged", used.size()},
              {"annotations", out_ds.annotations.size()}};
}

json stage_report(const PipelineConfig& cfg) {
  const std::string out = cfg.paths.output_dir;
  json stages = json::object();

  auto try_load = [&](const char* key, const std::string& path) {
    if (fs::exists(path)) stages[key] = load_json(path);
  };
  if (fs::exists(out + "/prototype_bank/index.json")) {
    const json index = load_json(out + "/prototype_bank/index.json");
    json per_class = json::object();
    for (const auto& rec : index) {
      const std::string c = std::to_string(rec.at("class_id").get<std::uint32_t>());
      per_class[c] = per_class.value(c, 0) + 1;
    }
    stages["prototype_bank"] = {{"prototypes", index.size()},
                                {"per_class", per_class}};
  }
  if (fs::exists(out + "/dense/windows.json")) {
    const json windows = load_json(out + "/dense/windows.json");
    stages["dense"] = {{"patches", windows.size()}};
  }
  if (fs::exists(out + "/generated/results.jsonl")) {
    std::ifstream in(out + "/generated/results.jsonl");
    std::uint64_t ok = 0, failed = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json rec = json::parse(line);
      if (rec.at("status").get<std::string>() == "ok") {
        ++ok;
      } else {
        ++failed;
      }
    }
    stages["generated"] = {{"ok", ok}, {"failed", failed}};
  }
  try_load("refined", out + "/refined/report.json");
  if (fs::exists(out + "/merged/plan.json")) {
    const json plan = load_json(out + "/merged/plan.json");
    stages["merged"] = {{"outputs", plan.size()}};
  }

  // The report is the one artifact allowed to carry a timestamp.
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));

  const json report{{"generated_at", stamp}, {"stages", stages}};
  save_json(report, out + "/report.json");

  json summary = {{"stage", "report"}, {"stages", stages}};
  return summary;
}

}  // namespace uavgen
