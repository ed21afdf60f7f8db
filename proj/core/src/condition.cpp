#include "uavgen/condition.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include <json.hpp>

#include "uavgen/coco_io.hpp"
#include "uavgen/error.hpp"
#include "uavgen/png_io.hpp"
#include "uavgen/rng.hpp"

namespace uavgen {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_box_in_canvas(const BBox& b, std::uint32_t w, std::uint32_t h) {
  if (b.x < 0.0 || b.y < 0.0 || b.x2() > static_cast<double>(w) ||
      b.y2() > static_cast<double>(h)) {
    fail(ErrorKind::box_outside_canvas, "layout box outside canvas");
  }
}

// Paint order: larger boxes first so smaller ones stay visible; ties keep
// layout order.
std::vector<std::size_t> paint_order(const std::vector<Annotation>& layout) {
  std::vector<std::size_t> order(layout.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return layout[a].bbox.area() > layout[b].bbox.area();
                   });
  return order;
}

}  // namespace

ComposeResult compose_canvases(const std::vector<Annotation>& layout,
                               const PrototypeBank& bank,
                               std::uint32_t canvas_w, std::uint32_t canvas_h,
                               std::uint64_t seed) {
  if (canvas_w < 1 || canvas_h < 1) {
    fail(ErrorKind::size_mismatch, "canvas must be at least 1x1");
  }
  ComposeResult result;
  result.flattened = RasterImage(canvas_w, canvas_h, 0);
  if (layout.empty()) return result;

  Rng rng(seed);
  std::vector<PixelRect> rects(layout.size());
  std::vector<RasterImage> scaled(layout.size());
  for (std::size_t j = 0; j < layout.size(); ++j) {
    const Annotation& obj = layout[j];
    check_box_in_canvas(obj.bbox, canvas_w, canvas_h);
    auto it = bank.find(obj.category_id);
    if (it == bank.end() || it->second.empty()) {
      fail(ErrorKind::missing_prototype_class,
           "no prototypes for class " + std::to_string(obj.category_id));
    }
    // Prototypes are sampled in layout order so the RNG stream does not
    // depend on paint order.
    const std::size_t pick = rng.next_below(it->second.size());
    result.prototype_indices.push_back(pick);

    const PixelRect rect = snap_rect(obj.bbox, canvas_w, canvas_h);
    rects[j] = rect;
    scaled[j] = resample_area(it->second[pick].patch,
                              static_cast<std::uint32_t>(rect.w),
                              static_cast<std::uint32_t>(rect.h));

    RasterImage blank(canvas_w, canvas_h, 0);
    paste(blank, scaled[j], rect.x, rect.y);
    result.per_object.push_back(std::move(blank));
  }

  for (std::size_t j : paint_order(layout)) {
    paste(result.flattened, scaled[j], rects[j].x, rects[j].y);
  }
  return result;
}

std::pair<std::string, std::vector<std::string>> build_prompts(
    const std::vector<Annotation>& layout,
    const std::map<std::uint32_t, std::string>& categories) {
  if (layout.empty()) {
    fail(ErrorKind::empty_layout, "cannot build prompts for empty layout");
  }
  std::string global = "An aerial image with ";
  std::vector<std::string> per_object;
  per_object.reserve(layout.size());
  for (std::size_t j = 0; j < layout.size(); ++j) {
    auto it = categories.find(layout[j].category_id);
    if (it == categories.end()) {
      fail(ErrorKind::unknown_category,
           "unknown category " + std::to_string(layout[j].category_id));
    }
    if (j > 0) global += ",";
    global += it->second;
    per_object.push_back("An aerial image of " + it->second + ".");
  }
  global += ".";
  return {global, per_object};
}

std::vector<double> fourier_embed(const BBox& box, std::uint32_t canvas_w,
                                  std::uint32_t canvas_h,
                                  std::uint32_t bands) {
  if (bands < 1) fail(ErrorKind::config_error, "fourier bands must be >= 1");
  check_box_in_canvas(box, canvas_w, canvas_h);
  const double coords[4] = {box.x / canvas_w, box.y / canvas_h,
                            box.w / canvas_w, box.h / canvas_h};
  std::vector<double> out;
  out.reserve(8 * bands);
  double freq = kPi;  // 2^k * pi
  for (std::uint32_t k = 0; k < bands; ++k, freq *= 2.0) {
    for (double v : coords) {
      out.push_back(std::sin(freq * v));
      out.push_back(std::cos(freq * v));
    }
  }
  return out;
}

WeightMap build_weight_map(const std::vector<Annotation>& layout,
                           std::uint32_t canvas_w, std::uint32_t canvas_h,
                           double w) {
  if (w < 1.0) fail(ErrorKind::config_error, "foreground weight must be >= 1");
  WeightMap map(canvas_w, canvas_h, 1.0);
  for (const Annotation& obj : layout) {
    const BBox& b = obj.bbox;
    // Pixel (px,py) is foreground iff its center lies in [x, x+w) x [y, y+h).
    const std::int64_t x0 =
        std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(b.x - 0.5)));
    const std::int64_t y0 =
        std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(b.y - 0.5)));
    for (std::int64_t py = y0; py < canvas_h; ++py) {
      if (py + 0.5 >= b.y2()) break;
      for (std::int64_t px = x0; px < canvas_w; ++px) {
        if (px + 0.5 >= b.x2()) break;
        map.at(static_cast<std::uint32_t>(px), static_cast<std::uint32_t>(py)) = w;
      }
    }
  }
  return map;
}

ConditionBundle build_condition_bundle(
    const std::string& patch_id, const std::vector<Annotation>& layout,
    const std::map<std::uint32_t, std::string>& categories,
    const PrototypeBank& bank, std::uint32_t canvas_w, std::uint32_t canvas_h,
    std::uint32_t fourier_bands, double weight_w, std::uint64_t global_seed) {
  ConditionBundle bundle;
  bundle.patch_id = patch_id;
  bundle.canvas_w = canvas_w;
  bundle.canvas_h = canvas_h;

  auto [global_prompt, object_prompts] = build_prompts(layout, categories);
  bundle.global_prompt = std::move(global_prompt);

  ComposeResult composed = compose_canvases(layout, bank, canvas_w, canvas_h,
                                            hash_seed(global_seed, patch_id));
  bundle.per_object_canvases = std::move(composed.per_object);
  bundle.flattened_canvas = std::move(composed.flattened);

  for (std::size_t j = 0; j < layout.size(); ++j) {
    ObjectCondition obj;
    obj.bbox = layout[j].bbox;
    obj.class_id = layout[j].category_id;
    obj.prompt = object_prompts[j];
    obj.fourier = fourier_embed(layout[j].bbox, canvas_w, canvas_h, fourier_bands);
    obj.prototype_ref = "c" + std::to_string(layout[j].category_id) + "_p" +
                        std::to_string(composed.prototype_indices[j]);
    bundle.objects.push_back(std::move(obj));
  }

  bundle.weight_map = build_weight_map(layout, canvas_w, canvas_h, weight_w);
  return bundle;
}

std::string save_condition_bundle(const ConditionBundle& bundle,
                                  const std::string& dir) {
  const std::string bundle_dir = dir + "/" + bundle.patch_id;
  std::filesystem::create_directories(bundle_dir);

  write_png(bundle.flattened_canvas, bundle_dir + "/flattened.png");
  write_weight_png(bundle.weight_map, bundle_dir + "/weight.png");

  json per_object = json::array();
  for (std::size_t j = 0; j < bundle.objects.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof(name), "obj_%03zu.png", j);
    write_png(bundle.per_object_canvases[j], bundle_dir + "/" + name);
    const ObjectCondition& obj = bundle.objects[j];
    per_object.push_back({{"canvas", name},
                          {"bbox", bbox_to_json(obj.bbox)},
                          {"class_id", obj.class_id},
                          {"prompt", obj.prompt},
                          {"fourier", obj.fourier},
                          {"prototype_ref", obj.prototype_ref}});
  }

  const json manifest = {{"patch_id", bundle.patch_id},
                         {"canvas", {bundle.canvas_w, bundle.canvas_h}},
                         {"flattened_canvas", "flattened.png"},
                         {"per_object", per_object},
                         {"global_prompt", bundle.global_prompt},
                         {"weight_map", "weight.png"}};
  const std::string manifest_path = bundle_dir + "/manifest.json";
  save_json(manifest, manifest_path);
  return manifest_path;
}

ConditionBundle load_condition_bundle(const std::string& manifest_path) {
  const json manifest = load_json(manifest_path);
  const std::string dir =
      std::filesystem::path(manifest_path).parent_path().string();

  ConditionBundle bundle;
  bundle.patch_id = manifest.at("patch_id").get<std::string>();
  bundle.canvas_w = manifest.at("canvas").at(0).get<std::uint32_t>();
  bundle.canvas_h = manifest.at("canvas").at(1).get<std::uint32_t>();
  bundle.global_prompt = manifest.at("global_prompt").get<std::string>();
  bundle.flattened_canvas =
      read_png(dir + "/" + manifest.at("flattened_canvas").get<std::string>());
  bundle.weight_map =
      read_weight_png(dir + "/" + manifest.at("weight_map").get<std::string>());

  for (const auto& rec : manifest.at("per_object")) {
    ObjectCondition obj;
    obj.bbox = bbox_from_json(rec.at("bbox"));
    obj.class_id = rec.at("class_id").get<std::uint32_t>();
    obj.prompt = rec.at("prompt").get<std::string>();
    obj.fourier = rec.at("fourier").get<std::vector<double>>();
    obj.prototype_ref = rec.at("prototype_ref").get<std::string>();
    bundle.objects.push_back(std::move(obj));
    bundle.per_object_canvases.push_back(
        read_png(dir + "/" + rec.at("canvas").get<std::string>()));
  }

  if (bundle.per_object_canvases.size() != bundle.objects.size() ||
      bundle.weight_map.width != bundle.canvas_w ||
      bundle.weight_map.height != bundle.canvas_h) {
    fail(ErrorKind::malformed_file, manifest_path + ": inconsistent bundle");
  }
  return bundle;
}

}  // namespace uavgen
