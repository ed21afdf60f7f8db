#include "uavgen/coco_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "uavgen/error.hpp"

namespace uavgen {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open " + path);
  json value;
  try {
    in >> value;
  } catch (const json::parse_error& e) {
    fail(ErrorKind::malformed_file, path + ": " + e.what());
  }
  return value;
}

void save_json(const json& value, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail(ErrorKind::io_error, "cannot write " + tmp);
    out << value.dump(2) << "\n";
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::io_error, "rename failed: " + path);
}

json bbox_to_json(const BBox& box) {
  return json::array({box.x, box.y, box.w, box.h});
}

BBox bbox_from_json(const json& value) {
  if (!value.is_array() || value.size() != 4) {
    fail(ErrorKind::malformed_file, "bbox must be [x,y,w,h]");
  }
  return BBox{value[0].get<double>(), value[1].get<double>(),
              value[2].get<double>(), value[3].get<double>()};
}

namespace {

// Clamp a box to [0,w]x[0,h]; returns false if it degenerates.
bool clamp_box(BBox& box, double w, double h, bool& changed) {
  const double x1 = std::max(box.x, 0.0);
  const double y1 = std::max(box.y, 0.0);
  const double x2 = std::min(box.x + box.w, w);
  const double y2 = std::min(box.y + box.h, h);
  changed = (x1 != box.x || y1 != box.y || x2 != box.x + box.w ||
             y2 != box.y + box.h);
  box = BBox{x1, y1, x2 - x1, y2 - y1};
  return box.w > 0.0 && box.h > 0.0;
}

}  // namespace

Dataset load_dataset(const std::string& path, LoadStats* stats) {
  const json root = load_json(path);
  if (!root.is_object() || !root.contains("images") ||
      !root.contains("annotations") || !root.contains("categories")) {
    fail(ErrorKind::malformed_file,
         path + ": expected COCO object with images/annotations/categories");
  }

  Dataset ds;
  for (const auto& c : root.at("categories")) {
    ds.categories[c.at("id").get<std::uint32_t>()] =
        c.at("name").get<std::string>();
  }
  for (const auto& im : root.at("images")) {
    ImageRecord rec;
    rec.id = im.at("id").get<std::uint64_t>();
    rec.width = im.at("width").get<std::uint32_t>();
    rec.height = im.at("height").get<std::uint32_t>();
    if (rec.width < 1 || rec.height < 1) {
      fail(ErrorKind::malformed_file, path + ": image with zero extent");
    }
    if (im.contains("file_name")) rec.file_path = im.at("file_name").get<std::string>();
    ds.images.push_back(std::move(rec));
  }
  ds.reindex();

  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  for (const auto& a : root.at("annotations")) {
    Annotation ann;
    ann.image_id = a.at("image_id").get<std::uint64_t>();
    ann.category_id = a.at("category_id").get<std::uint32_t>();
    ann.bbox = bbox_from_json(a.at("bbox"));
    if (!ds.categories.count(ann.category_id)) {
      fail(ErrorKind::unknown_category,
           path + ": unknown category " + std::to_string(ann.category_id));
    }
    const ImageRecord& im = ds.image_by_id(ann.image_id);  // DanglingImageRef
    if (!std::isfinite(ann.bbox.x) || !std::isfinite(ann.bbox.y) ||
        !std::isfinite(ann.bbox.w) || !std::isfinite(ann.bbox.h) ||
        ann.bbox.w <= 0.0 || ann.bbox.h <= 0.0) {
      ++st.dropped_boxes;
      continue;
    }
    bool changed = false;
    if (!clamp_box(ann.bbox, im.width, im.height, changed)) {
      ++st.dropped_boxes;
      continue;
    }
    if (changed) ++st.clamped_boxes;
    ds.annotations.push_back(ann);
  }
  return ds;
}

std::vector<Detection> load_detections(const std::string& path,
                                       LoadStats* stats) {
  const json root = load_json(path);
  if (!root.is_array()) {
    fail(ErrorKind::malformed_file, path + ": expected COCO results array");
  }
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  std::vector<Detection> out;
  out.reserve(root.size());
  for (const auto& d : root) {
    Detection det;
    det.image_id = d.at("image_id").get<std::uint64_t>();
    det.category_id = d.at("category_id").get<std::uint32_t>();
    det.bbox = bbox_from_json(d.at("bbox"));
    det.score = d.at("score").get<double>();
    if (det.score < 0.0 || det.score > 1.0) {
      det.score = std::clamp(det.score, 0.0, 1.0);
      ++st.clamped_scores;
    }
    out.push_back(det);
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  json images = json::array();
  for (const auto& im : dataset.images) {
    images.push_back({{"id", im.id},
                      {"width", im.width},
                      {"height", im.height},
                      {"file_name", im.file_path}});
  }
  json annotations = json::array();
  std::uint64_t next_id = 1;
  for (const auto& a : dataset.annotations) {
    annotations.push_back({{"id", next_id++},
                           {"image_id", a.image_id},
                           {"category_id", a.category_id},
                           {"bbox", bbox_to_json(a.bbox)},
                           {"area", a.bbox.area()},
                           {"iscrowd", 0}});
  }
  json categories = json::array();
  for (const auto& [id, name] : dataset.categories) {
    categories.push_back({{"id", id}, {"name", name}});
  }
  save_json({{"images", images},
             {"annotations", annotations},
             {"categories", categories}},
            path);
}

void save_detections(const std::vector<Detection>& detections,
                     const std::string& path) {
  json arr = json::array();
  for (const auto& d : detections) {
    arr.push_back({{"image_id", d.image_id},
                   {"category_id", d.category_id},
                   {"bbox", bbox_to_json(d.bbox)},
                   {"score", d.score}});
  }
  save_json(arr, path);
}

}  // namespace uavgen
