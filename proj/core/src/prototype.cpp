#include "uavgen/prototype.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include <json.hpp>

#include "uavgen/coco_io.hpp"
#include "uavgen/error.hpp"
#include "uavgen/png_io.hpp"

namespace uavgen {

using nlohmann::json;

std::vector<MatchPair> match_detections(const std::vector<Annotation>& gts,
                                        const std::vector<Detection>& dets,
                                        double tau_det) {
  std::vector<MatchPair> candidates;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    for (std::size_t j = 0; j < dets.size(); ++j) {
      if (gts[i].category_id != dets[j].category_id) continue;
      const double v = iou(gts[i].bbox, dets[j].bbox);
      if (v >= tau_det) candidates.push_back({i, j, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const MatchPair& a, const MatchPair& b) {
              if (a.pair_iou != b.pair_iou) return a.pair_iou > b.pair_iou;
              if (a.gt_index != b.gt_index) return a.gt_index < b.gt_index;
              return a.det_index < b.det_index;
            });
  std::vector<bool> gt_used(gts.size(), false), det_used(dets.size(), false);
  std::vector<MatchPair> out;
  for (const auto& c : candidates) {
    if (gt_used[c.gt_index] || det_used[c.det_index]) continue;
    gt_used[c.gt_index] = true;
    det_used[c.det_index] = true;
    out.push_back(c);
  }
  return out;
}

std::map<std::uint32_t, CandidateSet> select_visual_candidates(
    const Dataset& dataset, const std::vector<Detection>& dets,
    const ClassScoreModel& model, double tau_det, double alpha,
    std::vector<std::uint32_t>* unfitted_classes) {
  // Group annotations and detections per image; matching is intra-image.
  // A gt's index inside its image group doubles as the annotation index used
  // for external embedding lookup.
  std::map<std::uint64_t, std::vector<Annotation>> gts_by_image;
  for (const Annotation& a : dataset.annotations) {
    gts_by_image[a.image_id].push_back(a);
  }
  std::map<std::uint64_t, std::vector<Detection>> dets_by_image;
  for (const auto& d : dets) dets_by_image[d.image_id].push_back(d);

  std::map<std::uint32_t, CandidateSet> out;
  std::vector<std::uint32_t> unfitted;
  for (const auto& [image_id, gts] : gts_by_image) {
    auto dit = dets_by_image.find(image_id);
    if (dit == dets_by_image.end()) continue;
    for (const auto& m : match_detections(gts, dit->second, tau_det)) {
      const Detection& det = dit->second[m.det_index];
      const std::uint32_t c = det.category_id;
      double threshold = 0.0;
      if (!model.has_class(c)) {
        if (std::find(unfitted.begin(), unfitted.end(), c) == unfitted.end()) {
          unfitted.push_back(c);
        }
        continue;
      }
      threshold = model.quantile(c, alpha);
      if (det.score < threshold) continue;
      CandidateSet& set = out[c];
      set.class_id = c;
      set.tau_det = tau_det;
      set.score_threshold = threshold;
      set.members.push_back(
          {gts[m.gt_index], det, m.gt_index, m.pair_iou});
    }
  }
  for (auto& [c, set] : out) {
    std::sort(set.members.begin(), set.members.end(),
              [](const CandidateMember& a, const CandidateMember& b) {
                if (a.annotation.image_id != b.annotation.image_id)
                  return a.annotation.image_id < b.annotation.image_id;
                if (a.annotation.bbox.x != b.annotation.bbox.x)
                  return a.annotation.bbox.x < b.annotation.bbox.x;
                return a.annotation.bbox.y < b.annotation.bbox.y;
              });
  }
  if (unfitted_classes) {
    std::sort(unfitted.begin(), unfitted.end());
    *unfitted_classes = std::move(unfitted);
  }
  return out;
}

std::vector<double> embed_patch(const RasterImage& patch) {
  if (patch.empty()) {
    fail(ErrorKind::size_mismatch, "embed_patch: empty patch");
  }
  std::vector<double> v = resample_area_f64(patch, 8, 8);
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 <= 0.0) {
    // All-zero patch: fall back to the uniform unit vector.
    const double u = 1.0 / std::sqrt(static_cast<double>(v.size()));
    std::fill(v.begin(), v.end(), u);
    return v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

FileEmbedding::FileEmbedding(const std::string& path) {
  const json root = load_json(path);
  if (!root.is_object()) {
    fail(ErrorKind::malformed_file, path + ": expected embeddings object");
  }
  for (const auto& [key, arr] : root.items()) {
    table_[key] = arr.get<std::vector<double>>();
  }
}

std::vector<double> FileEmbedding::embed(const RasterImage&,
                                         std::uint64_t image_id,
                                         std::uint64_t ann_index) const {
  const std::string key =
      std::to_string(image_id) + ":" + std::to_string(ann_index);
  auto it = table_.find(key);
  if (it == table_.end()) {
    fail(ErrorKind::embedding_missing, "no embedding for key " + key);
  }
  std::vector<double> v = it->second;
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
  }
  return v;
}

PrototypeBank select_prototypes(
    const std::map<std::uint32_t, CandidateSet>& candidates,
    const Dataset& dataset, const ImageLoader& load_image,
    double tau_lat_quantile, const EmbeddingProvider& provider) {
  if (!(tau_lat_quantile > 0.0 && tau_lat_quantile <= 1.0)) {
    fail(ErrorKind::alpha_out_of_range, "tau_lat_quantile must lie in (0,1]");
  }

  // Images are decoded once and shared across classes.
  std::map<std::uint64_t, RasterImage> image_cache;
  auto image_of = [&](std::uint64_t id) -> const RasterImage& {
    auto it = image_cache.find(id);
    if (it == image_cache.end()) {
      it = image_cache.emplace(id, load_image(dataset.image_by_id(id))).first;
    }
    return it->second;
  };

  PrototypeBank bank;
  for (const auto& [class_id, set] : candidates) {
    if (set.members.empty()) continue;

    std::vector<Prototype> protos;
    protos.reserve(set.members.size());
    for (const auto& member : set.members) {
      const RasterImage& image = image_of(member.annotation.image_id);
      const PixelRect rect =
          snap_rect(member.annotation.bbox, image.width, image.height);
      Prototype p;
      p.class_id = class_id;
      p.source_image_id = member.annotation.image_id;
      p.bbox = member.annotation.bbox;
      p.patch = crop(image, rect);
      p.embedding = provider.embed(p.patch, member.annotation.image_id,
                                   member.ann_index);
      protos.push_back(std::move(p));
    }

    const std::size_t dim = protos.front().embedding.size();
    std::vector<double> centroid(dim, 0.0);
    for (const auto& p : protos) {
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += p.embedding[d];
    }
    for (double& c : centroid) c /= static_cast<double>(protos.size());

    std::vector<double> dist2(protos.size(), 0.0);
    for (std::size_t i = 0; i < protos.size(); ++i) {
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = protos[i].embedding[d] - centroid[d];
        s += diff * diff;
      }
      dist2[i] = s;
    }
    std::vector<double> sorted = dist2;
    std::sort(sorted.begin(), sorted.end());
    const double threshold = empirical_quantile(sorted, tau_lat_quantile);

    std::vector<Prototype> kept;
    for (std::size_t i = 0; i < protos.size(); ++i) {
      if (dist2[i] <= threshold) kept.push_back(std::move(protos[i]));
    }
    if (!kept.empty()) bank.emplace(class_id, std::move(kept));
  }
  return bank;
}

void save_prototype_bank(const PrototypeBank& bank, const std::string& dir) {
  std::filesystem::create_directories(dir);
  json index = json::array();
  for (const auto& [class_id, protos] : bank) {
    for (std::size_t i = 0; i < protos.size(); ++i) {
      const Prototype& p = protos[i];
      const std::string name =
          "c" + std::to_string(class_id) + "_p" + std::to_string(i) + ".png";
      write_png(p.patch, dir + "/" + name);
      index.push_back({{"class_id", p.class_id},
                       {"source_image_id", p.source_image_id},
                       {"bbox", bbox_to_json(p.bbox)},
                       {"embedding", p.embedding},
                       {"patch_file", name}});
    }
  }
  save_json(index, dir + "/index.json");
}

PrototypeBank load_prototype_bank(const std::string& dir) {
  const json index = load_json(dir + "/index.json");
  if (!index.is_array()) {
    fail(ErrorKind::malformed_file, dir + "/index.json: expected array");
  }
  PrototypeBank bank;
  for (const auto& rec : index) {
    Prototype p;
    p.class_id = rec.at("class_id").get<std::uint32_t>();
    p.source_image_id = rec.at("source_image_id").get<std::uint64_t>();
    p.bbox = bbox_from_json(rec.at("bbox"));
    p.embedding = rec.at("embedding").get<std::vector<double>>();
    p.patch = read_png(dir + "/" + rec.at("patch_file").get<std::string>());
    bank[p.class_id].push_back(std::move(p));
  }
  return bank;
}

}  // namespace uavgen
