#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "uavgen/raster.hpp"
#include "uavgen/score_model.hpp"
#include "uavgen/types.hpp"

namespace uavgen {

// One greedy IoU match between a ground-truth annotation and a detection.
struct MatchPair {
  std::size_t gt_index = 0;
  std::size_t det_index = 0;
  double pair_iou = 0.0;
};

// One-to-one greedy matching of same-class pairs in descending IoU order;
// only pairs with iou >= tau_det are returned. Inputs must belong to the
// same image.
std::vector<MatchPair> match_detections(const std::vector<Annotation>& gts,
                                        const std::vector<Detection>& dets,
                                        double tau_det);

struct CandidateMember {
  Annotation annotation;
  Detection detection;
  std::uint64_t ann_index = 0;  // index within the source image's annotations
  double pair_iou = 0.0;
};

// Per-class candidate set with the thresholds recorded at construction.
struct CandidateSet {
  std::uint32_t class_id = 0;
  double tau_det = 0.0;
  double score_threshold = 0.0;
  std::vector<CandidateMember> members;
};

// Confidence + IoU filter: for each class c the matched pairs whose
// detection score is at or above the alpha-quantile of the class's fitted
// score distribution. Classes missing from the model yield empty sets and
// are reported through unfitted_classes.
std::map<std::uint32_t, CandidateSet> select_visual_candidates(
    const Dataset& dataset, const std::vector<Detection>& dets,
    const ClassScoreModel& model, double tau_det, double alpha,
    std::vector<std::uint32_t>* unfitted_classes = nullptr);

// Builtin patch embedding: area-average resample to an 8x8x3 grid, flattened
// and L2-normalized. Replaces the external latent encoder with a fixed,
// runtime-free baseline.
std::vector<double> embed_patch(const RasterImage& patch);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(const RasterImage& patch,
                                    std::uint64_t image_id,
                                    std::uint64_t ann_index) const = 0;
};

class BuiltinEmbedding final : public EmbeddingProvider {
 public:
  std::vector<double> embed(const RasterImage& patch, std::uint64_t,
                            std::uint64_t) const override {
    return embed_patch(patch);
  }
};

// Looks vectors up in a JSON map "imageId:annIndex" -> float array; a missing
// key is an error.
class FileEmbedding final : public EmbeddingProvider {
 public:
  explicit FileEmbedding(const std::string& path);
  std::vector<double> embed(const RasterImage& patch, std::uint64_t image_id,
                            std::uint64_t ann_index) const override;

 private:
  std::map<std::string, std::vector<double>> table_;
};

struct Prototype {
  std::uint32_t class_id = 0;
  std::uint64_t source_image_id = 0;
  BBox bbox;
  RasterImage patch;
  std::vector<double> embedding;  // unit L2 norm
};

using PrototypeBank = std::map<std::uint32_t, std::vector<Prototype>>;

using ImageLoader = std::function<RasterImage(const ImageRecord&)>;

// Latent-centroid filter: keeps candidates whose squared distance to the
// class centroid is at or below the tau_lat_quantile-th empirical quantile of
// distances inside the class, and emits prototype crops. Candidates are
// processed in (source_image_id, bbox.x, bbox.y) order, which also fixes tie
// breaking.
PrototypeBank select_prototypes(
    const std::map<std::uint32_t, CandidateSet>& candidates,
    const Dataset& dataset, const ImageLoader& load_image,
    double tau_lat_quantile,
    const EmbeddingProvider& provider = BuiltinEmbedding{});

// Bank directory: one PNG crop per prototype plus index.json records
// {class_id, source_image_id, bbox, embedding, patch_file}.
void save_prototype_bank(const PrototypeBank& bank, const std::string& dir);
PrototypeBank load_prototype_bank(const std::string& dir);

}  // namespace uavgen
