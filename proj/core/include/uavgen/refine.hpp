#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uavgen/score_model.hpp"
#include "uavgen/types.hpp"

namespace uavgen {

struct RefineConfig {
  double tau_ref = 0.5;  // IoU threshold for label/detection matching
  double alpha = 0.1;    // keep matched labels at/above this score quantile
  double beta = 0.9;     // admit unmatched detections at/above this quantile
  double gamma = 0.9;    // replace boxes strictly above this quantile

  void validate() const;
};

enum class Provenance { kept, kept_replaced, added_false_gen };

const char* to_string(Provenance p);

struct RefinedLabel {
  BBox bbox;
  std::uint32_t class_id = 0;
  Provenance provenance = Provenance::kept;
  double matched_score = -1.0;        // < 0 means no matched detection
  std::int64_t source_index = -1;     // input annotation index, -1 for added
  std::int64_t detection_index = -1;  // matched/admitted detection index
};

struct RefineReport {
  std::uint64_t n_input = 0;
  std::uint64_t n_missed_dropped = 0;
  std::uint64_t n_low_conf_dropped = 0;
  std::uint64_t n_false_added = 0;
  std::uint64_t n_replaced = 0;
  std::uint64_t n_output = 0;
  std::uint64_t n_unfitted_class_warnings = 0;

  RefineReport& operator+=(const RefineReport& o);
};

// One-to-one class-agnostic greedy matching by descending IoU at threshold
// tau_ref; keys are annotation indices, values detection indices.
std::map<std::size_t, std::size_t> match_labels(
    const std::vector<Annotation>& real, const std::vector<Detection>& det,
    double tau_ref);

// Detector-guided label correction, in order: drop unmatched and
// low-confidence labels, admit high-confidence unmatched detections, replace
// boxes whose matched detection clears the gamma quantile.
std::pair<std::vector<RefinedLabel>, RefineReport> refine(
    const std::vector<Annotation>& real, const std::vector<Detection>& det,
    const ClassScoreModel& model, const RefineConfig& cfg);

// Synthetic-detector noise model used for tests and simulation-driven runs.
struct DetectorNoise {
  double miss_rate = 0.0;
  double false_rate = 0.0;
  double jitter_std_px = 0.0;
  // Per-class score distribution (mu, sigma); classes not listed fall back
  // to default_mu/default_sigma.
  std::map<std::uint32_t, std::pair<double, double>> score_model;
  double default_mu = 0.8;
  double default_sigma = 0.1;
};

enum class SimOrigin { survived, injected };

struct SimulatedDetection {
  Detection detection;
  SimOrigin origin = SimOrigin::survived;
  std::int64_t gt_index = -1;  // set for survived detections
};

struct SimulationResult {
  std::vector<SimulatedDetection> entries;
  std::vector<std::size_t> missed_gt;  // indices dropped by the simulator

  std::vector<Detection> detections() const {
    std::vector<Detection> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.detection);
    return out;
  }
};

// Deterministic per seed: drops each gt with probability miss_rate, jitters
// survivors, injects Poisson(false_rate * |gt|) random boxes, and draws
// scores from the per-class distribution.
SimulationResult simulate_detector(const std::vector<Annotation>& gt,
                                   const DetectorNoise& noise,
                                   std::uint32_t image_w, std::uint32_t image_h,
                                   const std::vector<std::uint32_t>& classes,
                                   std::uint64_t seed);

struct LabelQuality {
  double precision = 1.0;
  double recall = 1.0;
  bool precision_undefined = false;  // empty refined set against nonempty truth
};

// Greedy IoU matching with class equality at iou_thr.
LabelQuality label_quality(const std::vector<RefinedLabel>& refined,
                           const std::vector<Annotation>& truth,
                           double iou_thr);

}  // namespace uavgen
