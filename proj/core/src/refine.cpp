#include "uavgen/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavgen/error.hpp"
#include "uavgen/rng.hpp"

namespace uavgen {

void RefineConfig::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) {
      fail(ErrorKind::config_error,
           std::string(name) + " must lie in (0,1]");
    }
  };
  check(tau_ref, "tau_ref");
  check(alpha, "alpha");
  check(beta, "beta");
  check(gamma, "gamma");
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kept:
      return "kept";
    case Provenance::kept_replaced:
      return "kept_replaced";
    case Provenance::added_false_gen:
      return "added_false_gen";
  }
  return "unknown";
}

RefineReport& RefineReport::operator+=(const RefineReport& o) {
  n_input += o.n_input;
  n_missed_dropped += o.n_missed_dropped;
  n_low_conf_dropped += o.n_low_conf_dropped;
  n_false_added += o.n_false_added;
  n_replaced += o.n_replaced;
  n_output += o.n_output;
  n_unfitted_class_warnings += o.n_unfitted_class_warnings;
  return *this;
}

std::map<std::size_t, std::size_t> match_labels(
    const std::vector<Annotation>& real, const std::vector<Detection>& det,
    double tau_ref) {
  struct Pair {
    std::size_t gt, d;
    double v;
  };
  std::vector<Pair> candidates;
  for (std::size_t i = 0; i < real.size(); ++i) {
    for (std::size_t j = 0; j < det.size(); ++j) {
      const double v = iou(real[i].bbox, det[j].bbox);
      if (v >= tau_ref) candidates.push_back({i, j, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Pair& a, const Pair& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.gt != b.gt) return a.gt < b.gt;
    return a.d < b.d;
  });
  std::vector<bool> gt_used(real.size(), false), det_used(det.size(), false);
  std::map<std::size_t, std::size_t> out;
  for (const auto& c : candidates) {
    if (gt_used[c.gt] || det_used[c.d]) continue;
    gt_used[c.gt] = true;
    det_used[c.d] = true;
    out.emplace(c.gt, c.d);
  }
  return out;
}

namespace {

// Quantile with unfitted classes treated as an unreachable threshold, so the
// affected comparison always fails.
double quantile_or_infinity(const ClassScoreModel& model, std::uint32_t c,
                            double level, std::uint64_t& warnings) {
  if (!model.has_class(c)) {
    ++warnings;
    return std::numeric_limits<double>::infinity();
  }
  return model.quantile(c, level);
}

}  // namespace

std::pair<std::vector<RefinedLabel>, RefineReport> refine(
    const std::vector<Annotation>& real, const std::vector<Detection>& det,
    const ClassScoreModel& model, const RefineConfig& cfg) {
  cfg.validate();

  const std::map<std::size_t, std::size_t> matches =
      match_labels(real, det, cfg.tau_ref);

  RefineReport report;
  report.n_input = real.size();
  std::vector<RefinedLabel> labels;

  // Step 1: keep matched labels whose detection clears the alpha quantile;
  // unmatched labels are missed generations.
  std::vector<bool> det_matched(det.size(), false);
  for (const auto& [gt, d] : matches) det_matched[d] = true;
  for (std::size_t i = 0; i < real.size(); ++i) {
    auto it = matches.find(i);
    if (it == matches.end()) {
      ++report.n_missed_dropped;
      continue;
    }
    const Detection& d = det[it->second];
    const double thr = quantile_or_infinity(model, d.category_id, cfg.alpha,
                                            report.n_unfitted_class_warnings);
    if (d.score >= thr) {
      RefinedLabel label;
      label.bbox = real[i].bbox;
      label.class_id = real[i].category_id;
      label.provenance = Provenance::kept;
      label.matched_score = d.score;
      label.source_index = static_cast<std::int64_t>(i);
      label.detection_index = static_cast<std::int64_t>(it->second);
      labels.push_back(label);
    } else {
      ++report.n_low_conf_dropped;
    }
  }

  // Step 2: admit unmatched detections that clear the beta quantile.
  for (std::size_t j = 0; j < det.size(); ++j) {
    if (det_matched[j]) continue;
    const Detection& d = det[j];
    const double thr = quantile_or_infinity(model, d.category_id, cfg.beta,
                                            report.n_unfitted_class_warnings);
    if (d.score >= thr) {
      RefinedLabel label;
      label.bbox = d.bbox;
      label.class_id = d.category_id;
      label.provenance = Provenance::added_false_gen;
      label.matched_score = d.score;
      label.detection_index = static_cast<std::int64_t>(j);
      labels.push_back(label);
      ++report.n_false_added;
    }
  }

  // Step 3: replace kept labels whose matched detection clears the gamma
  // quantile strictly. Labels admitted in step 2 are terminal.
  for (RefinedLabel& label : labels) {
    if (label.provenance != Provenance::kept) continue;
    const Detection& d = det[static_cast<std::size_t>(label.detection_index)];
    const double thr = quantile_or_infinity(model, d.category_id, cfg.gamma,
                                            report.n_unfitted_class_warnings);
    if (d.score > thr) {
      label.bbox = d.bbox;
      label.class_id = d.category_id;
      label.provenance = Provenance::kept_replaced;
      ++report.n_replaced;
    }
  }

  report.n_output = labels.size();
  return {std::move(labels), report};
}

SimulationResult simulate_detector(const std::vector<Annotation>& gt,
                                   const DetectorNoise& noise,
                                   std::uint32_t image_w, std::uint32_t image_h,
                                   const std::vector<std::uint32_t>& classes,
                                   std::uint64_t seed) {
  Rng rng(seed);
  SimulationResult result;

  auto draw_score = [&](std::uint32_t class_id) {
    double mu = noise.default_mu, sigma = noise.default_sigma;
    auto it = noise.score_model.find(class_id);
    if (it != noise.score_model.end()) {
      mu = it->second.first;
      sigma = it->second.second;
    }
    return std::clamp(mu + sigma * rng.next_gaussian(), 0.0, 1.0);
  };

  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (rng.next_double() < noise.miss_rate) {
      result.missed_gt.push_back(i);
      continue;
    }
    Detection d;
    d.image_id = gt[i].image_id;
    d.category_id = gt[i].category_id;
    d.bbox = gt[i].bbox;
    if (noise.jitter_std_px > 0.0) {
      d.bbox.x += noise.jitter_std_px * rng.next_gaussian();
      d.bbox.y += noise.jitter_std_px * rng.next_gaussian();
      d.bbox.w = std::max(1.0, d.bbox.w + noise.jitter_std_px * rng.next_gaussian());
      d.bbox.h = std::max(1.0, d.bbox.h + noise.jitter_std_px * rng.next_gaussian());
      d.bbox.x = std::clamp(d.bbox.x, 0.0, static_cast<double>(image_w) - d.bbox.w);
      d.bbox.y = std::clamp(d.bbox.y, 0.0, static_cast<double>(image_h) - d.bbox.h);
    }
    d.score = draw_score(d.category_id);
    result.entries.push_back(
        {d, SimOrigin::survived, static_cast<std::int64_t>(i)});
  }

  const std::uint64_t n_false =
      rng.next_poisson(noise.false_rate * static_cast<double>(gt.size()));
  const std::uint64_t image_id = gt.empty() ? 0 : gt.front().image_id;
  for (std::uint64_t f = 0; f < n_false; ++f) {
    Detection d;
    d.image_id = image_id;
    d.category_id =
        classes.empty() ? 1 : classes[rng.next_below(classes.size())];
    const double max_w = std::max(4.0, image_w / 4.0);
    const double max_h = std::max(4.0, image_h / 4.0);
    d.bbox.w = rng.next_uniform(4.0, max_w);
    d.bbox.h = rng.next_uniform(4.0, max_h);
    d.bbox.x = rng.next_uniform(0.0, image_w - d.bbox.w);
    d.bbox.y = rng.next_uniform(0.0, image_h - d.bbox.h);
    d.score = draw_score(d.category_id);
    result.entries.push_back({d, SimOrigin::injected, -1});
  }
  return result;
}

LabelQuality label_quality(const std::vector<RefinedLabel>& refined,
                           const std::vector<Annotation>& truth,
                           double iou_thr) {
  struct Pair {
    std::size_t r, t;
    double v;
  };
  std::vector<Pair> candidates;
  for (std::size_t i = 0; i < refined.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (refined[i].class_id != truth[j].category_id) continue;
      const double v = iou(refined[i].bbox, truth[j].bbox);
      if (v >= iou_thr) candidates.push_back({i, j, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Pair& a, const Pair& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.r != b.r) return a.r < b.r;
    return a.t < b.t;
  });
  std::vector<bool> r_used(refined.size(), false), t_used(truth.size(), false);
  std::size_t matched = 0;
  for (const auto& c : candidates) {
    if (r_used[c.r] || t_used[c.t]) continue;
    r_used[c.r] = true;
    t_used[c.t] = true;
    ++matched;
  }

  LabelQuality q;
  if (refined.empty()) {
    q.precision = 1.0;
    q.precision_undefined = !truth.empty();
  } else {
    q.precision = static_cast<double>(matched) / static_cast<double>(refined.size());
  }
  q.recall = truth.empty()
                 ? 1.0
                 : static_cast<double>(matched) / static_cast<double>(truth.size());
  return q;
}

}  // namespace uavgen
