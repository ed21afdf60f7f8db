#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "uavgen/types.hpp"

namespace uavgen {

// Inverse standard-normal CDF. Rational approximation (Acklam) refined by one
// Halley step; absolute error well below 1e-9 on (0,1).
double inverse_normal_cdf(double p);

// Per-class Gaussian fit over detection confidences. Classes with fewer than
// kEmpiricalThreshold samples keep their sorted scores and answer quantile
// queries empirically instead.
class ClassScoreModel {
 public:
  static constexpr std::uint64_t kEmpiricalThreshold = 30;

  struct ClassFit {
    double mu = 0.0;
    double sigma = 0.0;  // Bessel-corrected; 0 when all samples equal or n < 2
    std::uint64_t n_samples = 0;
    std::vector<double> fallback_scores;  // sorted, kept when n < threshold
  };

  bool has_class(std::uint32_t class_id) const {
    return fits_.count(class_id) != 0;
  }

  const ClassFit& fit(std::uint32_t class_id) const;

  // Quantile of the fitted confidence distribution for class_id at level
  // alpha in (0,1). Gaussian path when n >= threshold and sigma > 0; mu when
  // sigma == 0; interpolated empirical quantile otherwise.
  double quantile(std::uint32_t class_id, double alpha) const;

  const std::map<std::uint32_t, ClassFit>& fits() const { return fits_; }

  friend ClassScoreModel fit_class_score_model(
      const std::vector<Detection>& detections);

 private:
  std::map<std::uint32_t, ClassFit> fits_;
};

ClassScoreModel fit_class_score_model(const std::vector<Detection>& detections);

// Linear-interpolation quantile over sorted values (type-7); alpha in (0,1].
double empirical_quantile(const std::vector<double>& sorted_values, double alpha);

}  // namespace uavgen
