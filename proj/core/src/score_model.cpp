#include "uavgen/score_model.hpp"

#include <algorithm>
#include <cmath>

#include "uavgen/error.hpp"

namespace uavgen {

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorKind::alpha_out_of_range, "quantile level must lie in (0,1)");
  }

  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;

  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against erfc brings the error to machine precision.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) *
                   std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

const ClassScoreModel::ClassFit& ClassScoreModel::fit(
    std::uint32_t class_id) const {
  auto it = fits_.find(class_id);
  if (it == fits_.end()) {
    fail(ErrorKind::class_not_fitted,
         "no score samples for class " + std::to_string(class_id));
  }
  return it->second;
}

double empirical_quantile(const std::vector<double>& sorted_values,
                          double alpha) {
  if (sorted_values.empty()) {
    fail(ErrorKind::class_not_fitted, "empirical quantile of empty sample");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::alpha_out_of_range, "quantile level must lie in (0,1]");
  }
  const double h = (static_cast<double>(sorted_values.size()) - 1.0) * alpha;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted_values.size()) return sorted_values.back();
  const double frac = h - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

double ClassScoreModel::quantile(std::uint32_t class_id, double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::alpha_out_of_range, "quantile level must lie in (0,1)");
  }
  const ClassFit& f = fit(class_id);
  if (f.sigma == 0.0) return f.mu;
  if (f.n_samples >= kEmpiricalThreshold) {
    return f.mu + f.sigma * inverse_normal_cdf(alpha);
  }
  return empirical_quantile(f.fallback_scores, alpha);
}

ClassScoreModel fit_class_score_model(
    const std::vector<Detection>& detections) {
  std::map<std::uint32_t, std::vector<double>> by_class;
  for (const auto& d : detections) by_class[d.category_id].push_back(d.score);

  ClassScoreModel model;
  for (auto& [class_id, scores] : by_class) {
    // Accumulate in sorted order so the fit is bitwise invariant to the
    // input permutation.
    std::sort(scores.begin(), scores.end());
    ClassScoreModel::ClassFit f;
    f.n_samples = scores.size();
    double sum = 0.0;
    for (double s : scores) sum += s;
    f.mu = sum / static_cast<double>(scores.size());
    if (scores.size() >= 2) {
      double ss = 0.0;
      for (double s : scores) ss += (s - f.mu) * (s - f.mu);
      f.sigma = std::sqrt(ss / static_cast<double>(scores.size() - 1));
    }
    if (f.n_samples < ClassScoreModel::kEmpiricalThreshold) {
      f.fallback_scores = scores;
    }
    model.fits_.emplace(class_id, std::move(f));
  }
  return model;
}

}  // namespace uavgen
