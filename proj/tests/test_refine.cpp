#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "test_util.hpp"
#include "uavgen/refine.hpp"

using uavgen::Annotation;
using uavgen::BBox;
using uavgen::Detection;
using uavgen::Provenance;
using uavgen::RefineConfig;

namespace {

Annotation gt(double x, double y, double w, double h, std::uint32_t c = 1) {
  return Annotation{1, BBox{x, y, w, h}, c};
}

Detection det(double x, double y, double w, double h, double score,
              std::uint32_t c = 1) {
  return Detection{1, BBox{x, y, w, h}, c, score};
}

// Model with enough spread that every quantile in (0,1) is strictly below
// the top score.
uavgen::ClassScoreModel spread_model(std::uint32_t class_id = 1) {
  std::vector<Detection> dets;
  uavgen::Rng rng(71);
  for (int i = 0; i < 100; ++i) {
    dets.push_back(det(0, 0, 1, 1, 0.4 + 0.2 * rng.next_double(), class_id));
  }
  return uavgen::fit_class_score_model(dets);
}

}  // namespace

TEST_CASE("match_labels") {
  SUBCASE("perfect overlaps give the identity mapping") {
    const std::vector<Annotation> real{gt(0, 0, 10, 10), gt(50, 50, 10, 10)};
    const std::vector<Detection> dets{det(0, 0, 10, 10, 0.9),
                                      det(50, 50, 10, 10, 0.9)};
    const auto m = uavgen::match_labels(real, dets, 0.5);
    REQUIRE(m.size() == 2);
    CHECK(m.at(0) == 0);
    CHECK(m.at(1) == 1);
  }
  SUBCASE("higher IoU wins") {
    const std::vector<Annotation> real{gt(0, 0, 10, 10)};
    const std::vector<Detection> dets{det(3, 0, 10, 10, 0.9),    // lower iou
                                      det(0.5, 0, 10, 10, 0.9)};  // higher iou
    const auto m = uavgen::match_labels(real, dets, 0.5);
    REQUIRE(m.size() == 1);
    CHECK(m.at(0) == 1);
  }
  SUBCASE("all below threshold leaves the map empty") {
    const std::vector<Annotation> real{gt(0, 0, 10, 10)};
    const std::vector<Detection> dets{det(9, 9, 10, 10, 0.9)};
    CHECK(uavgen::match_labels(real, dets, 0.5).empty());
  }
  SUBCASE("matching is class-agnostic") {
    const std::vector<Annotation> real{gt(0, 0, 10, 10, 1)};
    const std::vector<Detection> dets{det(0, 0, 10, 10, 0.9, 2)};
    CHECK(uavgen::match_labels(real, dets, 0.5).size() == 1);
  }
}

TEST_CASE("refine: exact-copy detections are a fixed point") {
  const std::vector<Annotation> real{gt(0, 0, 10, 10), gt(40, 40, 20, 12)};
  std::vector<Detection> dets;
  for (const auto& a : real) {
    dets.push_back(det(a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h, 1.0,
                       a.category_id));
  }
  const auto model = spread_model();
  const RefineConfig cfg{0.5, 0.5, 0.5, 0.5};
  const auto [labels, report] = uavgen::refine(real, dets, model, cfg);
  REQUIRE(labels.size() == real.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    // Score 1.0 strictly exceeds every quantile of the spread model, so
    // boxes are replaced by identical detection boxes.
    CHECK(labels[i].provenance == Provenance::kept_replaced);
    CHECK(labels[i].bbox == real[i].bbox);
    CHECK(labels[i].class_id == real[i].category_id);
  }
  CHECK(report.n_replaced == 2);
  CHECK(report.n_missed_dropped == 0);
  CHECK(report.n_output == 2);
}

TEST_CASE("refine: unmatched ground truth is dropped as missed") {
  const std::vector<Annotation> real{gt(0, 0, 10, 10), gt(100, 100, 10, 10)};
  const std::vector<Detection> dets{det(0, 0, 10, 10, 0.9)};  // matches only A
  const auto model = spread_model();
  const auto [labels, report] =
      uavgen::refine(real, dets, model, RefineConfig{0.5, 0.1, 0.9, 0.9});
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].source_index == 0);
  CHECK(report.n_missed_dropped == 1);
  CHECK(report.n_input == 2);
  CHECK(report.n_output == 1);
}

TEST_CASE("refine: high-confidence unmatched detection is added") {
  const std::vector<Annotation> real;
  const std::vector<Detection> dets{det(5, 5, 10, 10, 0.99)};
  const auto model = spread_model();
  const auto [labels, report] =
      uavgen::refine(real, dets, model, RefineConfig{0.5, 0.1, 0.9, 0.9});
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].provenance == Provenance::added_false_gen);
  CHECK(labels[0].matched_score == doctest::Approx(0.99));
  CHECK(labels[0].bbox == dets[0].bbox);
  CHECK(report.n_false_added == 1);
}

TEST_CASE("refine: low-confidence match is dropped, not missed") {
  const std::vector<Annotation> real{gt(0, 0, 10, 10)};
  const std::vector<Detection> dets{det(0, 0, 10, 10, 0.01)};
  const auto model = spread_model();
  const auto [labels, report] =
      uavgen::refine(real, dets, model, RefineConfig{0.5, 0.5, 0.9, 0.9});
  CHECK(labels.empty());
  CHECK(report.n_low_conf_dropped == 1);
  CHECK(report.n_missed_dropped == 0);
}

TEST_CASE("refine: class replacement through class-agnostic matching") {
  // A class-2 detection sits exactly on a class-1 label with a top score:
  // step 3 rewrites both box and class.
  const std::vector<Annotation> real{gt(0, 0, 10, 10, 1)};
  std::vector<Detection> dets{det(1, 0, 10, 10, 0.99, 2)};
  auto all = spread_model(2);
  const auto [labels, report] =
      uavgen::refine(real, dets, all, RefineConfig{0.5, 0.1, 0.9, 0.9});
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].provenance == Provenance::kept_replaced);
  CHECK(labels[0].class_id == 2);
  CHECK(labels[0].bbox == dets[0].bbox);
}

TEST_CASE("refine: conservation invariant over random fixtures") {
  uavgen::Rng rng(73);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Annotation> real;
    std::vector<Detection> dets;
    const std::size_t ng = rng.next_below(8);
    const std::size_t nd = rng.next_below(8);
    for (std::size_t i = 0; i < ng; ++i) {
      real.push_back({1, testutil::random_box(rng, 200, 200, 5, 60),
                      static_cast<std::uint32_t>(1 + rng.next_below(2))});
    }
    for (std::size_t i = 0; i < nd; ++i) {
      dets.push_back({1, testutil::random_box(rng, 200, 200, 5, 60),
                      static_cast<std::uint32_t>(1 + rng.next_below(2)),
                      rng.next_double()});
    }
    const auto model = uavgen::fit_class_score_model(dets);
    const RefineConfig cfg{0.3 + 0.4 * rng.next_double(),
                           0.05 + 0.4 * rng.next_double(),
                           0.5 + 0.45 * rng.next_double(),
                           0.5 + 0.45 * rng.next_double()};
    const auto [labels, report] = uavgen::refine(real, dets, model, cfg);
    CHECK(report.n_output ==
          report.n_input - report.n_missed_dropped - report.n_low_conf_dropped +
              report.n_false_added);
    CHECK(report.n_output == labels.size());
    // added_false_gen labels always carry a score.
    for (const auto& l : labels) {
      if (l.provenance == Provenance::added_false_gen) {
        CHECK(l.matched_score >= 0.0);
      }
    }
  }
}

TEST_CASE("refine: added labels are terminal (never replaced)") {
  // One unmatched high-score detection and one matched pair; the added label
  // must keep the detection's own box/class even though gamma would fire.
  const std::vector<Annotation> real{gt(0, 0, 10, 10)};
  const std::vector<Detection> dets{det(0, 0, 10, 10, 0.99),
                                    det(100, 100, 10, 10, 0.99)};
  const auto model = spread_model();
  const auto [labels, report] =
      uavgen::refine(real, dets, model, RefineConfig{0.5, 0.1, 0.5, 0.5});
  REQUIRE(labels.size() == 2);
  std::size_t added = 0;
  for (const auto& l : labels) {
    if (l.provenance == Provenance::added_false_gen) {
      ++added;
      CHECK(l.detection_index == 1);
    }
  }
  CHECK(added == 1);
  CHECK(report.n_replaced == 1);  // only the kept label was replaced
}

TEST_CASE("refine: monotonicity in alpha and beta") {
  uavgen::Rng rng(75);
  std::vector<Annotation> real;
  std::vector<Detection> dets;
  for (int i = 0; i < 12; ++i) {
    const BBox b = testutil::random_box(rng, 400, 400, 10, 50);
    real.push_back({1, b, 1});
    dets.push_back({1, b, 1, rng.next_double()});
  }
  for (int i = 0; i < 6; ++i) {
    dets.push_back({1, testutil::random_box(rng, 400, 400, 5, 30), 1,
                    rng.next_double()});
  }
  const auto model = uavgen::fit_class_score_model(dets);

  std::uint64_t prev_kept = UINT64_MAX;
  for (double alpha : {0.05, 0.2, 0.5, 0.8, 0.95}) {
    const auto [labels, report] =
        uavgen::refine(real, dets, model, RefineConfig{0.5, alpha, 0.99, 0.99});
    const std::uint64_t kept = report.n_input - report.n_missed_dropped -
                               report.n_low_conf_dropped;
    CHECK(kept <= prev_kept);
    prev_kept = kept;
  }
  std::uint64_t prev_added = UINT64_MAX;
  for (double beta : {0.05, 0.2, 0.5, 0.8, 0.95}) {
    const auto [labels, report] =
        uavgen::refine(real, dets, model, RefineConfig{0.5, 0.1, beta, 0.99});
    CHECK(report.n_false_added <= prev_added);
    prev_added = report.n_false_added;
  }
}

TEST_CASE("refine: disjoint detections drop all ground truth") {
  const std::vector<Annotation> real{gt(0, 0, 10, 10), gt(20, 20, 10, 10)};
  const std::vector<Detection> dets{det(200, 200, 10, 10, 0.99)};
  const auto model = spread_model();
  const auto [labels, report] =
      uavgen::refine(real, dets, model, RefineConfig{1.0, 0.1, 0.5, 0.9});
  CHECK(report.n_missed_dropped == 2);
  REQUIRE(labels.size() == 1);  // only the step-2 addition
  CHECK(labels[0].provenance == Provenance::added_false_gen);
}

TEST_CASE("refine: idempotent on the fixed-point fixture") {
  const std::vector<Annotation> real{gt(0, 0, 10, 10), gt(30, 5, 12, 18)};
  std::vector<Detection> dets;
  for (const auto& a : real) {
    dets.push_back(det(a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h, 1.0));
  }
  const auto model = spread_model();
  const RefineConfig cfg{0.5, 0.1, 0.9, 0.9};
  const auto [first, r1] = uavgen::refine(real, dets, model, cfg);

  // Re-derive detections as exact copies of the refined labels and run again.
  std::vector<Annotation> real2;
  std::vector<Detection> dets2;
  for (const auto& l : first) {
    real2.push_back({1, l.bbox, l.class_id});
    dets2.push_back(det(l.bbox.x, l.bbox.y, l.bbox.w, l.bbox.h, 1.0, l.class_id));
  }
  const auto [second, r2] = uavgen::refine(real2, dets2, model, cfg);
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(second[i].bbox == first[i].bbox);
    CHECK(second[i].class_id == first[i].class_id);
  }
}

TEST_CASE("simulate_detector") {
  const std::vector<Annotation> gts{gt(10, 10, 20, 20), gt(50, 50, 30, 30),
                                    gt(100, 20, 15, 25)};
  SUBCASE("zero noise reproduces the ground truth") {
    uavgen::DetectorNoise noise;  // all rates zero
    noise.default_mu = 0.7;
    noise.default_sigma = 0.0;
    const auto sim = uavgen::simulate_detector(gts, noise, 256, 256, {1}, 9);
    REQUIRE(sim.entries.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(sim.entries[i].detection.bbox == gts[i].bbox);
      CHECK(sim.entries[i].detection.score == doctest::Approx(0.7));
      CHECK(sim.entries[i].origin == uavgen::SimOrigin::survived);
      CHECK(sim.entries[i].gt_index == static_cast<std::int64_t>(i));
    }
    CHECK(sim.missed_gt.empty());
  }
  SUBCASE("miss rate one leaves only injected boxes") {
    uavgen::DetectorNoise noise;
    noise.miss_rate = 1.0;
    noise.false_rate = 0.5;
    const auto sim = uavgen::simulate_detector(gts, noise, 256, 256, {1}, 9);
    CHECK(sim.missed_gt.size() == 3);
    for (const auto& e : sim.entries) {
      CHECK(e.origin == uavgen::SimOrigin::injected);
    }
  }
  SUBCASE("fixed seed is reproducible") {
    uavgen::DetectorNoise noise;
    noise.miss_rate = 0.3;
    noise.false_rate = 0.4;
    noise.jitter_std_px = 2.0;
    const auto a = uavgen::simulate_detector(gts, noise, 256, 256, {1, 2}, 42);
    const auto b = uavgen::simulate_detector(gts, noise, 256, 256, {1, 2}, 42);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      CHECK(a.entries[i].detection.bbox == b.entries[i].detection.bbox);
      CHECK(a.entries[i].detection.score == b.entries[i].detection.score);
    }
    CHECK(a.missed_gt == b.missed_gt);
  }
}

TEST_CASE("label_quality") {
  const std::vector<Annotation> truth{gt(0, 0, 10, 10), gt(30, 30, 10, 10)};
  SUBCASE("refined equal to truth scores perfectly") {
    std::vector<uavgen::RefinedLabel> refined;
    for (const auto& a : truth) {
      uavgen::RefinedLabel l;
      l.bbox = a.bbox;
      l.class_id = a.category_id;
      refined.push_back(l);
    }
    const auto q = uavgen::label_quality(refined, truth, 0.5);
    CHECK(q.precision == 1.0);
    CHECK(q.recall == 1.0);
    CHECK_FALSE(q.precision_undefined);
  }
  SUBCASE("empty refined set flags undefined precision") {
    const auto q = uavgen::label_quality({}, truth, 0.5);
    CHECK(q.precision == 1.0);
    CHECK(q.precision_undefined);
    CHECK(q.recall == 0.0);
  }
  SUBCASE("half recovered gives recall one half") {
    std::vector<uavgen::RefinedLabel> refined(1);
    refined[0].bbox = truth[0].bbox;
    refined[0].class_id = truth[0].category_id;
    const auto q = uavgen::label_quality(refined, truth, 0.5);
    CHECK(q.precision == 1.0);
    CHECK(q.recall == 0.5);
  }
}
