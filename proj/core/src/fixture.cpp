#include "uavgen/fixture.hpp"

#include <algorithm>
#include <filesystem>

#include "uavgen/coco_io.hpp"
#include "uavgen/png_io.hpp"
#include "uavgen/refine.hpp"
#include "uavgen/rng.hpp"

namespace uavgen {

namespace {

// Position-keyed noise so the texture is independent of paint order.
std::uint8_t texture_noise(std::uint64_t image_seed, std::uint32_t x,
                           std::uint32_t y, std::uint32_t channel) {
  std::uint64_t v = image_seed ^ (static_cast<std::uint64_t>(x) << 40) ^
                    (static_cast<std::uint64_t>(y) << 20) ^ channel;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return static_cast<std::uint8_t>((v ^ (v >> 31)) & 0x1f);
}

void draw_box(RasterImage& image, const BBox& box, const std::uint8_t rgb[3]) {
  const std::uint32_t x0 = static_cast<std::uint32_t>(box.x);
  const std::uint32_t y0 = static_cast<std::uint32_t>(box.y);
  const std::uint32_t x1 = static_cast<std::uint32_t>(box.x2());
  const std::uint32_t y1 = static_cast<std::uint32_t>(box.y2());
  for (std::uint32_t y = y0; y < y1; ++y) {
    for (std::uint32_t x = x0; x < x1; ++x) {
      const bool border = x == x0 || x + 1 == x1 || y == y0 || y + 1 == y1;
      for (std::uint32_t c = 0; c < 3; ++c) {
        image.at(x, y, c) =
            border ? static_cast<std::uint8_t>(rgb[c] / 2) : rgb[c];
      }
    }
  }
}

}  // namespace

Dataset make_synthetic_fixture(const std::string& dir,
                               const FixtureSpec& spec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir + "/images");

  Dataset ds;
  ds.categories = {{1, "car"}, {2, "truck"}, {3, "person"}};
  const std::vector<std::uint32_t> class_ids{1, 2, 3};

  std::vector<Detection> detections;
  for (std::uint32_t i = 0; i < spec.n_images; ++i) {
    const std::uint64_t image_id = i + 1;
    Rng rng(hash_seed(spec.seed, image_id));

    ImageRecord rec;
    rec.id = image_id;
    rec.width = spec.width;
    rec.height = spec.height;
    rec.file_path = "img_" + std::to_string(image_id) + ".png";
    ds.images.push_back(rec);

    // Sandy background with deterministic per-pixel texture.
    const std::uint8_t base[3] = {
        static_cast<std::uint8_t>(90 + rng.next_below(60)),
        static_cast<std::uint8_t>(90 + rng.next_below(60)),
        static_cast<std::uint8_t>(80 + rng.next_below(50))};
    RasterImage image(spec.width, spec.height);
    const std::uint64_t tex_seed = rng.next_u64();
    for (std::uint32_t y = 0; y < spec.height; ++y) {
      for (std::uint32_t x = 0; x < spec.width; ++x) {
        for (std::uint32_t c = 0; c < 3; ++c) {
          image.at(x, y, c) = static_cast<std::uint8_t>(
              std::min<std::uint32_t>(255, base[c] + texture_noise(tex_seed, x, y, c)));
        }
      }
    }

    // Objects clustered around a few anchors so focal regions are dense.
    const std::uint32_t n_objects =
        spec.min_objects +
        static_cast<std::uint32_t>(
            rng.next_below(spec.max_objects - spec.min_objects + 1));
    const std::uint32_t n_anchors = 1 + static_cast<std::uint32_t>(rng.next_below(3));
    std::vector<std::pair<double, double>> anchors;
    for (std::uint32_t a = 0; a < n_anchors; ++a) {
      anchors.push_back({rng.next_uniform(80.0, spec.width - 80.0),
                         rng.next_uniform(80.0, spec.height - 80.0)});
    }

    std::vector<Annotation> anns;
    for (std::uint32_t j = 0; j < n_objects; ++j) {
      const auto& anchor = anchors[rng.next_below(anchors.size())];
      const double w = std::floor(rng.next_uniform(16.0, 64.0));
      const double h = std::floor(rng.next_uniform(16.0, 64.0));
      double cx = anchor.first + 40.0 * rng.next_gaussian();
      double cy = anchor.second + 40.0 * rng.next_gaussian();
      double x = std::clamp(std::floor(cx - w / 2.0), 0.0,
                            static_cast<double>(spec.width) - w);
      double y = std::clamp(std::floor(cy - h / 2.0), 0.0,
                            static_cast<double>(spec.height) - h);
      Annotation ann;
      ann.image_id = image_id;
      ann.bbox = BBox{x, y, w, h};
      ann.category_id = class_ids[rng.next_below(class_ids.size())];
      anns.push_back(ann);

      const std::uint8_t palette[3][3] = {
          {200, 60, 50}, {60, 90, 200}, {240, 220, 90}};
      std::uint8_t rgb[3];
      for (int c = 0; c < 3; ++c) {
        rgb[c] = static_cast<std::uint8_t>(std::min(
            255, palette[ann.category_id - 1][c] + static_cast<int>(rng.next_below(30))));
      }
      draw_box(image, ann.bbox, rgb);
    }
    ds.annotations.insert(ds.annotations.end(), anns.begin(), anns.end());
    write_png(image, dir + "/images/" + rec.file_path);

    // Detector results: mostly accurate, lightly noisy.
    DetectorNoise noise;
    noise.miss_rate = 0.1;
    noise.false_rate = 0.1;
    noise.jitter_std_px = 1.5;
    noise.default_mu = 0.85;
    noise.default_sigma = 0.06;
    const SimulationResult sim =
        simulate_detector(anns, noise, spec.width, spec.height, class_ids,
                          hash_seed(spec.seed ^ 0xdecaf, image_id));
    for (const auto& d : sim.detections()) detections.push_back(d);
  }

  ds.reindex();
  save_dataset(ds, dir + "/annotations.json");
  save_detections(detections, dir + "/detections.json");
  return ds;
}

}  // namespace uavgen
