// Generates the bundled synthetic demo dataset (images + COCO annotations +
// detector results) used by the README walkthrough and the acceptance suite.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "uavgen/error.hpp"
#include "uavgen/fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthetic fixture dataset generator"};
  std::string dir = "fixture";
  uavgen::FixtureSpec spec;
  app.add_option("--out", dir, "output directory");
  app.add_option("--images", spec.n_images, "number of images");
  app.add_option("--width", spec.width, "image width");
  app.add_option("--height", spec.height, "image height");
  app.add_option("--seed", spec.seed, "fixture seed");
  CLI11_PARSE(app, argc, argv);

  try {
    const uavgen::Dataset ds = uavgen::make_synthetic_fixture(dir, spec);
    std::cout << "wrote " << ds.images.size() << " images, "
              << ds.annotations.size() << " annotations to " << dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
