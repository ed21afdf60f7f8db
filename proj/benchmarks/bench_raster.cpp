#include <benchmark/benchmark.h>

#include "uavgen/condition.hpp"
#include "uavgen/raster.hpp"
#include "uavgen/rng.hpp"

namespace {

uavgen::RasterImage noise_image(std::uint32_t w, std::uint32_t h) {
  uavgen::Rng rng(4);
  uavgen::RasterImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.next_below(256));
  return img;
}

void BM_ResampleArea(benchmark::State& state) {
  const auto src = noise_image(48, 48);
  const std::uint32_t target = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    auto out = uavgen::resample_area(src, target, target);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_ResampleArea)->Arg(8)->Arg(64)->Arg(256);

void BM_WeightMap(benchmark::State& state) {
  uavgen::Rng rng(5);
  std::vector<uavgen::Annotation> layout;
  for (int i = 0; i < state.range(0); ++i) {
    const double w = rng.next_uniform(4, 60);
    const double h = rng.next_uniform(4, 60);
    layout.push_back({1,
                      {rng.next_uniform(0, 256 - w), rng.next_uniform(0, 256 - h),
                       w, h},
                      1});
  }
  for (auto _ : state) {
    auto map = uavgen::build_weight_map(layout, 256, 256, 2.0);
    benchmark::DoNotOptimize(map);
  }
}
BENCHMARK(BM_WeightMap)->Arg(4)->Arg(16)->Arg(64);

}  // namespace
