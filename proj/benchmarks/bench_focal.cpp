#include <benchmark/benchmark.h>

#include <vector>

#include "uavgen/focal.hpp"
#include "uavgen/rng.hpp"

namespace {

std::vector<uavgen::BBox> int_boxes(std::size_t n, std::uint32_t extent) {
  uavgen::Rng rng(2);
  std::vector<uavgen::BBox> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t w = 4 + static_cast<std::uint32_t>(rng.next_below(60));
    const std::uint32_t h = 4 + static_cast<std::uint32_t>(rng.next_below(60));
    out.push_back({static_cast<double>(rng.next_below(extent - w)),
                   static_cast<double>(rng.next_below(extent - h)),
                   static_cast<double>(w), static_cast<double>(h)});
  }
  return out;
}

void BM_PlaceWindow(benchmark::State& state) {
  const auto boxes = int_boxes(static_cast<std::size_t>(state.range(0)), 1024);
  for (auto _ : state) {
    auto result = uavgen::place_window({512, 512}, boxes, 256, 1024, 1024);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_PlaceWindow)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_Kmeans(benchmark::State& state) {
  uavgen::Rng rng(3);
  std::vector<uavgen::Point2> points;
  for (int i = 0; i < state.range(0); ++i) {
    points.push_back({rng.next_uniform(0, 1000), rng.next_uniform(0, 1000)});
  }
  for (auto _ : state) {
    auto result = uavgen::kmeans(points, 3, 7);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_Kmeans)->Arg(32)->Arg(256)->Arg(2048);

}  // namespace
