#include <benchmark/benchmark.h>

#include <vector>

#include "uavgen/geometry.hpp"
#include "uavgen/rng.hpp"

namespace {

std::vector<uavgen::BBox> random_boxes(std::size_t n) {
  uavgen::Rng rng(1);
  std::vector<uavgen::BBox> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = rng.next_uniform(2, 100);
    const double h = rng.next_uniform(2, 100);
    out.push_back({rng.next_uniform(0, 900 - w), rng.next_uniform(0, 900 - h),
                   w, h});
  }
  return out;
}

void BM_IouPairs(benchmark::State& state) {
  const auto boxes = random_boxes(256);
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        acc += uavgen::iou(boxes[i], boxes[j]);
      }
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_IouPairs);

void BM_Contains(benchmark::State& state) {
  const auto boxes = random_boxes(1024);
  const uavgen::BBox window{100, 100, 256, 256};
  for (auto _ : state) {
    int count = 0;
    for (const auto& b : boxes) {
      count += uavgen::contains(window, b);
    }
    benchmark::DoNotOptimize(count);
  }
}
BENCHMARK(BM_Contains);

}  // namespace

BENCHMARK_MAIN();
