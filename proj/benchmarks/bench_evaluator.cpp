#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "dci/evaluator.hpp"
#include "dci/rng.hpp"

namespace {

struct ApInstance {
  std::vector<dci::ImageDetection> detections;
  std::vector<dci::GroundTruth> ground_truth;
};

ApInstance random_instance(int frames, int dets_per_frame, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ApInstance instance;
  for (int f = 0; f < frames; ++f) {
    const std::string id = "frame" + std::to_string(f);
    const double x = dci::uniform_range(rng, 0.0, 200.0);
    const double y = dci::uniform_range(rng, 0.0, 200.0);
    const dci::Box gt{x, y, x + 30.0, y + 20.0};
    instance.ground_truth.push_back({gt, id, true});
    for (int d = 0; d < dets_per_frame; ++d) {
      const double jx = dci::uniform_range(rng, -15.0, 15.0);
      const double jy = dci::uniform_range(rng, -15.0, 15.0);
      instance.detections.push_back(
          {{{gt.x0 + jx, gt.y0 + jy, gt.x1 + jx, gt.y1 + jy}, dci::uniform_unit(rng), 0},
           id});
    }
  }
  return instance;
}

void BM_ComputeAp(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  const auto instance = random_instance(frames, 5, 11);
  for (auto _ : state) {
    auto result = dci::compute_ap(instance.detections, instance.ground_truth);
    benchmark::DoNotOptimize(result.ap_percent);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(instance.detections.size()));
}
BENCHMARK(BM_ComputeAp)->Arg(50)->Arg(500);

}  // namespace
