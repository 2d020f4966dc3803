#include <benchmark/benchmark.h>

#include "dci/detector.hpp"
#include "dci/rng.hpp"

namespace {

dci::ToyDetectorModel random_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  dci::ToyDetectorModel model;
  model.weights.assign(model.anchors.box_sizes.size(),
                       std::vector<double>(model.feature_size()));
  for (auto& group : model.weights) {
    for (auto& w : group) w = dci::uniform_range(rng, -0.3, 0.3);
  }
  model.biases.assign(model.anchors.box_sizes.size(), 0.0);
  return model;
}

dci::Image random_image(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  dci::Image image(side, side);
  for (auto& p : image.data()) {
    p = {dci::uniform_unit(rng), dci::uniform_unit(rng), dci::uniform_unit(rng)};
  }
  return image;
}

void BM_Detect(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto model = random_model(1);
  const auto image = random_image(side, 2);
  for (auto _ : state) {
    auto detections = dci::detect(model, image);
    benchmark::DoNotOptimize(detections.data());
  }
}
BENCHMARK(BM_Detect)->Arg(128)->Arg(256);

void BM_DetectGrad(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto model = random_model(3);
  const auto image = random_image(side, 4);
  const auto anchors = dci::build_anchor_grid(side, side, model.anchors);
  const dci::Box target = anchors[anchors.size() / 2].box;
  for (auto _ : state) {
    auto result = dci::detect_grad(model, image, target);
    benchmark::DoNotOptimize(result.grad.data().data());
  }
}
BENCHMARK(BM_DetectGrad)->Arg(128)->Arg(256);

}  // namespace
