#include <benchmark/benchmark.h>

#include "dci/case_graph.hpp"
#include "dci/rng.hpp"

namespace {

/// Grid graph with jittered node positions and rook adjacency; edge weights
/// stay at the Euclidean default so the A* heuristic is tight but not exact.
dci::CaseGraph grid_graph(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  dci::CaseGraph graph;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      graph.add_node(r * side + c,
                     {10.0 * c + dci::uniform_range(rng, -2.0, 2.0),
                      10.0 * r + dci::uniform_range(rng, -2.0, 2.0), 0.0});
    }
  }
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (c + 1 < side) graph.add_edge(r * side + c, r * side + c + 1);
      if (r + 1 < side) graph.add_edge(r * side + c, (r + 1) * side + c);
    }
  }
  return graph;
}

void BM_ShortestPath(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto graph = grid_graph(side, 17);
  const int goal = side * side - 1;
  for (auto _ : state) {
    auto trajectory = dci::shortest_path(graph, 0, goal);
    benchmark::DoNotOptimize(trajectory->total_cost);
  }
}
BENCHMARK(BM_ShortestPath)->Arg(10)->Arg(30);

void BM_SampleTrajectory(benchmark::State& state) {
  const auto graph = grid_graph(20, 23);
  const auto trajectory = dci::shortest_path(graph, 0, 20 * 20 - 1);
  for (auto _ : state) {
    auto samples = dci::sample_trajectory(graph, *trajectory, 2.5);
    benchmark::DoNotOptimize(samples.data());
  }
}
BENCHMARK(BM_SampleTrajectory);

}  // namespace
