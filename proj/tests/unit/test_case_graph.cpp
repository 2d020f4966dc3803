#include <doctest.h>

#include <cmath>
#include <random>

#include "dci/case_graph.hpp"
#include "dci/error.hpp"
#include "dci/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace dci;

namespace {

CaseGraph line_graph() {
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  g.add_node(1, {1.0, 0.0, 0.0});
  g.add_node(2, {2.0, 0.0, 0.0});
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  return g;
}

CaseGraph random_connected_graph(std::mt19937_64& rng, int max_nodes = 12) {
  CaseGraph g;
  const int n = 2 + static_cast<int>(uniform_below(rng, max_nodes - 1));
  for (int i = 0; i < n; ++i) {
    g.add_node(i, {uniform_range(rng, -20.0, 20.0), uniform_range(rng, -20.0, 20.0), 0.0});
  }
  // Spanning chain keeps it connected; extra random edges add shortcuts.
  for (int i = 1; i < n; ++i) {
    const int j = static_cast<int>(uniform_below(rng, i));
    const double base = (g.position(i) - g.position(j)).norm();
    g.add_edge(i, j, base * uniform_range(rng, 1.0, 1.8));
  }
  const int extra = static_cast<int>(uniform_below(rng, n));
  for (int e = 0; e < extra; ++e) {
    const int a = static_cast<int>(uniform_below(rng, n));
    const int b = static_cast<int>(uniform_below(rng, n));
    if (a == b) continue;
    const double base = (g.position(a) - g.position(b)).norm();
    if (base == 0.0) continue;
    try {
      g.add_edge(a, b, base * uniform_range(rng, 1.0, 1.5));
    } catch (const Error&) {
      // duplicate edge with a different weight; ignore
    }
  }
  return g;
}

}  // namespace

TEST_CASE("edge weights below the Euclidean distance are rejected") {
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  g.add_node(1, {3.0, 4.0, 0.0});
  CHECK_THROWS_AS(g.add_edge(0, 1, 4.9), Error);
  CHECK_NOTHROW(g.add_edge(0, 1, 5.0));
  CHECK(g.neighbors(0).at(1) == 5.0);
}

TEST_CASE("default edge weights are the Euclidean distance") {
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  g.add_node(1, {3.0, 4.0, 0.0});
  g.add_edge(0, 1);
  CHECK(g.neighbors(0).at(1) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(g.neighbors(1).at(0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("self loops and unknown endpoints are rejected") {
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  CHECK_THROWS_AS(g.add_edge(0, 0), Error);
  CHECK_THROWS_AS(g.add_edge(0, 5), Error);
  CHECK_THROWS_AS(g.position(9), Error);
}

TEST_CASE("shortest_path start equals end") {
  const CaseGraph g = line_graph();
  const auto t = shortest_path(g, 1, 1);
  REQUIRE(t.has_value());
  CHECK(t->nodes == std::vector<int>{1});
  CHECK(t->total_cost == 0.0);
}

TEST_CASE("shortest_path walks the line graph for cost 2") {
  const CaseGraph g = line_graph();
  const auto t = shortest_path(g, 0, 2);
  REQUIRE(t.has_value());
  CHECK(t->nodes == std::vector<int>{0, 1, 2});
  CHECK(t->total_cost == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("shortest_path reports unreachable goals as nullopt") {
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  g.add_node(1, {1.0, 0.0, 0.0});
  g.add_node(2, {9.0, 0.0, 0.0});
  g.add_edge(0, 1);
  CHECK_FALSE(shortest_path(g, 0, 2).has_value());
}

TEST_CASE("shortest_path throws on unknown endpoints") {
  const CaseGraph g = line_graph();
  CHECK_THROWS_AS(shortest_path(g, 0, 77), Error);
  CHECK_THROWS_AS(shortest_path(g, -3, 0), Error);
}

TEST_CASE("equal-cost routes resolve toward smaller node ids") {
  // Symmetric diamond: 0 -> {1, 5} -> 9, both routes identical in length.
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  g.add_node(1, {1.0, 1.0, 0.0});
  g.add_node(5, {1.0, -1.0, 0.0});
  g.add_node(9, {2.0, 0.0, 0.0});
  g.add_edge(0, 1);
  g.add_edge(0, 5);
  g.add_edge(1, 9);
  g.add_edge(5, 9);
  const auto t = shortest_path(g, 0, 9);
  REQUIRE(t.has_value());
  CHECK(t->nodes == std::vector<int>{0, 1, 9});
}

TEST_CASE("search cost matches Dijkstra on random graphs") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    const CaseGraph g = random_connected_graph(rng);
    const int n = static_cast<int>(g.node_count());
    const int start = static_cast<int>(uniform_below(rng, n));
    const int goal = static_cast<int>(uniform_below(rng, n));
    SearchStats stats;
    const auto t = shortest_path(g, start, goal, &stats);
    std::size_t dijkstra_settled = 0;
    const auto d = testoracle::dijkstra_cost(g, start, goal, &dijkstra_settled);
    REQUIRE(t.has_value() == d.has_value());
    if (t.has_value()) {
      CHECK(t->total_cost == doctest::Approx(*d).epsilon(1e-9));
      CHECK(stats.expansions <= dijkstra_settled);
      // The returned node sequence must cost what it claims.
      double walked = 0.0;
      for (std::size_t i = 1; i < t->nodes.size(); ++i) {
        walked += g.neighbors(t->nodes[i - 1]).at(t->nodes[i]);
      }
      CHECK(walked == doctest::Approx(t->total_cost).epsilon(1e-9));
    }
  }
}

TEST_CASE("trajectory sampling walks 10 m at 2.5 m steps into five samples") {
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  g.add_node(1, {10.0, 0.0, 0.0});
  g.add_edge(0, 1);
  const auto t = shortest_path(g, 0, 1);
  REQUIRE(t.has_value());
  const auto samples = sample_trajectory(g, *t, 2.5);
  REQUIRE(samples.size() == 5);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].position.x == doctest::Approx(2.5 * i).epsilon(1e-12));
    CHECK(samples[i].position.y == 0.0);
    CHECK(samples[i].heading.x == doctest::Approx(1.0));
    CHECK(samples[i].heading.y == doctest::Approx(0.0));
  }
}

TEST_CASE("trajectory sampling always includes the endpoint") {
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  g.add_node(1, {10.0, 0.0, 0.0});
  g.add_edge(0, 1);
  const auto t = shortest_path(g, 0, 1);

  const auto coarse = sample_trajectory(g, *t, 20.0);
  REQUIRE(coarse.size() == 2);
  CHECK(coarse.back().position.x == doctest::Approx(10.0));

  const auto uneven = sample_trajectory(g, *t, 7.0);
  REQUIRE(uneven.size() == 3);
  CHECK(uneven[1].position.x == doctest::Approx(7.0));
  CHECK(uneven[2].position.x == doctest::Approx(10.0));
}

TEST_CASE("a sample landing on a corner takes the outgoing heading") {
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  g.add_node(1, {5.0, 0.0, 0.0});
  g.add_node(2, {5.0, 5.0, 0.0});
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  const auto t = shortest_path(g, 0, 2);
  REQUIRE(t.has_value());
  const auto samples = sample_trajectory(g, *t, 5.0);
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].heading.x == doctest::Approx(1.0));
  CHECK(samples[1].position.x == doctest::Approx(5.0));
  CHECK(samples[1].position.y == doctest::Approx(0.0).scale(1.0));
  CHECK(samples[1].heading.x == doctest::Approx(0.0).scale(1.0));
  CHECK(samples[1].heading.y == doctest::Approx(1.0));
  CHECK(samples[2].heading.y == doctest::Approx(1.0));
}

TEST_CASE("a single-node trajectory uses the default heading") {
  CaseGraph g;
  g.add_node(4, {2.0, 3.0, 0.0});
  const auto t = shortest_path(g, 4, 4);
  const auto samples = sample_trajectory(g, *t, 5.0);
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].position == Vec3{2.0, 3.0, 0.0});
  CHECK(samples[0].heading.x == 1.0);
  CHECK(samples[0].heading.y == 0.0);

  const auto custom = sample_trajectory(g, *t, 5.0, {0.0, -1.0});
  CHECK(custom[0].heading.y == -1.0);
}

TEST_CASE("sample positions stay on the polyline") {
  std::mt19937_64 rng(77);
  CaseGraph g = random_connected_graph(rng, 8);
  const int n = static_cast<int>(g.node_count());
  const auto t = shortest_path(g, 0, n - 1);
  REQUIRE(t.has_value());
  const auto samples = sample_trajectory(g, *t, 1.7);
  REQUIRE(samples.size() >= 2);
  CHECK(samples.front().position == g.position(t->nodes.front()));
  CHECK((samples.back().position - g.position(t->nodes.back())).norm() <= 1e-9);
  for (const auto& s : samples) {
    CHECK(std::abs(s.heading.x * s.heading.x + s.heading.y * s.heading.y - 1.0) <= 1e-9);
  }
}

TEST_CASE("sample_trajectory rejects a nonpositive step") {
  const CaseGraph g = line_graph();
  const auto t = shortest_path(g, 0, 2);
  CHECK_THROWS_AS(sample_trajectory(g, *t, 0.0), Error);
  CHECK_THROWS_AS(sample_trajectory(g, *t, -1.0), Error);
}

TEST_CASE("driver rig follows behind the vehicle at eye height") {
  std::vector<TrajectorySample> samples{{{0.0, 0.0, 0.0}, {1.0, 0.0}}};
  const auto poses = poses_from_samples(samples, CameraRig::kDriver);
  REQUIRE(poses.size() == 1);
  const Pose& p = poses[0];
  CHECK(p.model_position == Vec3{0.0, 0.0, 0.0});
  CHECK(p.model_angle == doctest::Approx(0.0).scale(1.0));
  CHECK(p.camera_position.x == doctest::Approx(-6.0));
  CHECK(p.camera_position.y == doctest::Approx(0.0).scale(1.0));
  CHECK(p.camera_position.z == doctest::Approx(1.2));
  CHECK(p.camera_direction.x == doctest::Approx(1.0));
  CHECK(p.camera_up.z == doctest::Approx(1.0));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("driver rig yaws the vehicle along the heading") {
  std::vector<TrajectorySample> samples{{{3.0, -2.0, 0.0}, {0.0, 1.0}}};
  const auto poses = poses_from_samples(samples, CameraRig::kDriver);
  const Pose& p = poses[0];
  CHECK(p.model_angle == doctest::Approx(1.5707963267948966));
  CHECK(p.camera_position.x == doctest::Approx(3.0));
  CHECK(p.camera_position.y == doctest::Approx(-8.0));
  CHECK(p.camera_direction.y == doctest::Approx(1.0));
}

TEST_CASE("monitor rig looks from the anchor toward the sample") {
  std::vector<TrajectorySample> samples{{{0.0, 10.0, 0.0}, {1.0, 0.0}}};
  CameraRigConfig config;
  config.monitor_anchor = {0.0, 0.0, 5.0};
  const auto poses = poses_from_samples(samples, CameraRig::kMonitor, config);
  const Pose& p = poses[0];
  CHECK(p.camera_position == Vec3{0.0, 0.0, 5.0});
  const Vec3 expect = Vec3{0.0, 10.0, -5.0}.normalized();
  CHECK(p.camera_direction.x == doctest::Approx(expect.x).scale(1.0));
  CHECK(p.camera_direction.y == doctest::Approx(expect.y));
  CHECK(p.camera_direction.z == doctest::Approx(expect.z));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("drone rig hovers overhead looking straight down") {
  std::vector<TrajectorySample> samples{{{3.0, 4.0, 0.0}, {0.0, 1.0}}};
  const auto poses = poses_from_samples(samples, CameraRig::kDrone);
  const Pose& p = poses[0];
  CHECK(p.camera_position.x == doctest::Approx(3.0));
  CHECK(p.camera_position.y == doctest::Approx(4.0));
  CHECK(p.camera_position.z == doctest::Approx(30.0));
  CHECK(p.camera_direction.z == doctest::Approx(-1.0));
  // Frame up follows the heading so the vehicle stays upright in frame.
  CHECK(p.camera_up.x == doctest::Approx(0.0).scale(1.0));
  CHECK(p.camera_up.y == doctest::Approx(1.0));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("camera rig names round-trip and reject unknowns") {
  CHECK(camera_rig_from_string("driver") == CameraRig::kDriver);
  CHECK(camera_rig_from_string("monitor") == CameraRig::kMonitor);
  CHECK(camera_rig_from_string("drone") == CameraRig::kDrone);
  CHECK(to_string(CameraRig::kMonitor) == "monitor");
  const auto msg = testfix::capture_error([] { camera_rig_from_string("wing"); });
  CHECK(testfix::contains(msg, "wing"));
}

TEST_CASE("case graph JSON round-trips nodes, edges, and weights") {
  testfix::TempDir tmp("graph");
  CaseGraph g;
  g.add_node(0, {0.0, 0.0, 0.0});
  g.add_node(3, {6.0, 0.0, 0.0});
  g.add_node(7, {6.0, 8.0, 0.0});
  g.add_edge(0, 3);
  g.add_edge(3, 7, 11.5);
  const auto path = tmp.file("g.json");
  save_case_graph(path, g);
  const CaseGraph back = load_case_graph(path);
  CHECK(back.node_count() == 3);
  CHECK(back.edge_count() == 2);
  CHECK(back.position(7) == Vec3{6.0, 8.0, 0.0});
  CHECK(back.neighbors(3).at(7) == 11.5);
  CHECK(back.neighbors(3).at(0) == g.neighbors(3).at(0));
}
