#include "dci/case_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>

#include <nlohmann/json.hpp>

#include "dci/error.hpp"

namespace dci {

void CaseGraph::add_node(int id, const Vec3& position) {
  if (!nodes_.emplace(id, position).second) {
    throw Error("case graph: duplicate node id " + std::to_string(id));
  }
  adjacency_[id];
}

void CaseGraph::add_edge(int a, int b, double weight) {
  if (a == b) throw Error("case graph: self-loop on node " + std::to_string(a));
  if (!has_node(a) || !has_node(b)) {
    throw Error("case graph: edge (" + std::to_string(a) + "," + std::to_string(b) +
                ") references a missing node");
  }
  const double euclid = (nodes_.at(a) - nodes_.at(b)).norm();
  if (weight <= 0.0) weight = euclid;
  if (weight < euclid - 1e-12) {
    throw Error("case graph: edge (" + std::to_string(a) + "," + std::to_string(b) +
                ") weight " + std::to_string(weight) + " is below the Euclidean distance " +
                std::to_string(euclid));
  }
  if (weight <= 0.0) {
    throw Error("case graph: edge (" + std::to_string(a) + "," + std::to_string(b) +
                ") must have positive weight");
  }
  adjacency_[a][b] = weight;
  adjacency_[b][a] = weight;
  ++edge_total_;
}

const Vec3& CaseGraph::position(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error("case graph: unknown node id " + std::to_string(id));
  return it->second;
}

std::vector<int> CaseGraph::node_ids() const {
  std::vector<int> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, pos] : nodes_) ids.push_back(id);
  return ids;
}

const std::map<int, double>& CaseGraph::neighbors(int id) const {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) throw Error("case graph: unknown node id " + std::to_string(id));
  return it->second;
}

std::optional<Trajectory> shortest_path(const CaseGraph& graph, int start, int end,
                                        SearchStats* stats) {
  if (!graph.has_node(start)) throw Error("shortest_path: unknown start node " + std::to_string(start));
  if (!graph.has_node(end)) throw Error("shortest_path: unknown end node " + std::to_string(end));

  const Vec3 goal = graph.position(end);
  auto heuristic = [&](int id) { return (graph.position(id) - goal).norm(); };

  // (f, id) min-heap; the pair ordering breaks equal-f ties toward the
  // smaller id. Stale entries are skipped on pop.
  using QueueEntry = std::pair<double, int>;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  std::map<int, double> g;
  std::map<int, int> parent;
  std::map<int, bool> settled;

  g[start] = 0.0;
  open.push({heuristic(start), start});
  std::size_t expansions = 0;
  bool found = false;

  while (!open.empty()) {
    auto [f, current] = open.top();
    open.pop();
    if (settled[current]) continue;
    settled[current] = true;
    ++expansions;
    if (current == end) {
      found = true;
      break;
    }
    for (const auto& [next, weight] : graph.neighbors(current)) {
      if (settled[next]) continue;
      double candidate = g[current] + weight;
      auto it = g.find(next);
      if (it == g.end() || candidate < it->second) {
        g[next] = candidate;
        parent[next] = current;
        open.push({candidate + heuristic(next), next});
      }
    }
  }
  if (stats) stats->expansions = expansions;
  if (!found) return std::nullopt;

  Trajectory trajectory;
  trajectory.total_cost = g[end];
  for (int node = end;; node = parent.at(node)) {
    trajectory.nodes.push_back(node);
    if (node == start) break;
  }
  std::reverse(trajectory.nodes.begin(), trajectory.nodes.end());
  return trajectory;
}

std::vector<TrajectorySample> sample_trajectory(const CaseGraph& graph,
                                                const Trajectory& trajectory, double step,
                                                Vec2 default_heading) {
  if (step <= 0.0) throw Error("sample_trajectory: step must be positive");
  if (trajectory.nodes.empty()) throw Error("sample_trajectory: empty trajectory");

  // Polyline with zero-length segments dropped.
  std::vector<Vec3> points;
  points.push_back(graph.position(trajectory.nodes.front()));
  for (std::size_t i = 1; i < trajectory.nodes.size(); ++i) {
    Vec3 p = graph.position(trajectory.nodes[i]);
    if ((p - points.back()).norm() > 0.0) points.push_back(p);
  }

  if (points.size() == 1) {
    return {{points[0], default_heading.normalized()}};
  }

  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < points.size(); ++i) {
    cumulative.push_back(cumulative.back() + (points[i] - points[i - 1]).norm());
  }
  const double total = cumulative.back();
  const std::size_t nseg = points.size() - 1;

  auto heading_of = [&](std::size_t seg) {
    Vec2 h{points[seg + 1].x - points[seg].x, points[seg + 1].y - points[seg].y};
    return h.norm() > 0.0 ? h.normalized() : default_heading.normalized();
  };

  auto sample_at = [&](double s) {
    // A corner hit exactly belongs to the outgoing segment; the endpoint
    // keeps the incoming tangent.
    std::size_t seg = 0;
    while (seg + 1 < nseg && s >= cumulative[seg + 1]) ++seg;
    if (s >= cumulative[seg + 1]) s = cumulative[seg + 1];
    double t = (s - cumulative[seg]) / (cumulative[seg + 1] - cumulative[seg]);
    Vec3 pos = points[seg] + (points[seg + 1] - points[seg]) * t;
    return TrajectorySample{pos, heading_of(seg)};
  };

  std::vector<TrajectorySample> samples;
  double s = 0.0;
  for (std::size_t k = 0; s <= total + 1e-12; ++k, s = step * static_cast<double>(k)) {
    samples.push_back(sample_at(std::min(s, total)));
  }
  const double last_s = step * static_cast<double>(samples.size() - 1);
  if (last_s < total - 1e-9) samples.push_back(sample_at(total));
  return samples;
}

CameraRig camera_rig_from_string(const std::string& name) {
  if (name == "driver") return CameraRig::kDriver;
  if (name == "monitor") return CameraRig::kMonitor;
  if (name == "drone") return CameraRig::kDrone;
  throw Error("unknown camera rig '" + name + "' (expected driver, monitor, or drone)");
}

std::string to_string(CameraRig rig) {
  switch (rig) {
    case CameraRig::kDriver: return "driver";
    case CameraRig::kMonitor: return "monitor";
    case CameraRig::kDrone: return "drone";
  }
  return "?";
}

std::vector<Pose> poses_from_samples(const std::vector<TrajectorySample>& samples,
                                     CameraRig rig, const CameraRigConfig& config) {
  std::vector<Pose> poses;
  poses.reserve(samples.size());
  for (const auto& sample : samples) {
    Pose pose;
    pose.fov = config.fov;
    pose.model_position = sample.position;
    pose.model_angle = std::atan2(sample.heading.y, sample.heading.x);
    const Vec3 heading3{sample.heading.x, sample.heading.y, 0.0};
    switch (rig) {
      case CameraRig::kDriver:
        pose.camera_position = sample.position - heading3 * config.driver_follow_distance +
                               Vec3{0.0, 0.0, config.driver_eye_height};
        pose.camera_direction = heading3;
        pose.camera_up = {0.0, 0.0, 1.0};
        break;
      case CameraRig::kMonitor: {
        pose.camera_position = config.monitor_anchor;
        Vec3 to_vehicle = sample.position - config.monitor_anchor;
        if (to_vehicle.norm() == 0.0) to_vehicle = {1.0, 0.0, 0.0};
        pose.camera_direction = to_vehicle.normalized();
        pose.camera_up = std::abs(pose.camera_direction.z) < 1.0 - 1e-6
                             ? Vec3{0.0, 0.0, 1.0}
                             : Vec3{0.0, 1.0, 0.0};
        break;
      }
      case CameraRig::kDrone:
        pose.camera_position = {sample.position.x, sample.position.y, config.drone_altitude};
        pose.camera_direction = {0.0, 0.0, -1.0};
        pose.camera_up = heading3;
        break;
    }
    pose.validate();
    poses.push_back(pose);
  }
  return poses;
}

CaseGraph load_case_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_case_graph: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_case_graph: invalid JSON in " + path.string() + ": " + e.what());
  }
  CaseGraph graph;
  if (!j.contains("nodes") || !j["nodes"].is_array()) {
    throw ParseError("load_case_graph: " + path.string() + " missing 'nodes' array");
  }
  for (const auto& n : j["nodes"]) {
    for (const char* key : {"id", "x", "y", "z"}) {
      if (!n.contains(key)) {
        throw ParseError("load_case_graph: node missing key '" + std::string(key) + "'");
      }
    }
    graph.add_node(n["id"].get<int>(),
                   {n["x"].get<double>(), n["y"].get<double>(), n["z"].get<double>()});
  }
  if (j.contains("edges")) {
    for (const auto& e : j["edges"]) {
      for (const char* key : {"a", "b"}) {
        if (!e.contains(key)) {
          throw ParseError("load_case_graph: edge missing key '" + std::string(key) + "'");
        }
      }
      graph.add_edge(e["a"].get<int>(), e["b"].get<int>(),
                     e.contains("weight") ? e["weight"].get<double>() : 0.0);
    }
  }
  return graph;
}

void save_case_graph(const std::filesystem::path& path, const CaseGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  for (int id : graph.node_ids()) {
    const Vec3& p = graph.position(id);
    nodes.push_back({{"id", id}, {"x", p.x}, {"y", p.y}, {"z", p.z}});
    for (const auto& [other, weight] : graph.neighbors(id)) {
      if (other > id) edges.push_back({{"a", id}, {"b", other}, {"weight", weight}});
    }
  }
  std::ofstream out(path);
  if (!out) throw IoError("save_case_graph: cannot open " + path.string());
  out << nlohmann::json{{"nodes", nodes}, {"edges", edges}}.dump(2) << '\n';
}

}  // namespace dci
