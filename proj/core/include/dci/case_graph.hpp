#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dci/scene.hpp"
#include "dci/vec.hpp"

namespace dci {

/// Undirected weighted spawn-point graph. Edge weights default to the
/// Euclidean node distance and may be overridden upward only, which keeps
/// the straight-line heuristic admissible.
class CaseGraph {
 public:
  void add_node(int id, const Vec3& position);
  /// weight <= 0 means "use the Euclidean distance". Explicit weights below
  /// the Euclidean distance are rejected.
  void add_edge(int a, int b, double weight = 0.0);

  bool has_node(int id) const { return nodes_.count(id) != 0; }
  const Vec3& position(int id) const;
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_total_; }
  std::vector<int> node_ids() const;

  /// Neighbors of `id` with edge weights, ordered by neighbor id.
  const std::map<int, double>& neighbors(int id) const;

 private:
  std::map<int, Vec3> nodes_;
  std::map<int, std::map<int, double>> adjacency_;
  std::size_t edge_total_ = 0;
};

/// A* result: the optimal node sequence and its cost.
struct Trajectory {
  std::vector<int> nodes;
  double total_cost = 0.0;
};

struct SearchStats {
  std::size_t expansions = 0;  // nodes popped and settled
};

/// A* with f = g + straight-line distance to the goal; ties in f break
/// toward the smaller node id. Returns nullopt when the goal is
/// unreachable. Throws if either endpoint is missing.
std::optional<Trajectory> shortest_path(const CaseGraph& graph, int start, int end,
                                        SearchStats* stats = nullptr);

/// Position plus unit 2D travel direction at one point of a trajectory.
struct TrajectorySample {
  Vec3 position;
  Vec2 heading;
};

/// Samples the trajectory polyline at arc-length multiples of `step`,
/// always including both endpoints. Headings are segment tangents; a
/// sample landing exactly on a corner takes the outgoing segment. A
/// single-node trajectory yields one sample with `default_heading`.
std::vector<TrajectorySample> sample_trajectory(const CaseGraph& graph,
                                                const Trajectory& trajectory, double step,
                                                Vec2 default_heading = {1.0, 0.0});

enum class CameraRig { kDriver, kMonitor, kDrone };

CameraRig camera_rig_from_string(const std::string& name);
std::string to_string(CameraRig rig);

/// Rig geometry; values are configuration, not measurements.
struct CameraRigConfig {
  double driver_eye_height = 1.2;     // meters above the sample
  double driver_follow_distance = 6.0;  // meters behind, along -heading
  Vec3 monitor_anchor{0.0, 0.0, 5.0};
  double drone_altitude = 30.0;
  double fov = 1.0471975511965976;  // 60 deg vertical
};

/// One pose per sample, with the vehicle placed at the sample position and
/// yawed along its heading.
///  - driver: camera follows behind the vehicle at eye height, looking
///    along the heading;
///  - monitor: camera fixed at the anchor, looking at the vehicle;
///  - drone: camera overhead at fixed altitude looking straight down,
///    frame "up" aligned with the heading.
std::vector<Pose> poses_from_samples(const std::vector<TrajectorySample>& samples,
                                     CameraRig rig, const CameraRigConfig& config = {});

/// Graph file: {"nodes": [{id, x, y, z}], "edges": [{a, b, weight?}]}.
CaseGraph load_case_graph(const std::filesystem::path& path);
void save_case_graph(const std::filesystem::path& path, const CaseGraph& graph);

}  // namespace dci
