#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dci/case_graph.hpp"
#include "dci/scene.hpp"
#include "dci/weather.hpp"

namespace dci {

/// One frame to materialize: a resolved pose plus references that the
/// background provider and labels consume.
struct ManifestEntry {
  std::string entry_id;
  std::string scene_id;
  std::string weather;
  std::string viewpoint_tag;
  Pose pose;
  std::string script;     // continuous part: source scene script
  int sample_index = -1;  // continuous part: position along the trajectory
};

/// Dataset recipe: entries plus the preset table their weather names
/// resolve against. Bit-identical for identical (config, seed).
struct Manifest {
  std::string part;  // "discrete" or "continuous"
  std::uint64_t seed = 0;
  std::vector<WeatherPreset> presets;
  std::vector<ManifestEntry> entries;

  const EnvironmentParams& env_for(const std::string& weather_name) const;
  /// Unique entry ids, every weather resolvable, known part tag.
  void validate() const;
};

/// Camera sweep for the combinatorial part: azimuth/pitch orbits at the
/// given distances around each vehicle location, one entry per element of
/// the Cartesian product (times lighting variants).
struct DiscreteSpec {
  std::vector<double> azimuths;          // radians
  std::vector<double> distances;         // meters
  std::vector<Vec3> locations;           // vehicle positions, world frame
  std::vector<double> pitches;           // radians above the horizon
  std::vector<WeatherPreset> lighting;   // lighting variants
  double fov = 1.0471975511965976;       // vertical, radians
  double aim_height = 0.75;              // camera aim point above the location
  /// When set, a seeded uniform subsample of this size replaces full
  /// enumeration. Must not exceed the product cardinality.
  std::optional<std::uint64_t> cap;
};

/// |azimuths| * |distances| * |locations| * |pitches| * |lighting|, without
/// building anything.
std::uint64_t discrete_cardinality(const DiscreteSpec& spec);

Manifest build_discrete_manifest(const DiscreteSpec& spec, std::uint64_t seed);

/// A scripted scene: a spawn-point graph, endpoints, and the camera rig
/// observing the run.
struct SceneScript {
  std::string name;
  CaseGraph graph;
  int start_node = 0;
  int end_node = 0;
  CameraRig rig = CameraRig::kDriver;
  CameraRigConfig rig_config;
};

/// The seven bundled scripts: TrafficCircle (monitor), ParkingLot,
/// StationaryA, StraightA, TurningA, StationaryB, StraightB (driver).
std::vector<SceneScript> bundled_scene_scripts();

/// Scripts file: {"scripts": [{name, graph (file path), start, end, rig,
/// optional monitor_anchor/step overrides}]}. Graph paths resolve relative
/// to the scripts file.
std::vector<SceneScript> load_scene_scripts(const std::filesystem::path& path);

/// For each (script, weather): A* -> arc-length sampling -> rig poses ->
/// one entry per sample. Unreachable endpoints fail the build.
Manifest build_continuous_manifest(const std::vector<SceneScript>& scripts,
                                   const std::vector<WeatherPreset>& weathers,
                                   double step_meters, std::uint64_t seed);

void save_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace dci
