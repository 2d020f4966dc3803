#include "dci/manifest.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dci/error.hpp"
#include "dci/json_io.hpp"
#include "dci/rng.hpp"

namespace dci {
namespace {

std::string pad_index(std::uint64_t value, int width) {
  std::ostringstream os;
  os.width(width);
  os.fill('0');
  os << value;
  return os.str();
}

Vec3 up_vector_for(const Vec3& direction) {
  return std::abs(direction.z) < 1.0 - 1e-6 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
}

nlohmann::json preset_to_json(const WeatherPreset& p) {
  return {{"name", p.name}, {"env", to_json(p.env)}};
}

WeatherPreset preset_from_json(const nlohmann::json& j) {
  if (!j.contains("name") || !j.contains("env")) {
    throw ParseError("manifest preset: missing 'name' or 'env'");
  }
  return {j["name"].get<std::string>(), env_from_json(j["env"], "manifest preset env")};
}

}  // namespace

const EnvironmentParams& Manifest::env_for(const std::string& weather_name) const {
  return find_weather_preset(presets, weather_name).env;
}

void Manifest::validate() const {
  if (part != "discrete" && part != "continuous") {
    throw Error("manifest part must be 'discrete' or 'continuous', got '" + part + "'");
  }
  std::set<std::string> ids;
  for (const auto& entry : entries) {
    if (!ids.insert(entry.entry_id).second) {
      throw Error("manifest: duplicate entry id '" + entry.entry_id + "'");
    }
    env_for(entry.weather);  // throws for unresolvable names
    entry.pose.validate();
  }
}

std::uint64_t discrete_cardinality(const DiscreteSpec& spec) {
  return static_cast<std::uint64_t>(spec.azimuths.size()) * spec.distances.size() *
         spec.locations.size() * spec.pitches.size() * spec.lighting.size();
}

Manifest build_discrete_manifest(const DiscreteSpec& spec, std::uint64_t seed) {
  auto require_nonempty = [](std::size_t n, const char* what) {
    if (n == 0) throw Error(std::string("discrete manifest: empty ") + what + " list");
  };
  require_nonempty(spec.azimuths.size(), "azimuth");
  require_nonempty(spec.distances.size(), "distance");
  require_nonempty(spec.locations.size(), "location");
  require_nonempty(spec.pitches.size(), "pitch");
  require_nonempty(spec.lighting.size(), "lighting");

  const std::uint64_t total = discrete_cardinality(spec);
  std::vector<std::uint64_t> chosen;
  if (spec.cap) {
    if (*spec.cap > total) {
      throw Error("discrete manifest: cap " + std::to_string(*spec.cap) +
                  " exceeds the product cardinality " + std::to_string(total));
    }
    std::mt19937_64 rng(seed);
    chosen = sample_indices(rng, total, *spec.cap);
  } else {
    chosen.resize(total);
    for (std::uint64_t i = 0; i < total; ++i) chosen[i] = i;
  }

  const std::uint64_t n_d = spec.distances.size();
  const std::uint64_t n_l = spec.locations.size();
  const std::uint64_t n_p = spec.pitches.size();
  const std::uint64_t n_w = spec.lighting.size();

  Manifest manifest;
  manifest.part = "discrete";
  manifest.seed = seed;
  manifest.presets = spec.lighting;
  std::set<std::string> names;
  for (const auto& p : manifest.presets) {
    if (!names.insert(p.name).second) {
      throw Error("discrete manifest: duplicate lighting variant '" + p.name + "'");
    }
  }

  manifest.entries.reserve(chosen.size());
  for (std::uint64_t index : chosen) {
    std::uint64_t rest = index;
    const std::uint64_t iw = rest % n_w; rest /= n_w;
    const std::uint64_t ip = rest % n_p; rest /= n_p;
    const std::uint64_t il = rest % n_l; rest /= n_l;
    const std::uint64_t id = rest % n_d; rest /= n_d;
    const std::uint64_t ia = rest;

    const double azimuth = spec.azimuths[ia];
    const double distance = spec.distances[id];
    const Vec3& location = spec.locations[il];
    const double pitch = spec.pitches[ip];

    // Camera orbits the aim point above the vehicle location.
    const Vec3 aim = location + Vec3{0.0, 0.0, spec.aim_height};
    const Vec3 offset{distance * std::cos(pitch) * std::cos(azimuth),
                      distance * std::cos(pitch) * std::sin(azimuth),
                      distance * std::sin(pitch)};
    ManifestEntry entry;
    entry.entry_id = "d" + pad_index(index, 8);
    entry.scene_id = "loc" + pad_index(il, 5);
    entry.weather = spec.lighting[iw].name;
    entry.viewpoint_tag = "orbit";
    entry.pose.model_angle = 0.0;
    entry.pose.model_position = location;
    entry.pose.camera_position = aim + offset;
    entry.pose.camera_direction = (-offset).normalized();
    entry.pose.camera_up = up_vector_for(entry.pose.camera_direction);
    entry.pose.fov = spec.fov;
    entry.pose.validate();
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

std::vector<SceneScript> bundled_scene_scripts() {
  std::vector<SceneScript> scripts;

  {
    SceneScript s;
    s.name = "TrafficCircle";
    const int ring = 8;
    const double radius = 12.0;
    for (int i = 0; i < ring; ++i) {
      double a = 2.0 * 3.14159265358979323846 * i / ring;
      s.graph.add_node(i, {radius * std::cos(a), radius * std::sin(a), 0.0});
    }
    for (int i = 0; i < ring; ++i) s.graph.add_edge(i, (i + 1) % ring);
    s.start_node = 0;
    s.end_node = 4;
    s.rig = CameraRig::kMonitor;
    s.rig_config.monitor_anchor = {0.0, 0.0, 6.0};
    scripts.push_back(std::move(s));
  }
  {
    SceneScript s;
    s.name = "ParkingLot";
    s.graph.add_node(0, {0.0, 0.0, 0.0});
    s.graph.add_node(1, {7.0, 0.0, 0.0});
    s.graph.add_node(2, {14.0, 0.0, 0.0});
    s.graph.add_node(3, {0.0, 6.0, 0.0});
    s.graph.add_node(4, {7.0, 6.0, 0.0});
    s.graph.add_node(5, {14.0, 6.0, 0.0});
    s.graph.add_edge(0, 1);
    s.graph.add_edge(1, 2);
    s.graph.add_edge(3, 4);
    s.graph.add_edge(4, 5);
    s.graph.add_edge(0, 3);
    s.graph.add_edge(1, 4);
    s.graph.add_edge(2, 5);
    s.start_node = 5;
    s.end_node = 0;
    scripts.push_back(std::move(s));
  }
  {
    SceneScript s;
    s.name = "StationaryA";
    s.graph.add_node(0, {0.0, 0.0, 0.0});
    s.start_node = s.end_node = 0;
    scripts.push_back(std::move(s));
  }
  {
    SceneScript s;
    s.name = "StraightA";
    for (int i = 0; i < 5; ++i) s.graph.add_node(i, {25.0 * i, 0.0, 0.0});
    for (int i = 0; i < 4; ++i) s.graph.add_edge(i, i + 1);
    s.start_node = 0;
    s.end_node = 4;
    scripts.push_back(std::move(s));
  }
  {
    SceneScript s;
    s.name = "TurningA";
    s.graph.add_node(0, {0.0, 0.0, 0.0});
    s.graph.add_node(1, {15.0, 0.0, 0.0});
    s.graph.add_node(2, {30.0, 0.0, 0.0});
    s.graph.add_node(3, {30.0, 15.0, 0.0});
    s.graph.add_node(4, {30.0, 30.0, 0.0});
    for (int i = 0; i < 4; ++i) s.graph.add_edge(i, i + 1);
    s.start_node = 0;
    s.end_node = 4;
    scripts.push_back(std::move(s));
  }
  {
    SceneScript s;
    s.name = "StationaryB";
    s.graph.add_node(0, {6.0, -4.0, 0.0});
    s.start_node = s.end_node = 0;
    scripts.push_back(std::move(s));
  }
  {
    SceneScript s;
    s.name = "StraightB";
    for (int i = 0; i < 3; ++i) s.graph.add_node(i, {0.0, 40.0 * i, 0.0});
    for (int i = 0; i < 2; ++i) s.graph.add_edge(i, i + 1);
    s.start_node = 0;
    s.end_node = 2;
    scripts.push_back(std::move(s));
  }
  return scripts;
}

std::vector<SceneScript> load_scene_scripts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_scene_scripts: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_scene_scripts: invalid JSON in " + path.string() + ": " + e.what());
  }
  if (!j.contains("scripts") || !j["scripts"].is_array()) {
    throw ParseError("load_scene_scripts: " + path.string() + " missing 'scripts' array");
  }
  const auto base = path.parent_path();
  std::vector<SceneScript> scripts;
  for (const auto& s : j["scripts"]) {
    for (const char* key : {"name", "graph", "start", "end", "rig"}) {
      if (!s.contains(key)) {
        throw ParseError("load_scene_scripts: script missing key '" + std::string(key) + "'");
      }
    }
    SceneScript script;
    script.name = s["name"].get<std::string>();
    script.graph = load_case_graph(base / s["graph"].get<std::string>());
    script.start_node = s["start"].get<int>();
    script.end_node = s["end"].get<int>();
    script.rig = camera_rig_from_string(s["rig"].get<std::string>());
    if (s.contains("monitor_anchor")) {
      script.rig_config.monitor_anchor =
          vec3_from_json(s["monitor_anchor"], "script monitor_anchor");
    }
    if (s.contains("driver_eye_height")) {
      script.rig_config.driver_eye_height = s["driver_eye_height"].get<double>();
    }
    if (s.contains("driver_follow_distance")) {
      script.rig_config.driver_follow_distance = s["driver_follow_distance"].get<double>();
    }
    if (s.contains("drone_altitude")) {
      script.rig_config.drone_altitude = s["drone_altitude"].get<double>();
    }
    scripts.push_back(std::move(script));
  }
  return scripts;
}

Manifest build_continuous_manifest(const std::vector<SceneScript>& scripts,
                                   const std::vector<WeatherPreset>& weathers,
                                   double step_meters, std::uint64_t seed) {
  if (step_meters <= 0.0) throw Error("continuous manifest: step must be positive");
  if (scripts.empty()) throw Error("continuous manifest: no scene scripts");
  if (weathers.empty()) throw Error("continuous manifest: no weather presets");

  Manifest manifest;
  manifest.part = "continuous";
  manifest.seed = seed;
  manifest.presets = weathers;

  for (const auto& script : scripts) {
    auto trajectory = shortest_path(script.graph, script.start_node, script.end_node);
    if (!trajectory) {
      throw Error("continuous manifest: script '" + script.name + "' endpoints " +
                  std::to_string(script.start_node) + " -> " +
                  std::to_string(script.end_node) + " are unreachable");
    }
    auto samples = sample_trajectory(script.graph, *trajectory, step_meters);
    auto poses = poses_from_samples(samples, script.rig, script.rig_config);
    for (const auto& weather : weathers) {
      for (std::size_t k = 0; k < poses.size(); ++k) {
        ManifestEntry entry;
        entry.entry_id = "c_" + script.name + "_" + weather.name + "_" + pad_index(k, 4);
        entry.scene_id = script.name;
        entry.weather = weather.name;
        entry.viewpoint_tag = to_string(script.rig);
        entry.pose = poses[k];
        entry.script = script.name;
        entry.sample_index = static_cast<int>(k);
        manifest.entries.push_back(std::move(entry));
      }
    }
  }
  manifest.validate();
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  nlohmann::json presets = nlohmann::json::array();
  for (const auto& p : manifest.presets) presets.push_back(preset_to_json(p));
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::json je = {
        {"entry_id", e.entry_id}, {"scene_id", e.scene_id},   {"weather", e.weather},
        {"viewpoint", e.viewpoint_tag}, {"pose", to_json(e.pose)},
    };
    if (!e.script.empty()) je["script"] = e.script;
    if (e.sample_index >= 0) je["sample_index"] = e.sample_index;
    entries.push_back(std::move(je));
  }
  nlohmann::json j = {{"part", manifest.part},
                      {"seed", manifest.seed},
                      {"presets", presets},
                      {"entries", entries}};
  std::ofstream out(path);
  if (!out) throw IoError("save_manifest: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_manifest: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_manifest: invalid JSON in " + path.string() + ": " + e.what());
  }
  Manifest manifest;
  for (const char* key : {"part", "seed", "presets", "entries"}) {
    if (!j.contains(key)) {
      throw ParseError("load_manifest: " + path.string() + " missing key '" + key + "'");
    }
  }
  manifest.part = j["part"].get<std::string>();
  manifest.seed = j["seed"].get<std::uint64_t>();
  for (const auto& p : j["presets"]) manifest.presets.push_back(preset_from_json(p));
  for (const auto& e : j["entries"]) {
    ManifestEntry entry;
    for (const char* key : {"entry_id", "scene_id", "weather", "viewpoint", "pose"}) {
      if (!e.contains(key)) {
        throw ParseError("load_manifest: entry missing key '" + std::string(key) + "'");
      }
    }
    entry.entry_id = e["entry_id"].get<std::string>();
    entry.scene_id = e["scene_id"].get<std::string>();
    entry.weather = e["weather"].get<std::string>();
    entry.viewpoint_tag = e["viewpoint"].get<std::string>();
    entry.pose = pose_from_json(e["pose"], "manifest entry " + entry.entry_id);
    if (e.contains("script")) entry.script = e["script"].get<std::string>();
    if (e.contains("sample_index")) entry.sample_index = e["sample_index"].get<int>();
    manifest.entries.push_back(std::move(entry));
  }
  manifest.validate();
  return manifest;
}

}  // namespace dci
