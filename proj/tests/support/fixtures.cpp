#include "support/fixtures.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "dci/error.hpp"
#include "dci/weather.hpp"

#ifdef _WIN32
#include <process.h>
#else
#include <unistd.h>
#endif

namespace dci::testfix {

std::filesystem::path asset_dir() { return std::filesystem::path(DCI_ASSET_DIR); }

std::filesystem::path car_obj_path() { return asset_dir() / "car.obj"; }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const unsigned n = counter.fetch_add(1);
  path_ = std::filesystem::temp_directory_path() /
          ("dci_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(n));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Mesh mesh_from_source(const std::string& obj_text) {
  std::istringstream in(obj_text);
  return parse_obj(in, "inline.obj");
}

Mesh single_triangle_mesh(const Vec3& a, const Vec3& b, const Vec3& c) {
  std::ostringstream obj;
  obj.precision(17);
  for (const Vec3& v : {a, b, c}) {
    obj << "v " << v.x << " " << v.y << " " << v.z << "\n";
  }
  obj << "f 1 2 3\n";
  return mesh_from_source(obj.str());
}

Mesh screen_filling_triangle() {
  return single_triangle_mesh({-30.0, -30.0, 0.0}, {30.0, -30.0, 0.0}, {0.0, 30.0, 0.0});
}

Pose front_pose() {
  Pose pose;
  pose.camera_position = {0.0, 0.0, -5.0};
  pose.camera_direction = {0.0, 0.0, 1.0};
  pose.camera_up = {0.0, 1.0, 0.0};
  pose.fov = 1.5707963267948966;
  return pose;
}

EnvironmentParams ambient_only(double intensity) {
  EnvironmentParams env;
  env.ambient_intensity = intensity;
  env.directional_intensity = 0.0;
  env.ambient_color = {1.0, 1.0, 1.0};
  env.directional_color = {1.0, 1.0, 1.0};
  env.light_direction = {0.0, 0.0, 1.0};
  return env;
}

ScenePack build_scene_pack(std::uint64_t entry_cap, int width, int height,
                           std::uint64_t seed, int bins_per_side) {
  ScenePack pack;
  pack.width = width;
  pack.height = height;
  pack.mesh = load_mesh(car_obj_path());
  pack.texture = Texture(pack.mesh.face_count(), bins_per_side);

  DiscreteSpec spec;
  for (int i = 0; i < 8; ++i) {
    spec.azimuths.push_back(i * 0.7853981633974483);
  }
  spec.distances = {7.0, 10.0};
  spec.locations = {{0.0, 0.0, 0.0}};
  spec.pitches = {0.25, 0.45};
  spec.lighting = {builtin_weather_presets().front()};
  const std::uint64_t total = discrete_cardinality(spec);
  if (entry_cap < total) spec.cap = entry_cap;
  pack.manifest = build_discrete_manifest(spec, seed);

  SyntheticBackgroundProvider provider;
  for (const auto& entry : pack.manifest.entries) {
    BackgroundRequest request;
    request.scene_id = entry.scene_id;
    request.weather_tag = entry.weather;
    request.viewpoint_tag = entry.viewpoint_tag;
    request.pose_hint = entry.pose;
    request.env_hint = pack.manifest.env_for(entry.weather);
    request.width = width;
    request.height = height;
    pack.scenes.push_back(build_scene_instance(pack.mesh, pack.texture, provider, request));
  }
  return pack;
}

void training_split(const ScenePack& pack, std::vector<TrainSample>& positives,
                    std::vector<Image>& negatives) {
  for (const auto& scene : pack.scenes) {
    if (scene.instance.vehicle_visible && scene.instance.ground_truth_box.has_value()) {
      positives.push_back({scene.composite, *scene.instance.ground_truth_box});
    }
    negatives.push_back(scene.instance.background);
  }
}

}  // namespace dci::testfix
