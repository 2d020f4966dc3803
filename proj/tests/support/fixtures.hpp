#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dci/background.hpp"
#include "dci/compositor.hpp"
#include "dci/detector.hpp"
#include "dci/manifest.hpp"
#include "dci/mesh.hpp"
#include "dci/scene.hpp"
#include "dci/texture.hpp"

namespace dci::testfix {

/// Runs `fn`, returning the thrown message or "" when nothing threw.
template <typename Fn>
std::string capture_error(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::filesystem::path asset_dir();
std::filesystem::path car_obj_path();

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

Mesh mesh_from_source(const std::string& obj_text);
Mesh single_triangle_mesh(const Vec3& a, const Vec3& b, const Vec3& c);
/// Covers the whole frame under front_pose().
Mesh screen_filling_triangle();

/// Camera at (0,0,-5) looking +z, up +y, 90 degree vertical fov.
Pose front_pose();
/// White ambient light only; pixel values equal the selected texture bin
/// scaled by `intensity`.
EnvironmentParams ambient_only(double intensity = 1.0);

/// Small discrete camera orbit around the bundled car, rendered in memory
/// against the synthetic background. Entry order follows the manifest.
struct ScenePack {
  Mesh mesh;
  Texture texture;
  Manifest manifest;
  std::vector<SceneBuildResult> scenes;
  int width = 0;
  int height = 0;
};

ScenePack build_scene_pack(std::uint64_t entry_cap, int width, int height,
                           std::uint64_t seed, int bins_per_side = 4);

/// Visible frames become positive samples, their backgrounds the negatives.
void training_split(const ScenePack& pack, std::vector<TrainSample>& positives,
                    std::vector<Image>& negatives);

}  // namespace dci::testfix
