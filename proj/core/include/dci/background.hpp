#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dci/image.hpp"
#include "dci/scene.hpp"
#include "dci/weather.hpp"

namespace dci {

struct BackgroundRequest {
  std::string scene_id;
  std::string weather_tag;
  std::string viewpoint_tag;
  std::optional<Pose> pose_hint;
  std::optional<EnvironmentParams> env_hint;
  int width = 0;
  int height = 0;
};

/// A background frame together with the exact camera and lighting
/// parameters it was produced under.
struct Background {
  Image image;
  Pose pose;
  EnvironmentParams env;
};

/// Source of background frames plus their pose/environment parameters.
class BackgroundProvider {
 public:
  virtual ~BackgroundProvider() = default;
  virtual Background acquire(const BackgroundRequest& request) const = 0;
};

/// Procedural scene: ground plane, sky with a horizon gradient, and a few
/// seeded box obstacles, all lit by the same EnvironmentParams handed to
/// the car renderer. Pure function of the request, so frames are
/// reproducible. Requires a pose hint; lighting comes from the env hint
/// when given, otherwise from the provider's preset table by weather tag.
class SyntheticBackgroundProvider : public BackgroundProvider {
 public:
  explicit SyntheticBackgroundProvider(
      std::vector<WeatherPreset> presets = builtin_weather_presets());

  Background acquire(const BackgroundRequest& request) const override;

 private:
  std::vector<WeatherPreset> presets_;
};

/// Reads exported frames from a directory: `<scene_id>.png` plus a
/// `<scene_id>.json` sidecar holding the full parameter set. Incomplete
/// sidecars fail by naming the missing key; nothing is guessed.
class DirectoryBackgroundProvider : public BackgroundProvider {
 public:
  explicit DirectoryBackgroundProvider(std::filesystem::path directory);

  Background acquire(const BackgroundRequest& request) const override;

 private:
  std::filesystem::path directory_;
};

}  // namespace dci
