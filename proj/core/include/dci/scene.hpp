#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "dci/image.hpp"
#include "dci/vec.hpp"

namespace dci {

/// Geometric alignment parameters shared between the background source and
/// the car renderer: vehicle placement plus the full camera description.
/// World frame is z-up; model_angle is the vehicle yaw around +z.
struct Pose {
  double model_angle = 0.0;
  Vec3 model_position{0.0, 0.0, 0.0};
  Vec3 camera_position{0.0, 0.0, 0.0};
  Vec3 camera_direction{0.0, 0.0, 1.0};
  Vec3 camera_up{0.0, 1.0, 0.0};
  double fov = 1.0471975511965976;  // vertical, radians (60 deg default)

  /// Throws unless direction/up are unit length, non-parallel, and the fov
  /// lies in (0, pi).
  void validate() const;
};

/// Lighting alignment parameters: one ambient term and one directional
/// light. light_direction points from the surface toward the light.
struct EnvironmentParams {
  double ambient_intensity = 1.0;
  double directional_intensity = 0.0;
  Rgb ambient_color{1.0, 1.0, 1.0};
  Rgb directional_color{1.0, 1.0, 1.0};
  Vec3 light_direction{0.0, 0.0, 1.0};

  void validate() const;

  bool operator==(const EnvironmentParams& o) const {
    return ambient_intensity == o.ambient_intensity &&
           directional_intensity == o.directional_intensity &&
           ambient_color == o.ambient_color && directional_color == o.directional_color &&
           light_direction == o.light_direction;
  }
};

/// One composited frame: the unit of datasets and evaluation. Instances
/// with an empty render mask are kept and flagged not-visible so AP
/// denominators still count them.
struct SceneInstance {
  Image background;
  Pose pose;
  EnvironmentParams env;
  std::optional<Box> ground_truth_box;  // tight mask bounding box; nullopt if empty
  bool vehicle_visible = false;
  std::string scene_id;
  std::string weather_tag;
  std::string viewpoint_tag;
};

/// Background sidecar JSON (the export contract for simulator-captured
/// frames). Required keys: model_angle, camera_position, camera_direction,
/// camera_up, fov, ambient_intensity, directional_intensity, ambient_color,
/// directional_color, light_direction. Optional: model_position (defaults
/// to the origin). Missing keys are reported by name.
struct Sidecar {
  Pose pose;
  EnvironmentParams env;
};

Sidecar load_sidecar(const std::filesystem::path& path);
void save_sidecar(const std::filesystem::path& path, const Sidecar& sidecar);

}  // namespace dci
