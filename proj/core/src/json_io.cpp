#include "dci/json_io.hpp"

#include "dci/error.hpp"

namespace dci {
namespace {

const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key,
                                  const std::string& context) {
  if (!j.contains(key)) throw ParseError(context + ": missing key '" + key + "'");
  return j[key];
}

}  // namespace

nlohmann::json to_json(const Vec3& v) { return {v.x, v.y, v.z}; }

Vec3 vec3_from_json(const nlohmann::json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(context + ": expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json to_json(const Rgb& c) { return {c.r, c.g, c.b}; }

Rgb rgb_from_json(const nlohmann::json& j, const std::string& context) {
  Vec3 v = vec3_from_json(j, context);
  return {v.x, v.y, v.z};
}

nlohmann::json to_json(const Pose& pose) {
  return {
      {"model_angle", pose.model_angle},
      {"model_position", to_json(pose.model_position)},
      {"camera_position", to_json(pose.camera_position)},
      {"camera_direction", to_json(pose.camera_direction)},
      {"camera_up", to_json(pose.camera_up)},
      {"fov", pose.fov},
  };
}

Pose pose_from_json(const nlohmann::json& j, const std::string& context) {
  Pose pose;
  pose.model_angle = require_key(j, "model_angle", context).get<double>();
  if (j.contains("model_position")) {
    pose.model_position = vec3_from_json(j["model_position"], context + ".model_position");
  }
  pose.camera_position =
      vec3_from_json(require_key(j, "camera_position", context), context + ".camera_position");
  pose.camera_direction = vec3_from_json(require_key(j, "camera_direction", context),
                                         context + ".camera_direction");
  pose.camera_up = vec3_from_json(require_key(j, "camera_up", context), context + ".camera_up");
  pose.fov = require_key(j, "fov", context).get<double>();
  pose.validate();
  return pose;
}

nlohmann::json to_json(const EnvironmentParams& env) {
  return {
      {"ambient_intensity", env.ambient_intensity},
      {"directional_intensity", env.directional_intensity},
      {"ambient_color", to_json(env.ambient_color)},
      {"directional_color", to_json(env.directional_color)},
      {"light_direction", to_json(env.light_direction)},
  };
}

EnvironmentParams env_from_json(const nlohmann::json& j, const std::string& context) {
  EnvironmentParams env;
  env.ambient_intensity = require_key(j, "ambient_intensity", context).get<double>();
  env.directional_intensity = require_key(j, "directional_intensity", context).get<double>();
  env.ambient_color =
      rgb_from_json(require_key(j, "ambient_color", context), context + ".ambient_color");
  env.directional_color = rgb_from_json(require_key(j, "directional_color", context),
                                        context + ".directional_color");
  env.light_direction = vec3_from_json(require_key(j, "light_direction", context),
                                       context + ".light_direction");
  env.validate();
  return env;
}

nlohmann::json to_json(const Box& box) { return {box.x0, box.y0, box.x1, box.y1}; }

Box box_from_json(const nlohmann::json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError(context + ": expected a 4-element [x0,y0,x1,y1] array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace dci
