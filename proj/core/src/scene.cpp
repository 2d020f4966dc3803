#include "dci/scene.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "dci/error.hpp"

namespace dci {
namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kParallelTolerance = 1e-6;
constexpr double kPi = 3.14159265358979323846;

void require_unit(const Vec3& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > kUnitTolerance) {
    throw Error(std::string(name) + " must be unit length (norm " +
                std::to_string(v.norm()) + ")");
  }
}

void require_color(const Rgb& c, const char* name) {
  for (double v : {c.r, c.g, c.b}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(std::string(name) + " channel " + std::to_string(v) + " out of [0,1]");
    }
  }
}

Vec3 vec3_from_json(const nlohmann::json& j, const std::string& key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) {
    throw ParseError("sidecar key '" + key + "' must be a 3-element array");
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Rgb rgb_from_json(const nlohmann::json& j, const std::string& key) {
  Vec3 v = vec3_from_json(j, key);
  return {v.x, v.y, v.z};
}

}  // namespace

void Pose::validate() const {
  require_unit(camera_direction, "camera_direction");
  require_unit(camera_up, "camera_up");
  if (std::abs(camera_direction.dot(camera_up)) >= 1.0 - kParallelTolerance) {
    throw Error("camera_direction and camera_up are (near-)parallel");
  }
  if (!(fov > 0.0 && fov < kPi)) {
    throw Error("fov must lie in (0, pi), got " + std::to_string(fov));
  }
}

void EnvironmentParams::validate() const {
  require_unit(light_direction, "light_direction");
  if (!(ambient_intensity >= 0.0)) throw Error("ambient_intensity must be >= 0");
  if (!(directional_intensity >= 0.0)) throw Error("directional_intensity must be >= 0");
  require_color(ambient_color, "ambient_color");
  require_color(directional_color, "directional_color");
}

Sidecar load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_sidecar: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_sidecar: invalid JSON in " + path.string() + ": " + e.what());
  }
  for (const char* key :
       {"model_angle", "camera_position", "camera_direction", "camera_up", "fov",
        "ambient_intensity", "directional_intensity", "ambient_color", "directional_color",
        "light_direction"}) {
    if (!j.contains(key)) {
      throw ParseError("load_sidecar: " + path.string() + " missing key '" + key + "'");
    }
  }
  Sidecar sc;
  sc.pose.model_angle = j["model_angle"].get<double>();
  if (j.contains("model_position")) sc.pose.model_position = vec3_from_json(j, "model_position");
  sc.pose.camera_position = vec3_from_json(j, "camera_position");
  sc.pose.camera_direction = vec3_from_json(j, "camera_direction");
  sc.pose.camera_up = vec3_from_json(j, "camera_up");
  sc.pose.fov = j["fov"].get<double>();
  sc.env.ambient_intensity = j["ambient_intensity"].get<double>();
  sc.env.directional_intensity = j["directional_intensity"].get<double>();
  sc.env.ambient_color = rgb_from_json(j, "ambient_color");
  sc.env.directional_color = rgb_from_json(j, "directional_color");
  sc.env.light_direction = vec3_from_json(j, "light_direction");
  sc.pose.validate();
  sc.env.validate();
  return sc;
}

void save_sidecar(const std::filesystem::path& path, const Sidecar& sidecar) {
  const Pose& p = sidecar.pose;
  const EnvironmentParams& e = sidecar.env;
  nlohmann::json j = {
      {"model_angle", p.model_angle},
      {"model_position", {p.model_position.x, p.model_position.y, p.model_position.z}},
      {"camera_position", {p.camera_position.x, p.camera_position.y, p.camera_position.z}},
      {"camera_direction", {p.camera_direction.x, p.camera_direction.y, p.camera_direction.z}},
      {"camera_up", {p.camera_up.x, p.camera_up.y, p.camera_up.z}},
      {"fov", p.fov},
      {"ambient_intensity", e.ambient_intensity},
      {"directional_intensity", e.directional_intensity},
      {"ambient_color", {e.ambient_color.r, e.ambient_color.g, e.ambient_color.b}},
      {"directional_color", {e.directional_color.r, e.directional_color.g, e.directional_color.b}},
      {"light_direction", {e.light_direction.x, e.light_direction.y, e.light_direction.z}},
  };
  std::ofstream out(path);
  if (!out) throw IoError("save_sidecar: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dci
