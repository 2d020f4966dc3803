#pragma once

#include <nlohmann/json.hpp>

#include "dci/image.hpp"
#include "dci/scene.hpp"

namespace dci {

// Nested-object JSON forms shared by manifests, labels, and run records.
// (Background sidecars use a flat schema; see scene.hpp.)

nlohmann::json to_json(const Vec3& v);
Vec3 vec3_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json to_json(const Rgb& c);
Rgb rgb_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json to_json(const Pose& pose);
Pose pose_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json to_json(const EnvironmentParams& env);
EnvironmentParams env_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json to_json(const Box& box);
Box box_from_json(const nlohmann::json& j, const std::string& context);

}  // namespace dci
