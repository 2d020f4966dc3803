#include "dci/weather.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "dci/error.hpp"

namespace dci {

const std::vector<WeatherPreset>& builtin_weather_presets() {
  static const std::vector<WeatherPreset> presets = [] {
    std::vector<WeatherPreset> p;
    // High sun, warm white light.
    p.push_back({"ClearNoon",
                 {0.42, 0.95, Rgb{0.95, 0.97, 1.0}, Rgb{1.0, 0.97, 0.88},
                  Vec3{0.30, 0.18, 0.94}.normalized()}});
    // Low cool ambient, weak pale moonlight.
    p.push_back({"ClearNight",
                 {0.10, 0.18, Rgb{0.55, 0.65, 0.95}, Rgb{0.80, 0.85, 1.0},
                  Vec3{-0.25, 0.35, 0.90}.normalized()}});
    // Overcast warm ambient, orange sun near the horizon.
    p.push_back({"WetCloudySunset",
                 {0.30, 0.50, Rgb{0.75, 0.68, 0.66}, Rgb{1.0, 0.55, 0.30},
                  Vec3{-0.85, 0.20, 0.49}.normalized()}});
    for (auto& preset : p) preset.env.validate();
    return p;
  }();
  return presets;
}

const WeatherPreset& find_weather_preset(const std::vector<WeatherPreset>& presets,
                                         const std::string& name) {
  for (const auto& p : presets) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : presets) known += (known.empty() ? "" : ", ") + p.name;
  throw Error("unknown weather preset '" + name + "' (known: " + known + ")");
}

std::vector<WeatherPreset> load_weather_presets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_weather_presets: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_weather_presets: invalid JSON in " + path.string() + ": " +
                     e.what());
  }
  if (!j.contains("presets") || !j["presets"].is_array()) {
    throw ParseError("load_weather_presets: " + path.string() + " missing 'presets' array");
  }
  std::vector<WeatherPreset> out;
  std::set<std::string> seen;
  for (const auto& entry : j["presets"]) {
    WeatherPreset p;
    for (const char* key :
         {"name", "ambient_intensity", "directional_intensity", "ambient_color",
          "directional_color", "light_direction"}) {
      if (!entry.contains(key)) {
        throw ParseError("load_weather_presets: preset missing key '" + std::string(key) + "'");
      }
    }
    p.name = entry["name"].get<std::string>();
    if (!seen.insert(p.name).second) {
      throw ParseError("load_weather_presets: duplicate preset name '" + p.name + "'");
    }
    p.env.ambient_intensity = entry["ambient_intensity"].get<double>();
    p.env.directional_intensity = entry["directional_intensity"].get<double>();
    auto rgb = [&](const char* key) {
      const auto& a = entry.at(key);
      return Rgb{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
    };
    p.env.ambient_color = rgb("ambient_color");
    p.env.directional_color = rgb("directional_color");
    const auto& l = entry.at("light_direction");
    p.env.light_direction =
        Vec3{l.at(0).get<double>(), l.at(1).get<double>(), l.at(2).get<double>()};
    p.env.validate();
    out.push_back(std::move(p));
  }
  return out;
}

void save_weather_presets(const std::filesystem::path& path,
                          const std::vector<WeatherPreset>& presets) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : presets) {
    arr.push_back({
        {"name", p.name},
        {"ambient_intensity", p.env.ambient_intensity},
        {"directional_intensity", p.env.directional_intensity},
        {"ambient_color", {p.env.ambient_color.r, p.env.ambient_color.g, p.env.ambient_color.b}},
        {"directional_color",
         {p.env.directional_color.r, p.env.directional_color.g, p.env.directional_color.b}},
        {"light_direction",
         {p.env.light_direction.x, p.env.light_direction.y, p.env.light_direction.z}},
    });
  }
  std::ofstream out(path);
  if (!out) throw IoError("save_weather_presets: cannot open " + path.string());
  out << nlohmann::json{{"presets", arr}}.dump(2) << '\n';
}

}  // namespace dci
