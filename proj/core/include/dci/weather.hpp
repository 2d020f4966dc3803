#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dci/scene.hpp"

namespace dci {

/// Named lighting bundle. The three bundled presets (ClearNoon, ClearNight,
/// WetCloudySunset) carry numeric values chosen for this toolkit; they are
/// plausible daylight/night/sunset lighting, not measurements.
struct WeatherPreset {
  std::string name;
  EnvironmentParams env;
};

/// The three bundled presets, in canonical order.
const std::vector<WeatherPreset>& builtin_weather_presets();

/// Lookup by name; throws listing the known names when absent.
const WeatherPreset& find_weather_preset(const std::vector<WeatherPreset>& presets,
                                         const std::string& name);

/// Preset file: {"presets": [{name, ambient_intensity, directional_intensity,
/// ambient_color, directional_color, light_direction}, ...]}. Names must be
/// unique; every env must validate.
std::vector<WeatherPreset> load_weather_presets(const std::filesystem::path& path);
void save_weather_presets(const std::filesystem::path& path,
                          const std::vector<WeatherPreset>& presets);

}  // namespace dci
