#include <doctest.h>

#include <cmath>
#include <fstream>

#include "dci/error.hpp"
#include "dci/json_io.hpp"
#include "dci/scene.hpp"
#include "dci/weather.hpp"
#include "support/fixtures.hpp"

using namespace dci;
using testfix::capture_error;
using testfix::contains;

TEST_CASE("pose validation enforces unit vectors, independence, and fov range") {
  Pose ok;
  CHECK_NOTHROW(ok.validate());

  Pose bad_dir = ok;
  bad_dir.camera_direction = {0.0, 0.0, 2.0};
  CHECK_THROWS_AS(bad_dir.validate(), Error);

  Pose bad_up = ok;
  bad_up.camera_up = {0.0, 0.0, 0.5};
  CHECK_THROWS_AS(bad_up.validate(), Error);

  Pose parallel = ok;
  parallel.camera_up = ok.camera_direction;
  CHECK_THROWS_AS(parallel.validate(), Error);

  Pose bad_fov = ok;
  bad_fov.fov = 0.0;
  CHECK_THROWS_AS(bad_fov.validate(), Error);
  bad_fov.fov = 3.15;
  CHECK_THROWS_AS(bad_fov.validate(), Error);
}

TEST_CASE("environment validation enforces nonnegative intensity and a unit light") {
  EnvironmentParams ok;
  CHECK_NOTHROW(ok.validate());

  EnvironmentParams negative = ok;
  negative.ambient_intensity = -0.1;
  CHECK_THROWS_AS(negative.validate(), Error);

  EnvironmentParams bad_light = ok;
  bad_light.light_direction = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(bad_light.validate(), Error);
}

TEST_CASE("sidecar round-trips every parameter") {
  testfix::TempDir tmp("sidecar");
  Sidecar sc;
  sc.pose.model_angle = 0.7;
  sc.pose.model_position = {1.0, -2.0, 0.25};
  sc.pose.camera_position = {4.0, 5.0, 2.0};
  sc.pose.camera_direction = Vec3{-1.0, -1.0, -0.25}.normalized();
  sc.pose.camera_up = {0.0, 0.0, 1.0};
  sc.pose.fov = 1.1;
  sc.env.ambient_intensity = 0.3;
  sc.env.directional_intensity = 0.6;
  sc.env.ambient_color = {0.9, 0.8, 0.7};
  sc.env.directional_color = {1.0, 0.9, 0.8};
  sc.env.light_direction = Vec3{0.2, 0.1, 0.9}.normalized();

  const auto path = tmp.file("frame.json");
  save_sidecar(path, sc);
  const Sidecar back = load_sidecar(path);
  CHECK(back.pose.model_angle == sc.pose.model_angle);
  CHECK(back.pose.model_position == sc.pose.model_position);
  CHECK(back.pose.camera_position == sc.pose.camera_position);
  CHECK(back.pose.camera_direction == sc.pose.camera_direction);
  CHECK(back.pose.camera_up == sc.pose.camera_up);
  CHECK(back.pose.fov == sc.pose.fov);
  CHECK(back.env == sc.env);
}

TEST_CASE("sidecar loading names the first missing key") {
  testfix::TempDir tmp("sidecar_missing");
  const auto path = tmp.file("frame.json");
  {
    std::ofstream out(path);
    out << "{\"model_angle\": 0.0, \"camera_position\": [0,0,0]}";
  }
  const auto msg = capture_error([&] { load_sidecar(path); });
  CHECK(contains(msg, "camera_direction"));
}

TEST_CASE("sidecar model_position defaults to the origin") {
  testfix::TempDir tmp("sidecar_default");
  const auto path = tmp.file("frame.json");
  {
    std::ofstream out(path);
    out << R"({"model_angle": 0.0,
               "camera_position": [0, -6, 2],
               "camera_direction": [0, 1, 0],
               "camera_up": [0, 0, 1],
               "fov": 1.0,
               "ambient_intensity": 1.0,
               "directional_intensity": 0.0,
               "ambient_color": [1, 1, 1],
               "directional_color": [1, 1, 1],
               "light_direction": [0, 0, 1]})";
  }
  const Sidecar sc = load_sidecar(path);
  CHECK(sc.pose.model_position == Vec3{0.0, 0.0, 0.0});
}

TEST_CASE("builtin weather presets come in canonical order and validate") {
  const auto& presets = builtin_weather_presets();
  REQUIRE(presets.size() == 3);
  CHECK(presets[0].name == "ClearNoon");
  CHECK(presets[1].name == "ClearNight");
  CHECK(presets[2].name == "WetCloudySunset");
  for (const auto& p : presets) {
    CHECK_NOTHROW(p.env.validate());
    CHECK(std::abs(p.env.light_direction.norm() - 1.0) <= 1e-9);
  }
  CHECK(presets[0].env.ambient_intensity == doctest::Approx(0.42));
  CHECK(presets[0].env.directional_intensity == doctest::Approx(0.95));
  CHECK(presets[1].env.ambient_intensity < presets[0].env.ambient_intensity);
}

TEST_CASE("find_weather_preset lists known names on a miss") {
  const auto msg = capture_error(
      [] { find_weather_preset(builtin_weather_presets(), "HeavyFog"); });
  CHECK(contains(msg, "HeavyFog"));
  CHECK(contains(msg, "ClearNoon"));
}

TEST_CASE("weather preset file round-trips and matches the bundled asset") {
  testfix::TempDir tmp("weather");
  const auto path = tmp.file("presets.json");
  save_weather_presets(path, builtin_weather_presets());
  const auto back = load_weather_presets(path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].name == builtin_weather_presets()[i].name);
    CHECK(back[i].env == builtin_weather_presets()[i].env);
  }

  const auto asset = load_weather_presets(testfix::asset_dir() / "weather_presets.json");
  REQUIRE(asset.size() == 3);
  for (std::size_t i = 0; i < asset.size(); ++i) {
    CHECK(asset[i].name == builtin_weather_presets()[i].name);
    CHECK(asset[i].env.ambient_intensity ==
          doctest::Approx(builtin_weather_presets()[i].env.ambient_intensity));
  }
}

TEST_CASE("nested json helpers round-trip poses and boxes") {
  Pose pose;
  pose.model_angle = 0.5;
  pose.camera_position = {1.0, 2.0, 3.0};
  const Pose back = pose_from_json(to_json(pose), "test");
  CHECK(back.model_angle == pose.model_angle);
  CHECK(back.camera_position == pose.camera_position);

  const Box box{1.5, 2.5, 10.0, 20.0};
  CHECK(box_from_json(to_json(box), "test") == box);

  CHECK_THROWS_AS(vec3_from_json(nlohmann::json::array({1.0, 2.0}), "short"), Error);
}
