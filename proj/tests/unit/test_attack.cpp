#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "dci/attack.hpp"
#include "dci/background.hpp"
#include "dci/error.hpp"
#include "dci/manifest.hpp"
#include "dci/mesh.hpp"
#include "dci/texture.hpp"
#include "support/fixtures.hpp"

using namespace dci;
using testfix::capture_error;
using testfix::contains;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// One entry whose pose fills the whole frame with the car mask, lit by a
/// flat ambient preset so every rendered pixel is exactly m * bin.
Manifest flat_manifest(const Pose& pose, double ambient = 0.8) {
  Manifest manifest;
  manifest.part = "discrete";
  manifest.presets.push_back({"Flat", testfix::ambient_only(ambient)});
  ManifestEntry entry;
  entry.entry_id = "e0";
  entry.scene_id = "s0";
  entry.weather = "Flat";
  entry.viewpoint_tag = "fixed";
  entry.pose = pose;
  manifest.entries.push_back(entry);
  return manifest;
}

/// Single anchor spans the whole 8x8 frame; pool 1 averages all 64 pixels.
ToyDetectorModel whole_frame_model(std::vector<double> weights, double bias) {
  ToyDetectorModel model;
  model.anchors.stride = 8;
  model.anchors.box_sizes = {{8, 8}};
  model.pool = 1;
  model.weights = {std::move(weights)};
  model.biases = {bias};
  return model;
}

AttackConfig tiny_frame_config(double step, int epochs) {
  AttackConfig config;
  config.step = step;
  config.epochs = epochs;
  config.batch = 1;
  config.width = 8;
  config.height = 8;
  return config;
}

}  // namespace

TEST_CASE("zero detector weights are a fixed point of the attack") {
  const Mesh mesh = testfix::screen_filling_triangle();
  const Texture texture(mesh.faces.size(), 1);
  const Manifest manifest = flat_manifest(testfix::front_pose());
  const SyntheticBackgroundProvider provider;
  const ToyDetectorModel model = whole_frame_model({0.0, 0.0, 0.0}, 0.0);

  // Large step: only a genuinely zero gradient leaves the texture alone.
  const auto result =
      attack_texture(mesh, texture, manifest, provider, model, tiny_frame_config(100.0, 3));
  CHECK(result.iterations == 3);
  CHECK(result.scenes_matched == 3);
  CHECK(result.checksum_after == result.checksum_before);
  REQUIRE(result.loss_trace.size() == 3);
  for (double v : result.loss_trace) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  for (const Rgb& bin : result.texture.data()) {
    CHECK(bin.r == 0.5);
    CHECK(bin.g == 0.5);
    CHECK(bin.b == 0.5);
  }
}

TEST_CASE("the attack trace matches the closed-form single-pixel recurrence") {
  // Whole frame is one face, one texture bin, flat ambient light m, one
  // anchor. The pipeline then collapses to scalar dynamics per channel:
  //   z = b + sum_c w_c * m * t_c,  s = sigmoid(z)
  //   t_c <- t_c - step * s(1-s) * w_c * m
  const Mesh mesh = testfix::screen_filling_triangle();
  const Texture texture(mesh.faces.size(), 1);
  const double m = 0.8;
  const Manifest manifest = flat_manifest(testfix::front_pose(), m);
  const SyntheticBackgroundProvider provider;
  const std::vector<double> w = {0.9, 0.6, 0.3};
  const double bias = 0.2;
  const ToyDetectorModel model = whole_frame_model(w, bias);

  const double step = 1.0;
  const int iterations = 3;
  const auto result = attack_texture(mesh, texture, manifest, provider, model,
                                     tiny_frame_config(step, iterations));

  double t[3] = {0.5, 0.5, 0.5};
  std::vector<double> expected_trace;
  for (int it = 0; it < iterations; ++it) {
    const double z = bias + w[0] * m * t[0] + w[1] * m * t[1] + w[2] * m * t[2];
    const double s = sigmoid(z);
    expected_trace.push_back(s);
    const double dsig = s * (1.0 - s);
    for (int c = 0; c < 3; ++c) t[c] -= step * dsig * w[c] * m;
  }

  REQUIRE(result.loss_trace.size() == expected_trace.size());
  for (std::size_t i = 0; i < expected_trace.size(); ++i) {
    CHECK(result.loss_trace[i] == doctest::Approx(expected_trace[i]).epsilon(1e-9));
  }
  for (std::size_t i = 1; i < result.loss_trace.size(); ++i) {
    CHECK(result.loss_trace[i] < result.loss_trace[i - 1]);
  }
  REQUIRE(result.texture.data().size() == mesh.faces.size());
  const Rgb& bin = result.texture.data()[0];
  CHECK(bin.r == doctest::Approx(t[0]).epsilon(1e-9));
  CHECK(bin.g == doctest::Approx(t[1]).epsilon(1e-9));
  CHECK(bin.b == doctest::Approx(t[2]).epsilon(1e-9));
  CHECK(result.checksum_after != result.checksum_before);
  CHECK(result.checksum_after == result.texture.checksum());
}

TEST_CASE("attack runs are deterministic for identical inputs") {
  const Mesh mesh = testfix::screen_filling_triangle();
  const Texture texture(mesh.faces.size(), 1);
  const Manifest manifest = flat_manifest(testfix::front_pose());
  const SyntheticBackgroundProvider provider;
  const ToyDetectorModel model = whole_frame_model({0.7, -0.4, 0.2}, -0.1);
  const AttackConfig config = tiny_frame_config(0.5, 4);

  const auto a = attack_texture(mesh, texture, manifest, provider, model, config);
  const auto b = attack_texture(mesh, texture, manifest, provider, model, config);
  CHECK(a.checksum_after == b.checksum_after);
  REQUIRE(a.loss_trace.size() == b.loss_trace.size());
  for (std::size_t i = 0; i < a.loss_trace.size(); ++i) {
    CHECK(a.loss_trace[i] == b.loss_trace[i]);
  }
}

TEST_CASE("bins of faces the camera never sees keep their initial value") {
  // Second triangle sits behind the first at every pixel, so its bin gets
  // no gradient while the front face's bin moves.
  const Mesh mesh = testfix::mesh_from_source(
      "v -30 -30 0\n"
      "v 30 -30 0\n"
      "v 0 30 0\n"
      "v -30 -30 1\n"
      "v 30 -30 1\n"
      "v 0 30 1\n"
      "f 1 2 3\n"
      "f 4 5 6\n");
  REQUIRE(mesh.faces.size() == 2);
  const Texture texture(2, 1);
  const Manifest manifest = flat_manifest(testfix::front_pose());
  const SyntheticBackgroundProvider provider;
  const ToyDetectorModel model = whole_frame_model({0.9, 0.6, 0.3}, 0.2);

  const auto result =
      attack_texture(mesh, texture, manifest, provider, model, tiny_frame_config(1.0, 2));
  CHECK(result.texture.data()[0].r < 0.5);
  CHECK(result.texture.data()[1].r == 0.5);
  CHECK(result.texture.data()[1].g == 0.5);
  CHECK(result.texture.data()[1].b == 0.5);
}

TEST_CASE("an attack over scenes with empty masks is an error") {
  const Mesh mesh = testfix::screen_filling_triangle();
  const Texture texture(mesh.faces.size(), 1);
  Pose away = testfix::front_pose();
  away.camera_direction = {0.0, 0.0, -1.0};  // car is behind the camera
  const Manifest manifest = flat_manifest(away);
  const SyntheticBackgroundProvider provider;
  const ToyDetectorModel model = whole_frame_model({0.5, 0.5, 0.5}, 0.0);

  const auto msg = capture_error([&] {
    attack_texture(mesh, texture, manifest, provider, model, tiny_frame_config(0.1, 2));
  });
  CHECK(contains(msg, "empty mask"));
}

TEST_CASE("max_iterations 0 is a recorded no-op") {
  const Mesh mesh = testfix::screen_filling_triangle();
  const Texture texture(mesh.faces.size(), 1);
  const Manifest manifest = flat_manifest(testfix::front_pose());
  const SyntheticBackgroundProvider provider;
  const ToyDetectorModel model = whole_frame_model({0.9, 0.6, 0.3}, 0.2);
  AttackConfig config = tiny_frame_config(1.0, 5);
  config.max_iterations = 0;

  const auto result = attack_texture(mesh, texture, manifest, provider, model, config);
  CHECK(result.iterations == 0);
  CHECK(result.loss_trace.empty());
  CHECK(result.checksum_after == result.checksum_before);
  CHECK(result.checksum_before == texture.checksum());
}

TEST_CASE("max_iterations caps the epoch schedule") {
  const Mesh mesh = testfix::screen_filling_triangle();
  const Texture texture(mesh.faces.size(), 1);
  const Manifest manifest = flat_manifest(testfix::front_pose());
  const SyntheticBackgroundProvider provider;
  const ToyDetectorModel model = whole_frame_model({0.9, 0.6, 0.3}, 0.2);
  AttackConfig config = tiny_frame_config(0.5, 10);
  config.max_iterations = 4;

  const auto result = attack_texture(mesh, texture, manifest, provider, model, config);
  CHECK(result.iterations == 4);
  CHECK(result.loss_trace.size() == 4);
}

TEST_CASE("attack config validation names the offending field") {
  AttackConfig config;
  config.step = 0.0;
  CHECK(contains(capture_error([&] { config.validate(); }), "step"));
  config = {};
  config.epochs = 0;
  CHECK(contains(capture_error([&] { config.validate(); }), "epochs"));
  config = {};
  config.batch = 0;
  CHECK(contains(capture_error([&] { config.validate(); }), "batch"));
  config = {};
  config.clamp_lo = 1.0;
  config.clamp_hi = 0.0;
  CHECK(contains(capture_error([&] { config.validate(); }), "clamp"));
  config = {};
  config.max_iterations = -1;
  CHECK(contains(capture_error([&] { config.validate(); }), "max_iterations"));
  config = {};
  config.width = 0;
  CHECK(contains(capture_error([&] { config.validate(); }), "dimensions"));
}

TEST_CASE("a non-finite score aborts with the partial trace attached") {
  const Mesh mesh = testfix::screen_filling_triangle();
  const Texture texture(mesh.faces.size(), 1);
  const Manifest manifest = flat_manifest(testfix::front_pose());
  const SyntheticBackgroundProvider provider;
  const ToyDetectorModel model =
      whole_frame_model({std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0}, 0.0);

  bool caught = false;
  try {
    attack_texture(mesh, texture, manifest, provider, model, tiny_frame_config(0.1, 2));
  } catch (const AttackError& e) {
    caught = true;
    CHECK(contains(e.what(), "non-finite"));
    CHECK(e.trace.empty());  // failed on the first iteration
  }
  CHECK(caught);
}

TEST_CASE("evaluating identical textures reports zero decline") {
  const Mesh mesh = testfix::screen_filling_triangle();
  const Texture texture(mesh.faces.size(), 1);
  const Manifest manifest = flat_manifest(testfix::front_pose());
  const SyntheticBackgroundProvider provider;
  const ToyDetectorModel model = whole_frame_model({0.9, 0.6, 0.3}, 0.2);

  const auto eval = evaluate_attack(mesh, texture, texture, manifest, provider, model, 8, 8);
  CHECK(eval.ap_before == eval.ap_after);
  CHECK(eval.decline == 0.0);
}

TEST_CASE("the run record echoes the config and parses back") {
  testfix::TempDir tmp("attack_record");
  AttackConfig config;  // defaults: step 1e-5, 1 epoch, batch 1
  const std::vector<double> trace = {0.41, 0.37};
  save_attack_record(tmp.file("run.json"), config, trace, 111, 222);

  std::ifstream in(tmp.file("run.json"));
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  CHECK(j["config"]["step"].get<double>() == 1e-5);
  CHECK(j["config"]["epochs"].get<int>() == 1);
  CHECK(j["config"]["batch"].get<int>() == 1);
  CHECK(j["config"]["seed"].get<std::uint64_t>() == 0);
  CHECK(j["config"]["width"].get<int>() == 256);
  CHECK(j["config"]["match_iou"].get<double>() == 0.5);
  CHECK_FALSE(j["config"].contains("max_iterations"));
  CHECK_FALSE(j.contains("aborted"));
  REQUIRE(j["loss_trace"].size() == 2);
  CHECK(j["loss_trace"][0].get<double>() == 0.41);
  CHECK(j["texture_checksum_before"].get<std::uint64_t>() == 111);
  CHECK(j["texture_checksum_after"].get<std::uint64_t>() == 222);

  config.max_iterations = 7;
  save_attack_record(tmp.file("aborted.json"), config, {}, 1, 1, "boom");
  std::ifstream in2(tmp.file("aborted.json"));
  nlohmann::json j2;
  in2 >> j2;
  CHECK(j2["config"]["max_iterations"].get<int>() == 7);
  CHECK(j2["aborted"].get<std::string>() == "boom");
}
