#include <benchmark/benchmark.h>

#include <cmath>

#include "dci/mesh.hpp"
#include "dci/render.hpp"
#include "dci/rng.hpp"
#include "dci/texture.hpp"

namespace {

dci::Pose orbit_pose(double azimuth, double distance, double pitch) {
  dci::Pose pose;
  const dci::Vec3 aim{0.0, 0.0, 0.75};
  const dci::Vec3 offset{std::cos(pitch) * std::cos(azimuth),
                         std::cos(pitch) * std::sin(azimuth), std::sin(pitch)};
  pose.camera_position = aim + offset * distance;
  pose.camera_direction = (aim - pose.camera_position).normalized();
  const dci::Vec3 right = pose.camera_direction.cross({0.0, 0.0, 1.0}).normalized();
  pose.camera_up = right.cross(pose.camera_direction).normalized();
  return pose;
}

const dci::Mesh& car_mesh() {
  static const dci::Mesh mesh = dci::load_mesh(std::string(DCI_ASSET_DIR) + "/car.obj");
  return mesh;
}

dci::EnvironmentParams daylight() {
  dci::EnvironmentParams env;
  env.ambient_intensity = 0.55;
  env.directional_intensity = 0.4;
  env.light_direction = dci::Vec3{0.3, 0.2, 0.9}.normalized();
  return env;
}

void BM_RenderForward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const dci::Mesh& mesh = car_mesh();
  const dci::Texture texture(mesh.face_count(), 4);
  const dci::Pose pose = orbit_pose(0.7, 8.0, 0.3);
  const dci::EnvironmentParams env = daylight();
  for (auto _ : state) {
    auto out = dci::render(mesh, texture, pose, env, side, side);
    benchmark::DoNotOptimize(out.image.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side) * side);
}
BENCHMARK(BM_RenderForward)->Arg(128)->Arg(256);

void BM_RenderBackward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const dci::Mesh& mesh = car_mesh();
  const dci::Texture texture(mesh.face_count(), 4);
  const dci::EnvironmentParams env = daylight();
  const auto out = dci::render(mesh, texture, orbit_pose(0.7, 8.0, 0.3), env, side, side);
  const dci::Image loss_grad(side, side, {1.0, 1.0, 1.0});
  for (auto _ : state) {
    auto grad = dci::render_backward(out, env, mesh.face_count(), 4, loss_grad);
    benchmark::DoNotOptimize(grad.data.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side) * side);
}
BENCHMARK(BM_RenderBackward)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
