#include "dci/background.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dci/error.hpp"
#include "dci/render.hpp"
#include "dci/rng.hpp"

namespace dci {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Rgb clamp01(const Rgb& c) { return {clamp01(c.r), clamp01(c.g), clamp01(c.b)}; }

Rgb lerp(const Rgb& a, const Rgb& b, double t) { return a * (1.0 - t) + b * t; }

struct Obstacle {
  Vec3 lo;
  Vec3 hi;
  Rgb albedo;
};

// Box obstacles around the vehicle location, seeded by the scene id so a
// scene always reproduces the same background. The clearance radius keeps
// them from overlapping the vehicle itself.
std::vector<Obstacle> make_obstacles(const std::string& scene_id, const Vec3& center) {
  std::mt19937_64 rng(fnv1a64(scene_id.data(), scene_id.size()));
  std::vector<Obstacle> out;
  const int count = 5;
  for (int i = 0; i < count; ++i) {
    double angle = uniform_range(rng, 0.0, 2.0 * 3.14159265358979323846);
    double radius = uniform_range(rng, 10.0, 45.0);
    double half_x = uniform_range(rng, 0.6, 2.5);
    double half_y = uniform_range(rng, 0.6, 2.5);
    double height = uniform_range(rng, 1.0, 4.5);
    double gray = uniform_range(rng, 0.2, 0.55);
    double tint = uniform_range(rng, -0.05, 0.05);
    Vec3 c{center.x + radius * std::cos(angle), center.y + radius * std::sin(angle), 0.0};
    out.push_back({{c.x - half_x, c.y - half_y, 0.0},
                   {c.x + half_x, c.y + half_y, height},
                   Rgb{clamp01(gray + tint), clamp01(gray), clamp01(gray - tint)}});
  }
  return out;
}

// Slab-method ray/AABB intersection; returns entry distance and face normal.
bool intersect_box(const Vec3& origin, const Vec3& dir, const Obstacle& box, double& t_hit,
                   Vec3& normal) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int near_axis = -1;
  double near_sign = 0.0;
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  const double lo[3] = {box.lo.x, box.lo.y, box.lo.z};
  const double hi[3] = {box.hi.x, box.hi.y, box.hi.z};
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < lo[axis] || o[axis] > hi[axis]) return false;
      continue;
    }
    double t0 = (lo[axis] - o[axis]) / d[axis];
    double t1 = (hi[axis] - o[axis]) / d[axis];
    double sign = -1.0;
    if (t0 > t1) {
      std::swap(t0, t1);
      sign = 1.0;
    }
    if (t0 > t_near) {
      t_near = t0;
      near_axis = axis;
      near_sign = sign;
    }
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return false;
  }
  if (t_near <= kNearClip || near_axis < 0) return false;
  t_hit = t_near;
  normal = Vec3{near_axis == 0 ? near_sign : 0.0, near_axis == 1 ? near_sign : 0.0,
                near_axis == 2 ? near_sign : 0.0};
  return true;
}

}  // namespace

SyntheticBackgroundProvider::SyntheticBackgroundProvider(std::vector<WeatherPreset> presets)
    : presets_(std::move(presets)) {}

Background SyntheticBackgroundProvider::acquire(const BackgroundRequest& request) const {
  if (!request.pose_hint) {
    throw Error("synthetic background: request for '" + request.scene_id +
                "' carries no pose hint");
  }
  if (request.width <= 0 || request.height <= 0) {
    throw Error("synthetic background: zero-area resolution requested");
  }
  Background bg;
  bg.pose = *request.pose_hint;
  bg.pose.validate();
  bg.env = request.env_hint ? *request.env_hint
                            : find_weather_preset(presets_, request.weather_tag).env;
  bg.env.validate();

  const Rgb base_ambient = bg.env.ambient_color * bg.env.ambient_intensity;
  const Rgb base_directional = bg.env.directional_color * bg.env.directional_intensity;
  // Sky gradient preset: horizon leans on the directional light, the zenith
  // keeps a cooler ambient-weighted tone.
  const Rgb horizon = clamp01(base_ambient * 0.90 + base_directional * 0.50);
  const Rgb zenith =
      clamp01(base_ambient * 0.55 + base_directional * 0.15 + Rgb{0.02, 0.04, 0.09});
  const double ground_lambert = std::max(0.0, bg.env.light_direction.z);
  const Rgb ground_light = base_ambient + base_directional * ground_lambert;

  const auto obstacles = make_obstacles(request.scene_id, bg.pose.model_position);
  const Vec3 origin = bg.pose.camera_position;

  bg.image = Image(request.width, request.height);
  for (int py = 0; py < request.height; ++py) {
    for (int px = 0; px < request.width; ++px) {
      Vec3 dir = pixel_ray_direction(bg.pose, px + 0.5, py + 0.5, request.width,
                                     request.height);
      double best_t = std::numeric_limits<double>::infinity();
      Rgb color;
      bool hit = false;

      for (const auto& box : obstacles) {
        double t;
        Vec3 normal;
        if (intersect_box(origin, dir, box, t, normal) && t < best_t) {
          best_t = t;
          double lambert = std::max(0.0, normal.dot(bg.env.light_direction));
          color = clamp01(box.albedo * (base_ambient + base_directional * lambert));
          hit = true;
        }
      }

      if (dir.z < 0.0 && origin.z > 0.0) {
        double t = -origin.z / dir.z;
        if (t > kNearClip && t < best_t) {
          Vec3 p = origin + dir * t;
          // 2 m checker gives the plane some visible structure.
          int cx = static_cast<int>(std::floor(p.x / 2.0));
          int cy = static_cast<int>(std::floor(p.y / 2.0));
          double albedo = ((cx + cy) % 2 == 0) ? 0.34 : 0.30;
          color = clamp01(ground_light * albedo);
          hit = true;
        }
      }

      if (!hit) {
        double elevation = clamp01(dir.z);
        color = lerp(horizon, zenith, std::pow(elevation, 0.65));
      }
      bg.image.at(px, py) = color;
    }
  }
  return bg;
}

DirectoryBackgroundProvider::DirectoryBackgroundProvider(std::filesystem::path directory)
    : directory_(std::move(directory)) {
  if (!std::filesystem::is_directory(directory_)) {
    throw IoError("background directory does not exist: " + directory_.string());
  }
}

Background DirectoryBackgroundProvider::acquire(const BackgroundRequest& request) const {
  const auto image_path = directory_ / (request.scene_id + ".png");
  const auto sidecar_path = directory_ / (request.scene_id + ".json");
  if (!std::filesystem::exists(image_path)) {
    throw IoError("background frame not found: " + image_path.string());
  }
  if (!std::filesystem::exists(sidecar_path)) {
    throw IoError("background sidecar not found: " + sidecar_path.string());
  }
  Background bg;
  bg.image = read_png(image_path);
  Sidecar sc = load_sidecar(sidecar_path);
  bg.pose = sc.pose;
  bg.env = sc.env;
  if (request.width > 0 && request.height > 0 &&
      (bg.image.width() != request.width || bg.image.height() != request.height)) {
    throw Error("background frame " + image_path.string() + " is " +
                std::to_string(bg.image.width()) + "x" + std::to_string(bg.image.height()) +
                " but the request wants " + std::to_string(request.width) + "x" +
                std::to_string(request.height));
  }
  return bg;
}

}  // namespace dci
