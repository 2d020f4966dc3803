#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dci/image.hpp"
#include "dci/mesh.hpp"
#include "dci/scene.hpp"
#include "dci/texture.hpp"
#include "dci/vec.hpp"

namespace dci {

/// Points closer than this to the camera plane are culled.
constexpr double kNearClip = 1e-3;

/// Orthonormal right-handed camera frame derived from a pose:
/// right = up x forward, true_up = forward x right.
struct CameraBasis {
  Vec3 right;
  Vec3 up;
  Vec3 forward;

  static CameraBasis from_pose(const Pose& pose);
};

struct ProjectedPoint {
  double x = 0.0;      // continuous pixel coordinates, origin top-left, y down
  double y = 0.0;
  double depth = 0.0;  // distance along the camera forward axis
};

/// Perspective projection of a world point. Returns nullopt when the point
/// sits behind the near clip plane (the caller culls).
std::optional<ProjectedPoint> project(const Pose& pose, const Vec3& point,
                                      int width, int height);

/// World-space ray through the center of pixel (x, y); inverse of project.
Vec3 pixel_ray_direction(const Pose& pose, double x, double y, int width, int height);

/// Lambertian RGB multiplier for a unit surface normal:
///   ambient_intensity * ambient_color
/// + directional_intensity * directional_color * max(0, dot(normal, light)).
/// Unclamped; the renderer clamps after multiplying the texture color.
Rgb shade(const Vec3& face_normal, const EnvironmentParams& env);

/// Everything the forward pass produced, including the per-pixel geometry
/// buffers the backward pass replays.
struct RenderOutput {
  Image image;
  Mask mask;
  std::vector<std::int32_t> face_buffer;        // H*W, -1 where uncovered
  std::vector<std::array<double, 3>> bary_buffer;  // perspective-correct
  std::vector<double> depth_buffer;             // +inf where uncovered
  std::vector<Vec3> world_face_normals;         // per mesh face, after yaw

  std::int32_t face_at(int x, int y) const {
    return face_buffer[static_cast<std::size_t>(y) * image.width() + x];
  }
};

/// Partial derivatives of a scalar loss with respect to every texture bin.
struct TextureGradient {
  std::size_t face_count = 0;
  int bins_per_side = 0;
  std::vector<Rgb> data;  // same layout as Texture

  TextureGradient() = default;
  TextureGradient(std::size_t faces, int bins)
      : face_count(faces), bins_per_side(bins),
        data(faces * bins * bins, Rgb{0.0, 0.0, 0.0}) {}

  Rgb& bin(std::size_t face, int i, int j) {
    return data[(face * bins_per_side + i) * bins_per_side + j];
  }
  const Rgb& bin(std::size_t face, int i, int j) const {
    return data[(face * bins_per_side + i) * bins_per_side + j];
  }
};

/// Hard z-buffered rasterization at pixel centers. Covered pixel color is
/// clamp(shade(face_normal, env) * texture_bin, 0, 1) with the bin chosen
/// by the pixel's barycentric coordinates; uncovered pixels are black with
/// mask 0. Equal-depth ties go to the lower face index. Faces with any
/// vertex behind the near clip are culled whole. A mesh entirely behind
/// the camera yields an empty mask, not an error.
RenderOutput render(const Mesh& mesh, const Texture& texture, const Pose& pose,
                    const EnvironmentParams& env, int width, int height);

/// Exact texture gradient for a loss with per-pixel image gradient
/// `loss_grad`: each covered pixel adds shade_multiplier * loss_grad to its
/// selected bin. Pixels the forward pass clamped (channel at 0 or 1)
/// contribute zero for that channel. Accumulation order is row-major, so
/// results are bit-reproducible.
TextureGradient render_backward(const RenderOutput& output, const EnvironmentParams& env,
                                std::size_t face_count, int bins_per_side,
                                const Image& loss_grad);

}  // namespace dci
