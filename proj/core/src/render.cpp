#include "dci/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dci/error.hpp"

namespace dci {
namespace {

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

CameraBasis CameraBasis::from_pose(const Pose& pose) {
  Vec3 forward = pose.camera_direction.normalized();
  Vec3 right = pose.camera_up.cross(forward).normalized();
  Vec3 up = forward.cross(right);
  return {right, up, forward};
}

std::optional<ProjectedPoint> project(const Pose& pose, const Vec3& point,
                                      int width, int height) {
  CameraBasis basis = CameraBasis::from_pose(pose);
  Vec3 rel = point - pose.camera_position;
  double depth = rel.dot(basis.forward);
  if (depth <= kNearClip) return std::nullopt;

  double tan_half = std::tan(pose.fov * 0.5);
  double aspect = static_cast<double>(width) / height;
  double ndc_x = rel.dot(basis.right) / (depth * tan_half * aspect);
  double ndc_y = rel.dot(basis.up) / (depth * tan_half);
  ProjectedPoint p;
  p.x = (ndc_x + 1.0) * 0.5 * width;
  p.y = (1.0 - ndc_y) * 0.5 * height;
  p.depth = depth;
  return p;
}

Vec3 pixel_ray_direction(const Pose& pose, double x, double y, int width, int height) {
  CameraBasis basis = CameraBasis::from_pose(pose);
  double tan_half = std::tan(pose.fov * 0.5);
  double aspect = static_cast<double>(width) / height;
  double ndc_x = 2.0 * x / width - 1.0;
  double ndc_y = 1.0 - 2.0 * y / height;
  Vec3 dir = basis.forward + basis.right * (ndc_x * tan_half * aspect) +
             basis.up * (ndc_y * tan_half);
  return dir.normalized();
}

Rgb shade(const Vec3& face_normal, const EnvironmentParams& env) {
  double lambert = std::max(0.0, face_normal.dot(env.light_direction));
  return env.ambient_color * env.ambient_intensity +
         env.directional_color * (env.directional_intensity * lambert);
}

RenderOutput render(const Mesh& mesh, const Texture& texture, const Pose& pose,
                    const EnvironmentParams& env, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error("render: zero-area image (" + std::to_string(width) + "x" +
                std::to_string(height) + ")");
  }
  pose.validate();
  env.validate();

  const std::size_t npix = static_cast<std::size_t>(width) * height;
  RenderOutput out;
  out.image = Image(width, height);
  out.mask = Mask(width, height);
  out.face_buffer.assign(npix, -1);
  out.bary_buffer.assign(npix, {0.0, 0.0, 0.0});
  out.depth_buffer.assign(npix, std::numeric_limits<double>::infinity());

  // Vehicle yaw + placement, then projection of every vertex once.
  std::vector<Vec3> world(mesh.vertex_count());
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    world[i] = rotate_z(mesh.vertices[i], pose.model_angle) + pose.model_position;
  }
  out.world_face_normals.resize(mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    out.world_face_normals[f] = rotate_z(mesh.face_normals[f], pose.model_angle);
  }
  std::vector<std::optional<ProjectedPoint>> proj(mesh.vertex_count());
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    proj[i] = project(pose, world[i], width, height);
  }

  // Geometry pass: z-buffer with perspective-correct barycentrics. Faces in
  // ascending index order plus a strict depth test give lower-index wins on
  // exact depth ties.
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto& face = mesh.faces[f];
    const auto& p0 = proj[face[0]];
    const auto& p1 = proj[face[1]];
    const auto& p2 = proj[face[2]];
    if (!p0 || !p1 || !p2) continue;  // near-plane cull, whole face

    double min_x = std::min({p0->x, p1->x, p2->x});
    double max_x = std::max({p0->x, p1->x, p2->x});
    double min_y = std::min({p0->y, p1->y, p2->y});
    double max_y = std::max({p0->y, p1->y, p2->y});
    int px_lo = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
    int px_hi = std::min(width - 1, static_cast<int>(std::floor(max_x - 0.5)));
    int py_lo = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
    int py_hi = std::min(height - 1, static_cast<int>(std::floor(max_y - 0.5)));
    if (px_lo > px_hi || py_lo > py_hi) continue;

    double area2 = cross2(p1->x - p0->x, p1->y - p0->y, p2->x - p0->x, p2->y - p0->y);
    if (area2 == 0.0) continue;  // edge-on
    double sign = area2 > 0.0 ? 1.0 : -1.0;
    double inv_area = 1.0 / (area2 * sign);
    double iz0 = 1.0 / p0->depth, iz1 = 1.0 / p1->depth, iz2 = 1.0 / p2->depth;

    for (int py = py_lo; py <= py_hi; ++py) {
      double cy = py + 0.5;
      for (int px = px_lo; px <= px_hi; ++px) {
        double cx = px + 0.5;
        double w0 = sign * cross2(p2->x - p1->x, p2->y - p1->y, cx - p1->x, cy - p1->y);
        double w1 = sign * cross2(p0->x - p2->x, p0->y - p2->y, cx - p2->x, cy - p2->y);
        double w2 = sign * cross2(p1->x - p0->x, p1->y - p0->y, cx - p0->x, cy - p0->y);
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        double b0 = w0 * inv_area, b1 = w1 * inv_area, b2 = w2 * inv_area;
        double denom = b0 * iz0 + b1 * iz1 + b2 * iz2;
        double depth = 1.0 / denom;
        std::size_t idx = static_cast<std::size_t>(py) * width + px;
        if (depth < out.depth_buffer[idx]) {
          out.depth_buffer[idx] = depth;
          out.face_buffer[idx] = static_cast<std::int32_t>(f);
          out.bary_buffer[idx] = {b0 * iz0 / denom, b1 * iz1 / denom, b2 * iz2 / denom};
        }
      }
    }
  }

  // Shading pass.
  const int t = texture.bins_per_side();
  std::vector<Rgb> face_mult(mesh.face_count());
  std::vector<bool> mult_ready(mesh.face_count(), false);
  for (int py = 0; py < height; ++py) {
    for (int px = 0; px < width; ++px) {
      std::size_t idx = static_cast<std::size_t>(py) * width + px;
      std::int32_t f = out.face_buffer[idx];
      if (f < 0) continue;
      if (!mult_ready[f]) {
        face_mult[f] = shade(out.world_face_normals[f], env);
        mult_ready[f] = true;
      }
      const auto& bc = out.bary_buffer[idx];
      auto [i, j] = texture_bin_for_barycentric(bc[1], bc[2], t);
      Rgb c = face_mult[f] * texture.bin(static_cast<std::size_t>(f), i, j);
      out.image.at(px, py) = Rgb{clamp01(c.r), clamp01(c.g), clamp01(c.b)};
      out.mask.at(px, py) = 1;
    }
  }
  return out;
}

TextureGradient render_backward(const RenderOutput& output, const EnvironmentParams& env,
                                std::size_t face_count, int bins_per_side,
                                const Image& loss_grad) {
  if (!loss_grad.same_size(output.image)) {
    throw Error("render_backward: loss_grad is " + std::to_string(loss_grad.width()) + "x" +
                std::to_string(loss_grad.height()) + " but the render is " +
                std::to_string(output.image.width()) + "x" +
                std::to_string(output.image.height()));
  }
  TextureGradient grad(face_count, bins_per_side);
  const int width = output.image.width();
  const int height = output.image.height();
  std::vector<Rgb> face_mult(face_count);
  std::vector<bool> mult_ready(face_count, false);
  for (int py = 0; py < height; ++py) {
    for (int px = 0; px < width; ++px) {
      std::size_t idx = static_cast<std::size_t>(py) * width + px;
      std::int32_t f = output.face_buffer[idx];
      if (f < 0) continue;
      auto fu = static_cast<std::size_t>(f);
      if (!mult_ready[fu]) {
        face_mult[fu] = shade(output.world_face_normals[fu], env);
        mult_ready[fu] = true;
      }
      const auto& bc = output.bary_buffer[idx];
      auto [i, j] = texture_bin_for_barycentric(bc[1], bc[2], bins_per_side);
      const Rgb& mult = face_mult[fu];
      const Rgb& g = loss_grad.at(px, py);
      const Rgb& pixel = output.image.at(px, py);
      Rgb& slot = grad.bin(fu, i, j);
      // Zero subgradient where the forward clamp was active.
      if (pixel.r > 0.0 && pixel.r < 1.0) slot.r += mult.r * g.r;
      if (pixel.g > 0.0 && pixel.g < 1.0) slot.g += mult.g * g.g;
      if (pixel.b > 0.0 && pixel.b < 1.0) slot.b += mult.b * g.b;
    }
  }
  return grad;
}

}  // namespace dci
