#include "dci/compositor.hpp"

#include "dci/error.hpp"

namespace dci {

Image composite(const Image& car, const Mask& mask, const Image& background) {
  if (!car.same_size(background) || car.width() != mask.width() ||
      car.height() != mask.height()) {
    throw Error("composite: dimension mismatch (car " + std::to_string(car.width()) + "x" +
                std::to_string(car.height()) + ", mask " + std::to_string(mask.width()) + "x" +
                std::to_string(mask.height()) + ", background " +
                std::to_string(background.width()) + "x" + std::to_string(background.height()) +
                ")");
  }
  Image out(car.width(), car.height());
  for (int y = 0; y < car.height(); ++y) {
    for (int x = 0; x < car.width(); ++x) {
      out.at(x, y) = mask.at(x, y) ? car.at(x, y) : background.at(x, y);
    }
  }
  return out;
}

SceneBuildResult build_scene_instance(const Mesh& mesh, const Texture& texture,
                                      const BackgroundProvider& provider,
                                      const BackgroundRequest& request) {
  Background bg = provider.acquire(request);
  SceneBuildResult result;
  result.render_output = render(mesh, texture, bg.pose, bg.env, bg.image.width(),
                                bg.image.height());
  result.composite = composite(result.render_output.image, result.render_output.mask, bg.image);

  SceneInstance& inst = result.instance;
  inst.background = std::move(bg.image);
  inst.pose = bg.pose;
  inst.env = bg.env;
  inst.ground_truth_box = result.render_output.mask.tight_bounding_box();
  inst.vehicle_visible = inst.ground_truth_box.has_value();
  inst.scene_id = request.scene_id;
  inst.weather_tag = request.weather_tag;
  inst.viewpoint_tag = request.viewpoint_tag;
  return result;
}

}  // namespace dci
