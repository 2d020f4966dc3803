#pragma once

#include "dci/background.hpp"
#include "dci/image.hpp"
#include "dci/mesh.hpp"
#include "dci/render.hpp"
#include "dci/scene.hpp"
#include "dci/texture.hpp"

namespace dci {

/// Per-pixel hard selection: out[p] = mask[p]*car[p] + (1-mask[p])*background[p].
/// All three rasters must share dimensions.
Image composite(const Image& car, const Mask& mask, const Image& background);

/// Full fusion product for one frame. `render_output.mask` is the
/// compositing mask; gradients of any composite loss reach the texture
/// only through mask-covered pixels.
struct SceneBuildResult {
  SceneInstance instance;
  Image composite;
  RenderOutput render_output;
};

/// Runs acquire -> render -> composite with one shared parameter set, then
/// derives the ground-truth box from the render mask. An empty mask keeps
/// the instance, flagged not-visible.
SceneBuildResult build_scene_instance(const Mesh& mesh, const Texture& texture,
                                      const BackgroundProvider& provider,
                                      const BackgroundRequest& request);

}  // namespace dci
