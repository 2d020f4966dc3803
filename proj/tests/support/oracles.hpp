#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dci/case_graph.hpp"
#include "dci/evaluator.hpp"
#include "dci/mesh.hpp"
#include "dci/render.hpp"
#include "dci/scene.hpp"
#include "dci/texture.hpp"

// Reference implementations kept deliberately naive and structurally
// different from the library code they cross-check.
namespace dci::testoracle {

/// Lazy-deletion binary-heap Dijkstra. `settled` (optional) receives the
/// number of nodes settled before the goal pops.
std::optional<double> dijkstra_cost(const CaseGraph& graph, int start, int goal,
                                    std::size_t* settled = nullptr);

/// All-point interpolated AP computed by sweeping every distinct score as a
/// threshold and redoing the greedy match from scratch each time. The
/// integration uses a quadratic-time suffix maximum instead of a cumulative
/// envelope. Intended for instances with distinct scores.
double threshold_sweep_ap(const std::vector<ImageDetection>& detections,
                          const std::vector<GroundTruth>& ground_truth,
                          double iou_threshold);

struct ReferenceRaster {
  Image image;
  Mask mask;
  std::vector<std::int32_t> face_buffer;
};

/// Per-pixel loop over every face: affine barycentrics come from a Cramer
/// solve at each pixel center, depth from 1/z interpolation, shading and bin
/// selection re-derived inline.
ReferenceRaster reference_rasterize(const Mesh& mesh, const Texture& texture,
                                    const Pose& pose, const EnvironmentParams& env,
                                    int width, int height);

}  // namespace dci::testoracle
