#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dci/image.hpp"

namespace dci {

struct Detection {
  Box box;
  double score = 0.0;
  int class_id = 0;
};

/// Anchor template sizes in pixels; vehicle boxes are typically wide, so
/// the defaults mix 2:1 and square shapes.
struct AnchorGridConfig {
  int stride = 8;
  std::vector<std::pair<int, int>> box_sizes = {{32, 16}, {64, 32}, {128, 64}, {192, 96},
                                                {48, 48}, {64, 48}, {96, 64},  {96, 96}};
};

struct Anchor {
  Box box;  // clipped to the image
  int size_index = 0;
};

/// Square anchors of every configured size centered on a stride grid,
/// clipped to the image. Anchors whose clipped box is empty are dropped.
/// Order: row-major over centers, sizes innermost.
std::vector<Anchor> build_anchor_grid(int width, int height, const AnchorGridConfig& config);

/// One logistic regressor per anchor size over average-pooled patch
/// features. Scores are linear in the image pixels up to the final
/// sigmoid, so score gradients w.r.t. pixels are closed-form.
struct ToyDetectorModel {
  AnchorGridConfig anchors;
  int pool = 6;  // features are pool x pool x 3 cell averages over the anchor box
  int class_id = 0;
  double threshold = 0.5;
  double nms_iou = 0.5;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> weights;  // [size_index][3 * pool * pool]
  std::vector<double> biases;                // [size_index]
  std::vector<double> loss_trace;            // mean training loss, one entry per step + final
  bool underfit = false;

  std::size_t feature_size() const { return 3u * static_cast<std::size_t>(pool) * pool; }
};

struct TrainSample {
  Image image;
  Box box;
};

struct TrainConfig {
  int iterations = 300;
  double l2 = 1e-4;
  double iou_positive = 0.5;   // anchor-to-box match threshold for positives
  int negatives_per_image = 64;
  double min_recall = 0.9;     // training-set recall below this sets `underfit`
  AnchorGridConfig anchors{};
  int pool = 6;
};

/// Deterministic full-batch gradient descent; the step size is derived
/// from a smoothness bound on the data, so the recorded loss trace is
/// non-increasing. Requires at least 10 samples on each side. Training
/// recall below `min_recall` sets the model's `underfit` flag instead of
/// failing.
ToyDetectorModel train_toy_detector(const std::vector<TrainSample>& positives,
                                    const std::vector<Image>& negatives, std::uint64_t seed,
                                    const TrainConfig& config = {});

/// Pre-NMS logistic scores for `anchors` on this image, in anchor order.
std::vector<double> score_anchors(const ToyDetectorModel& model, const Image& image,
                                  const std::vector<Anchor>& anchors);

/// Scores all anchors, keeps those at or above the threshold, applies
/// greedy NMS (suppress at IoU >= model.nms_iou), and returns detections
/// sorted by descending score; ties keep anchor order.
std::vector<Detection> detect(const ToyDetectorModel& model, const Image& image,
                              double score_threshold);
std::vector<Detection> detect(const ToyDetectorModel& model, const Image& image);

struct DetectGradResult {
  double score = 0.0;
  bool matched = false;
  Image grad;  // d(score)/d(pixel); zero outside the matched anchor
};

/// Maximum pre-NMS score among anchors overlapping `target_box` at IoU >=
/// `match_iou`, with the exact gradient of that score w.r.t. every pixel.
/// No matching anchor: score 0, zero gradient, `matched` false.
DetectGradResult detect_grad(const ToyDetectorModel& model, const Image& image,
                             const Box& target_box, double match_iou = 0.5);

void save_detector(const std::filesystem::path& path, const ToyDetectorModel& model);
ToyDetectorModel load_detector(const std::filesystem::path& path);

}  // namespace dci
