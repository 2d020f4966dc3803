#include "dci/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "dci/compositor.hpp"
#include "dci/evaluator.hpp"
#include "dci/render.hpp"
#include "dci/rng.hpp"

namespace dci {
namespace {

BackgroundRequest request_for(const Manifest& manifest, const ManifestEntry& entry, int width,
                              int height) {
  BackgroundRequest request;
  request.scene_id = entry.scene_id;
  request.weather_tag = entry.weather;
  request.viewpoint_tag = entry.viewpoint_tag;
  request.pose_hint = entry.pose;
  request.env_hint = manifest.env_for(entry.weather);
  request.width = width;
  request.height = height;
  return request;
}

}  // namespace

void AttackConfig::validate() const {
  if (step <= 0.0) throw Error("attack config: step must be positive");
  if (epochs < 1) throw Error("attack config: epochs must be >= 1");
  if (batch < 1) throw Error("attack config: batch must be >= 1");
  if (clamp_lo >= clamp_hi) throw Error("attack config: clamp bounds must be ordered");
  if (max_iterations && *max_iterations < 0) {
    throw Error("attack config: max_iterations must be >= 0");
  }
  if (width <= 0 || height <= 0) throw Error("attack config: non-positive frame dimensions");
}

AttackResult attack_texture(const Mesh& mesh, const Texture& texture0,
                            const Manifest& manifest, const BackgroundProvider& provider,
                            const ToyDetectorModel& model, const AttackConfig& config) {
  config.validate();
  validate_texture(texture0, mesh);
  if (manifest.entries.empty()) throw Error("attack_texture: empty manifest");

  AttackResult result;
  result.texture = texture0;
  result.checksum_before = texture0.checksum();

  const std::size_t per_epoch =
      (manifest.entries.size() + config.batch - 1) / static_cast<std::size_t>(config.batch);
  std::size_t planned = per_epoch * static_cast<std::size_t>(config.epochs);
  if (config.max_iterations) {
    planned = std::min(planned, static_cast<std::size_t>(*config.max_iterations));
  }

  std::mt19937_64 rng(config.seed);
  result.loss_trace.reserve(planned);
  for (std::size_t it = 0; it < planned; ++it) {
    TextureGradient grad(result.texture.face_count(), result.texture.bins_per_side());
    double loss = 0.0;
    for (int b = 0; b < config.batch; ++b) {
      const std::size_t pick = uniform_below(rng, manifest.entries.size());
      const ManifestEntry& entry = manifest.entries[pick];
      ++result.scenes_sampled;

      SceneBuildResult scene = build_scene_instance(
          mesh, result.texture, provider,
          request_for(manifest, entry, config.width, config.height));
      if (!scene.instance.vehicle_visible) continue;
      ++result.scenes_with_vehicle;

      DetectGradResult dg = detect_grad(model, scene.composite,
                                        *scene.instance.ground_truth_box, config.match_iou);
      if (!dg.matched) continue;
      ++result.scenes_matched;
      loss += dg.score / config.batch;

      // Composite gradient: texture influences only mask-covered pixels,
      // and there composite == rendered car, so the pixel gradient passes
      // through unchanged; render_backward ignores uncovered pixels.
      for (auto& g : dg.grad.data()) g = g * (1.0 / config.batch);
      TextureGradient scene_grad =
          render_backward(scene.render_output, scene.instance.env,
                          result.texture.face_count(), result.texture.bins_per_side(), dg.grad);
      for (std::size_t i = 0; i < grad.data.size(); ++i) grad.data[i] += scene_grad.data[i];
    }

    if (!std::isfinite(loss)) {
      throw AttackError("attack_texture: non-finite loss at iteration " + std::to_string(it),
                        result.loss_trace);
    }
    result.loss_trace.push_back(loss);
    auto& bins = result.texture.data();
    for (std::size_t i = 0; i < bins.size(); ++i) {
      bins[i].r = std::clamp(bins[i].r - config.step * grad.data[i].r, config.clamp_lo,
                             config.clamp_hi);
      bins[i].g = std::clamp(bins[i].g - config.step * grad.data[i].g, config.clamp_lo,
                             config.clamp_hi);
      bins[i].b = std::clamp(bins[i].b - config.step * grad.data[i].b, config.clamp_lo,
                             config.clamp_hi);
    }
    ++result.iterations;
  }

  if (result.scenes_sampled > 0 && result.scenes_with_vehicle == 0) {
    throw Error("attack_texture: every sampled scene had an empty mask; nothing to attack");
  }
  result.checksum_after = result.texture.checksum();
  return result;
}

AttackEvaluation evaluate_attack(const Mesh& mesh, const Texture& texture_before,
                                 const Texture& texture_after, const Manifest& manifest,
                                 const BackgroundProvider& provider,
                                 const ToyDetectorModel& model, int width, int height) {
  validate_texture(texture_before, mesh);
  validate_texture(texture_after, mesh);

  auto evaluate = [&](const Texture& texture) {
    std::vector<ImageDetection> detections;
    std::vector<GroundTruth> gts;
    for (const ManifestEntry& entry : manifest.entries) {
      SceneBuildResult scene = build_scene_instance(
          mesh, texture, provider, request_for(manifest, entry, width, height));
      gts.push_back({scene.instance.ground_truth_box, entry.entry_id,
                     scene.instance.vehicle_visible});
      for (const Detection& d : detect(model, scene.composite)) {
        detections.push_back({d, entry.entry_id});
      }
    }
    return compute_ap(detections, gts).ap_percent;
  };

  AttackEvaluation eval;
  eval.ap_before = evaluate(texture_before);
  eval.ap_after = evaluate(texture_after);
  eval.decline = eval.ap_before - eval.ap_after;
  return eval;
}

void save_attack_record(const std::filesystem::path& path, const AttackConfig& config,
                        const std::vector<double>& loss_trace, std::uint64_t checksum_before,
                        std::uint64_t checksum_after, const std::string& aborted_message) {
  nlohmann::json j = {
      {"config",
       {{"step", config.step},
        {"epochs", config.epochs},
        {"batch", config.batch},
        {"seed", config.seed},
        {"clamp", {config.clamp_lo, config.clamp_hi}},
        {"width", config.width},
        {"height", config.height},
        {"match_iou", config.match_iou}}},
      {"loss_trace", loss_trace},
      {"texture_checksum_before", checksum_before},
      {"texture_checksum_after", checksum_after},
  };
  if (config.max_iterations) j["config"]["max_iterations"] = *config.max_iterations;
  if (!aborted_message.empty()) j["aborted"] = aborted_message;
  std::ofstream out(path);
  if (!out) throw IoError("save_attack_record: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dci
