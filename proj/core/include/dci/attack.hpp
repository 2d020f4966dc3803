#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dci/background.hpp"
#include "dci/detector.hpp"
#include "dci/error.hpp"
#include "dci/manifest.hpp"
#include "dci/mesh.hpp"
#include "dci/texture.hpp"

namespace dci {

struct AttackConfig {
  double step = 1e-5;             // gradient step size
  int epochs = 1;
  int batch = 1;
  std::uint64_t seed = 0;
  double clamp_lo = 0.0;
  double clamp_hi = 1.0;
  std::optional<int> max_iterations;  // cap on update steps; 0 makes the run a no-op
  int width = 256;
  int height = 256;
  double match_iou = 0.5;         // detect_grad anchor-to-box matching

  void validate() const;
};

struct AttackResult {
  Texture texture;
  std::vector<double> loss_trace;  // mean matched score per iteration
  std::uint64_t checksum_before = 0;
  std::uint64_t checksum_after = 0;
  std::size_t iterations = 0;
  std::size_t scenes_sampled = 0;
  std::size_t scenes_with_vehicle = 0;  // nonempty render mask
  std::size_t scenes_matched = 0;       // detect_grad found an anchor
};

/// Thrown when the optimization aborts (non-finite loss); carries the
/// partial trace for the run record.
class AttackError : public Error {
 public:
  AttackError(const std::string& message, std::vector<double> partial_trace)
      : Error(message), trace(std::move(partial_trace)) {}
  std::vector<double> trace;
};

/// Gradient descent on the texture against the detector's matched-box
/// confidence, in expectation over scenes drawn uniformly (seeded) from
/// the manifest. One iteration: sample a batch, composite each scene,
/// average detect_grad over the batch, push the gradient through the
/// renderer, take one clamped step. Iteration count is
/// epochs * ceil(entries / batch), optionally capped. Fails if every
/// sampled scene had an empty mask.
AttackResult attack_texture(const Mesh& mesh, const Texture& texture0,
                            const Manifest& manifest, const BackgroundProvider& provider,
                            const ToyDetectorModel& model, const AttackConfig& config);

struct AttackEvaluation {
  double ap_before = 0.0;
  double ap_after = 0.0;
  double decline = 0.0;  // percentage points
};

/// Renders the manifest under both textures, runs the detector, and
/// reports AP before/after plus the decline, all in memory.
AttackEvaluation evaluate_attack(const Mesh& mesh, const Texture& texture_before,
                                 const Texture& texture_after, const Manifest& manifest,
                                 const BackgroundProvider& provider,
                                 const ToyDetectorModel& model, int width, int height);

/// Run record: config echo, loss trace, checksums. `aborted_message` is
/// empty for successful runs.
void save_attack_record(const std::filesystem::path& path, const AttackConfig& config,
                        const std::vector<double>& loss_trace, std::uint64_t checksum_before,
                        std::uint64_t checksum_after, const std::string& aborted_message = "");

}  // namespace dci
