#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dci/detector.hpp"
#include "dci/image.hpp"

namespace dci {

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct ApResult {
  double ap_percent = 0.0;
  std::vector<PrPoint> curve;  // cumulative (recall, precision), one per ranked detection
};

struct ImageDetection {
  Detection detection;
  std::string image_id;
};

/// One per dataset frame. Invisible ground truths keep the frame known to
/// the evaluator but are excluded from the AP denominator and can never be
/// matched.
struct GroundTruth {
  std::optional<Box> box;
  std::string image_id;
  bool visible = false;
};

/// All-point interpolated AP at one IoU threshold, in percent. Detections
/// rank by descending score, ties by insertion order; each is a TP if it
/// overlaps an unmatched visible ground truth of its frame at or above the
/// threshold (highest overlap first). Throws if a detection references a
/// frame absent from `ground_truth`.
ApResult compute_ap(const std::vector<ImageDetection>& detections,
                    const std::vector<GroundTruth>& ground_truth, double iou_threshold = 0.5);

/// One AP measurement: a (texture variant, detector) pair.
struct EvalCell {
  std::string texture;
  std::string detector;
  ApResult ap;
  std::map<std::string, double> per_scene_ap;  // breakdown keyed by scene id
};

struct EvalReport {
  std::vector<EvalCell> cells;

  std::vector<std::string> texture_labels() const;   // first-seen order
  std::vector<std::string> detector_labels() const;  // first-seen order
  const EvalCell* find(const std::string& texture, const std::string& detector) const;
};

/// AP decline in percentage points, one row per attacked texture, one
/// column per detector, plus the per-detector mean across rows. The
/// baseline report must carry exactly one texture label and the same
/// detector set as the attacked report.
struct DeclineTable {
  std::string baseline_texture;
  std::vector<std::string> textures;
  std::vector<std::string> detectors;
  std::vector<std::vector<double>> decline;  // [texture][detector]
  std::vector<double> mean_per_detector;
};

DeclineTable ap_decline(const EvalReport& baseline, const EvalReport& attacked);

enum class ReportFormat { kCsv, kMarkdown, kSvgPrCurve };

ReportFormat report_format_from_string(const std::string& name);

/// Writes the AP table (texture rows x AP@detector columns) as
/// `report.csv`/`report.md` plus a per-scene breakdown table, or one
/// `pr_<detector>.svg` per detector with one labeled curve per texture.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_report(const EvalReport& report, ReportFormat format,
                                               const std::filesystem::path& out_dir);

/// Decline table in the same row/column layout, as CSV or markdown text.
std::string format_decline_table(const DeclineTable& table, ReportFormat format);

}  // namespace dci
