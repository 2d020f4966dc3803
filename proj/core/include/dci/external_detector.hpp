#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dci/detector.hpp"
#include "dci/image.hpp"

namespace dci {

/// File-exchange detector bridge: frames go out as PNGs, detections come
/// back as `<stem>.detections.json` produced by an external process
/// watching the directory.
struct ExternalDetectorConfig {
  std::filesystem::path exchange_dir;
  double timeout_seconds = 30.0;
  double poll_interval_seconds = 0.05;
};

class ExternalDetector {
 public:
  explicit ExternalDetector(ExternalDetectorConfig config);

  /// If `<stem>.detections.json` already exists it is read directly and no
  /// image is written (offline mode). Otherwise writes `<stem>.png` and
  /// polls for the detections file until the timeout.
  std::vector<Detection> detect(const Image& image, const std::string& stem) const;

  std::filesystem::path detections_path(const std::string& stem) const;

 private:
  ExternalDetectorConfig config_;
};

/// Parses `[{"box":[x0,y0,x1,y1],"score":s,"class_id":c}, ...]`; malformed
/// entries fail naming the offending field.
std::vector<Detection> parse_detections(const std::string& text, const std::string& source);
std::vector<Detection> load_detections(const std::filesystem::path& path);
void save_detections(const std::filesystem::path& path, const std::vector<Detection>& detections);

}  // namespace dci
