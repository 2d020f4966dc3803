#include "dci/external_detector.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "dci/error.hpp"

namespace dci {

ExternalDetector::ExternalDetector(ExternalDetectorConfig config) : config_(std::move(config)) {
  if (config_.exchange_dir.empty()) {
    throw Error("external detector: exchange directory not configured");
  }
  std::filesystem::create_directories(config_.exchange_dir);
}

std::filesystem::path ExternalDetector::detections_path(const std::string& stem) const {
  return config_.exchange_dir / (stem + ".detections.json");
}

std::vector<Detection> ExternalDetector::detect(const Image& image,
                                                const std::string& stem) const {
  const auto result_path = detections_path(stem);
  if (!std::filesystem::exists(result_path)) {
    write_png(config_.exchange_dir / (stem + ".png"), image);
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(config_.timeout_seconds));
    while (!std::filesystem::exists(result_path)) {
      if (std::chrono::steady_clock::now() >= deadline) {
        throw IoError("external detector: timed out after " +
                      std::to_string(config_.timeout_seconds) + " s waiting for " +
                      result_path.string());
      }
      std::this_thread::sleep_for(
          std::chrono::duration<double>(config_.poll_interval_seconds));
    }
  }
  return load_detections(result_path);
}

std::vector<Detection> parse_detections(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": invalid JSON: " + e.what());
  }
  if (!j.is_array()) throw ParseError(source + ": expected a top-level array");

  std::vector<Detection> detections;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string where = source + ": detection " + std::to_string(i);
    if (!e.is_object()) throw ParseError(where + ": expected an object");
    for (const char* key : {"box", "score", "class_id"}) {
      if (!e.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    }
    Detection d;
    const auto& box = e["box"];
    if (!box.is_array() || box.size() != 4) {
      throw ParseError(where + ": field 'box' must be [x0,y0,x1,y1]");
    }
    for (const auto& v : box) {
      if (!v.is_number()) throw ParseError(where + ": field 'box' must be numeric");
    }
    d.box = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
             box[3].get<double>()};
    if (!d.box.valid()) throw ParseError(where + ": field 'box' has non-positive area");
    if (!e["score"].is_number()) throw ParseError(where + ": field 'score' must be numeric");
    d.score = e["score"].get<double>();
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw ParseError(where + ": field 'score' must lie in [0,1]");
    }
    if (!e["class_id"].is_number_integer()) {
      throw ParseError(where + ": field 'class_id' must be an integer");
    }
    d.class_id = e["class_id"].get<int>();
    detections.push_back(d);
  }
  return detections;
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_detections: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_detections(buffer.str(), path.string());
}

void save_detections(const std::filesystem::path& path,
                     const std::vector<Detection>& detections) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& d : detections) {
    j.push_back({{"box", {d.box.x0, d.box.y0, d.box.x1, d.box.y1}},
                 {"score", d.score},
                 {"class_id", d.class_id}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("save_detections: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dci
