#include "dci/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "dci/error.hpp"

namespace dci {
namespace {

std::string format_ap(double value) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << value;
  return os.str();
}

std::string sanitize_filename(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  }
  return out.empty() ? "unnamed" : out;
}

const char* kCurveColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                              "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

ApResult compute_ap(const std::vector<ImageDetection>& detections,
                    const std::vector<GroundTruth>& ground_truth, double iou_threshold) {
  std::set<std::string> known_images;
  std::map<std::string, std::vector<std::size_t>> visible_by_image;
  std::size_t n_visible = 0;
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    const GroundTruth& gt = ground_truth[g];
    known_images.insert(gt.image_id);
    if (!gt.visible) continue;
    if (!gt.box || !gt.box->valid()) {
      throw Error("compute_ap: visible ground truth without a valid box in image '" +
                  gt.image_id + "'");
    }
    visible_by_image[gt.image_id].push_back(g);
    ++n_visible;
  }

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].detection.score > detections[b].detection.score;
  });

  ApResult result;
  result.curve.reserve(order.size());
  std::vector<char> gt_matched(ground_truth.size(), 0);
  std::size_t tp = 0;
  std::size_t rank = 0;
  for (std::size_t idx : order) {
    const ImageDetection& d = detections[idx];
    if (!known_images.count(d.image_id)) {
      throw Error("compute_ap: detection references unknown image id '" + d.image_id + "'");
    }
    ++rank;
    auto it = visible_by_image.find(d.image_id);
    if (it != visible_by_image.end()) {
      double best_iou = 0.0;
      std::size_t best_g = ground_truth.size();
      for (std::size_t g : it->second) {
        if (gt_matched[g]) continue;
        const double v = iou(*ground_truth[g].box, d.detection.box);
        if (v >= iou_threshold && v > best_iou) {
          best_iou = v;
          best_g = g;
        }
      }
      if (best_g != ground_truth.size()) {
        gt_matched[best_g] = 1;
        ++tp;
      }
    }
    result.curve.push_back(
        {n_visible ? static_cast<double>(tp) / n_visible : 0.0,
         static_cast<double>(tp) / rank});
  }

  if (n_visible == 0 || result.curve.empty()) return result;  // AP 0 by definition

  // Area under the monotone envelope: at each recall increase, credit the
  // maximum precision attained at that recall or beyond.
  std::vector<double> envelope(result.curve.size());
  double max_p = 0.0;
  for (std::size_t i = result.curve.size(); i-- > 0;) {
    max_p = std::max(max_p, result.curve[i].precision);
    envelope[i] = max_p;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < result.curve.size(); ++i) {
    ap += (result.curve[i].recall - prev_recall) * envelope[i];
    prev_recall = result.curve[i].recall;
  }
  result.ap_percent = 100.0 * ap;
  return result;
}

std::vector<std::string> EvalReport::texture_labels() const {
  std::vector<std::string> labels;
  for (const auto& cell : cells) {
    if (std::find(labels.begin(), labels.end(), cell.texture) == labels.end()) {
      labels.push_back(cell.texture);
    }
  }
  return labels;
}

std::vector<std::string> EvalReport::detector_labels() const {
  std::vector<std::string> labels;
  for (const auto& cell : cells) {
    if (std::find(labels.begin(), labels.end(), cell.detector) == labels.end()) {
      labels.push_back(cell.detector);
    }
  }
  return labels;
}

const EvalCell* EvalReport::find(const std::string& texture,
                                 const std::string& detector) const {
  for (const auto& cell : cells) {
    if (cell.texture == texture && cell.detector == detector) return &cell;
  }
  return nullptr;
}

DeclineTable ap_decline(const EvalReport& baseline, const EvalReport& attacked) {
  const auto base_textures = baseline.texture_labels();
  if (base_textures.size() != 1) {
    throw Error("ap_decline: baseline report must carry exactly one texture label, got " +
                std::to_string(base_textures.size()));
  }
  DeclineTable table;
  table.baseline_texture = base_textures[0];
  table.detectors = baseline.detector_labels();
  table.textures = attacked.texture_labels();

  auto attacked_detectors = attacked.detector_labels();
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(table.detectors) != sorted(attacked_detectors)) {
    throw Error("ap_decline: detector sets differ between baseline and attacked reports");
  }

  table.mean_per_detector.assign(table.detectors.size(), 0.0);
  for (const auto& texture : table.textures) {
    std::vector<double> row;
    for (std::size_t d = 0; d < table.detectors.size(); ++d) {
      const EvalCell* base = baseline.find(table.baseline_texture, table.detectors[d]);
      const EvalCell* att = attacked.find(texture, table.detectors[d]);
      if (!base || !att) {
        throw Error("ap_decline: missing cell for texture '" + texture + "', detector '" +
                    table.detectors[d] + "'");
      }
      const double decline = base->ap.ap_percent - att->ap.ap_percent;
      row.push_back(decline);
      table.mean_per_detector[d] += decline;
    }
    table.decline.push_back(std::move(row));
  }
  if (!table.textures.empty()) {
    for (double& m : table.mean_per_detector) m /= static_cast<double>(table.textures.size());
  }
  return table;
}

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "svg-pr-curve" || name == "svg") return ReportFormat::kSvgPrCurve;
  throw Error("unknown report format '" + name + "' (expected csv, markdown, or svg-pr-curve)");
}

namespace {

std::string ap_table_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "Texture Type";
  for (const auto& d : report.detector_labels()) os << ",AP@" << d;
  os << "\n";
  for (const auto& t : report.texture_labels()) {
    os << t;
    for (const auto& d : report.detector_labels()) {
      const EvalCell* cell = report.find(t, d);
      os << "," << (cell ? format_ap(cell->ap.ap_percent) : "");
    }
    os << "\n";
  }
  return os.str();
}

std::string scene_table_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "Texture Type,Detector,Scene,AP\n";
  for (const auto& cell : report.cells) {
    for (const auto& [scene, ap] : cell.per_scene_ap) {
      os << cell.texture << "," << cell.detector << "," << scene << "," << format_ap(ap)
         << "\n";
    }
  }
  return os.str();
}

std::string ap_table_markdown(const EvalReport& report) {
  std::ostringstream os;
  const auto detectors = report.detector_labels();
  os << "| Texture Type |";
  for (const auto& d : detectors) os << " AP@" << d << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < detectors.size(); ++i) os << "---|";
  os << "\n";
  for (const auto& t : report.texture_labels()) {
    os << "| " << t << " |";
    for (const auto& d : detectors) {
      const EvalCell* cell = report.find(t, d);
      os << " " << (cell ? format_ap(cell->ap.ap_percent) : "") << " |";
    }
    os << "\n";
  }
  return os.str();
}

std::string scene_table_markdown(const EvalReport& report) {
  std::ostringstream os;
  os << "| Texture Type | Detector | Scene | AP |\n|---|---|---|---|\n";
  for (const auto& cell : report.cells) {
    for (const auto& [scene, ap] : cell.per_scene_ap) {
      os << "| " << cell.texture << " | " << cell.detector << " | " << scene << " | "
         << format_ap(ap) << " |\n";
    }
  }
  return os.str();
}

// Fixed plot geometry; precision up, recall right, unit square axes.
struct SvgLayout {
  double width = 640, height = 480;
  double left = 60, right = 170, top = 40, bottom = 50;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
  double x(double recall) const { return left + recall * plot_w(); }
  double y(double precision) const { return top + (1.0 - precision) * plot_h(); }
};

std::string pr_curve_svg(const std::string& detector, const EvalReport& report) {
  const SvgLayout L;
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << L.width << "\" height=\""
     << L.height << "\" viewBox=\"0 0 " << L.width << " " << L.height << "\">\n";
  os << "  <rect width=\"" << L.width << "\" height=\"" << L.height
     << "\" fill=\"white\"/>\n";
  os << "  <text x=\"" << L.left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
     << "PR curves: " << detector << "</text>\n";
  // axes
  os << "  <line x1=\"" << L.x(0) << "\" y1=\"" << L.y(0) << "\" x2=\"" << L.x(1)
     << "\" y2=\"" << L.y(0) << "\" stroke=\"black\"/>\n";
  os << "  <line x1=\"" << L.x(0) << "\" y1=\"" << L.y(0) << "\" x2=\"" << L.x(0)
     << "\" y2=\"" << L.y(1) << "\" stroke=\"black\"/>\n";
  for (double tick = 0.0; tick <= 1.0001; tick += 0.25) {
    os << "  <text x=\"" << L.x(tick) - 10 << "\" y=\"" << L.y(0) + 18
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << tick << "</text>\n";
    os << "  <text x=\"" << L.x(0) - 38 << "\" y=\"" << L.y(tick) + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << tick << "</text>\n";
  }
  os << "  <text x=\"" << L.x(0.5) - 20 << "\" y=\"" << L.height - 8
     << "\" font-family=\"sans-serif\" font-size=\"13\">recall</text>\n";
  os << "  <text x=\"14\" y=\"" << L.y(0.5)
     << "\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 14 "
     << L.y(0.5) << ")\">precision</text>\n";

  int color_index = 0;
  double legend_y = L.top + 10;
  for (const auto& cell : report.cells) {
    if (cell.detector != detector) continue;
    const char* color = kCurveColors[color_index % (sizeof(kCurveColors) / sizeof(char*))];
    ++color_index;
    if (!cell.ap.curve.empty()) {
      // Anchor the polyline at recall 0 with the first point's precision,
      // then trace the cumulative points; markers sit on data points only.
      os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
         << L.x(0) << "," << L.y(cell.ap.curve.front().precision);
      for (const auto& p : cell.ap.curve) os << " " << L.x(p.recall) << "," << L.y(p.precision);
      os << "\"/>\n";
      for (const auto& p : cell.ap.curve) {
        os << "  <circle cx=\"" << L.x(p.recall) << "\" cy=\"" << L.y(p.precision)
           << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
    }
    os << "  <line x1=\"" << L.width - L.right + 10 << "\" y1=\"" << legend_y << "\" x2=\""
       << L.width - L.right + 34 << "\" y2=\"" << legend_y << "\" stroke=\"" << color
       << "\" stroke-width=\"1.5\"/>\n";
    os << "  <text x=\"" << L.width - L.right + 40 << "\" y=\"" << legend_y + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << cell.texture << " (AP "
       << format_ap(cell.ap.ap_percent) << ")</text>\n";
    legend_y += 18;
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_report: cannot open " + path.string());
  out << text;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const EvalReport& report, ReportFormat format,
                                               const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  switch (format) {
    case ReportFormat::kCsv: {
      const auto main_path = out_dir / "report.csv";
      write_text(main_path, ap_table_csv(report));
      written.push_back(main_path);
      const auto scenes_path = out_dir / "report_scenes.csv";
      write_text(scenes_path, scene_table_csv(report));
      written.push_back(scenes_path);
      break;
    }
    case ReportFormat::kMarkdown: {
      const auto path = out_dir / "report.md";
      std::string text = "# Average precision\n\n" + ap_table_markdown(report);
      const std::string scenes = scene_table_markdown(report);
      text += "\n## Per-scene breakdown\n\n" + scenes;
      write_text(path, text);
      written.push_back(path);
      break;
    }
    case ReportFormat::kSvgPrCurve: {
      for (const auto& detector : report.detector_labels()) {
        const auto path = out_dir / ("pr_" + sanitize_filename(detector) + ".svg");
        write_text(path, pr_curve_svg(detector, report));
        written.push_back(path);
      }
      break;
    }
  }
  return written;
}

std::string format_decline_table(const DeclineTable& table, ReportFormat format) {
  std::ostringstream os;
  switch (format) {
    case ReportFormat::kCsv: {
      os << "Texture Type";
      for (const auto& d : table.detectors) os << ",Decline@" << d;
      os << "\n";
      for (std::size_t t = 0; t < table.textures.size(); ++t) {
        os << table.textures[t];
        for (double v : table.decline[t]) os << "," << format_ap(v);
        os << "\n";
      }
      os << "mean";
      for (double v : table.mean_per_detector) os << "," << format_ap(v);
      os << "\n";
      break;
    }
    case ReportFormat::kMarkdown: {
      os << "| Texture Type |";
      for (const auto& d : table.detectors) os << " Decline@" << d << " |";
      os << "\n|---|";
      for (std::size_t i = 0; i < table.detectors.size(); ++i) os << "---|";
      os << "\n";
      for (std::size_t t = 0; t < table.textures.size(); ++t) {
        os << "| " << table.textures[t] << " |";
        for (double v : table.decline[t]) os << " " << format_ap(v) << " |";
        os << "\n";
      }
      os << "| mean |";
      for (double v : table.mean_per_detector) os << " " << format_ap(v) << " |";
      os << "\n";
      break;
    }
    case ReportFormat::kSvgPrCurve:
      throw Error("format_decline_table: decline tables have no SVG form");
  }
  return os.str();
}

}  // namespace dci
