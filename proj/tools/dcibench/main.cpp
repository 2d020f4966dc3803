// Command-line front end: generate -> train-detector -> attack -> evaluate
// -> report. Every artifact embeds its resolved configuration and seed, and
// nothing here writes timestamps, so identical invocations produce
// identical bytes.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dci/attack.hpp"
#include "dci/background.hpp"
#include "dci/case_graph.hpp"
#include "dci/compositor.hpp"
#include "dci/detector.hpp"
#include "dci/error.hpp"
#include "dci/evaluator.hpp"
#include "dci/external_detector.hpp"
#include "dci/manifest.hpp"
#include "dci/materialize.hpp"
#include "dci/mesh.hpp"
#include "dci/texture.hpp"
#include "dci/weather.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPipeline = 2;
constexpr int kExitPartial = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw ConfigError(flag + ": path is required");
  if (!std::filesystem::exists(path)) throw ConfigError(flag + ": file not found: " + path);
}

// JSON front end for CLI11's config machinery; nested objects become
// dotted keys. Command-line flags still win over file values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    std::function<void(const nlohmann::json&, std::vector<std::string>)> walk =
        [&](const nlohmann::json& node, std::vector<std::string> parents) {
          for (const auto& [key, value] : node.items()) {
            if (value.is_object()) {
              auto deeper = parents;
              deeper.push_back(key);
              walk(value, deeper);
              continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
              for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
              item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
          }
        };
    walk(j, {});
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  }
};

void add_config_flag(CLI::App* cmd) {
  cmd->set_config("--config", "", "JSON config file; command-line flags override it");
  cmd->config_formatter(std::make_shared<JsonConfig>());
}

// CLI11 reads config files only on the root app, so each subcommand applies
// its own file here before dispatching. Keys name flags without the leading
// dashes; values for flags already given on the command line are skipped.
void apply_config_files(CLI::App* cmd) {
  CLI::Option* config_opt = cmd->get_config_ptr();
  if (config_opt == nullptr || config_opt->count() == 0) return;
  for (const auto& path : config_opt->as<std::vector<std::string>>()) {
    if (path.empty()) continue;
    std::ifstream input(path);
    if (!input) throw ConfigError("--config: cannot open " + path);
    for (const auto& item : cmd->get_config_formatter()->from_config(input)) {
      const std::string key = item.fullname();
      CLI::Option* opt = cmd->get_option_no_throw("--" + key);
      if (opt == nullptr) throw ConfigError("--config: unknown key: " + key);
      if (opt->count() > 0) continue;
      for (const auto& value : item.inputs) opt->add_result(value);
      opt->run_callback();
    }
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n <= 0) throw ConfigError("list size must be positive");
  if (n == 1) return {0.5 * (lo + hi)};
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = lo + (hi - lo) * i / (n - 1);
  return values;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw dci::IoError("cannot open " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path, const std::string& flag) {
  require_file(path.string(), flag);
  std::ifstream in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(flag + ": " + path.string() + " is not valid JSON: " + e.what());
  }
  return j;
}

// Shared scene inputs: the vehicle, its texture, lighting presets, and the
// background source.
struct SceneOptions {
  std::string mesh_path;
  std::string texture_path;
  std::string weathers_path;
  std::string background_dir;
  int width = 256;
  int height = 256;
  int texture_bins = 4;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mesh", mesh_path, "Vehicle OBJ mesh")->required();
    cmd->add_option("--texture", texture_path,
                    "Input texture grid; omitted means a uniform mid-gray texture");
    cmd->add_option("--weathers", weathers_path,
                    "Weather preset JSON; omitted means the bundled presets");
    cmd->add_option("--background-dir", background_dir,
                    "Directory of exported background frames + sidecars; omitted means the "
                    "synthetic background renderer");
    cmd->add_option("--width", width, "Frame width in pixels");
    cmd->add_option("--height", height, "Frame height in pixels");
    cmd->add_option("--texture-bins", texture_bins,
                    "Bins per side for a default texture (ignored with --texture)");
  }

  dci::Mesh load_mesh_checked() const {
    require_file(mesh_path, "--mesh");
    return dci::load_mesh(mesh_path);
  }

  dci::Texture load_texture_or_default(const dci::Mesh& mesh) const {
    if (texture_path.empty()) {
      return dci::Texture(mesh.faces.size(), texture_bins);
    }
    require_file(texture_path, "--texture");
    return dci::load_texture(texture_path);
  }

  std::vector<dci::WeatherPreset> load_weathers() const {
    if (weathers_path.empty()) return dci::builtin_weather_presets();
    require_file(weathers_path, "--weathers");
    return dci::load_weather_presets(weathers_path);
  }

  std::unique_ptr<dci::BackgroundProvider> make_provider(
      const std::vector<dci::WeatherPreset>& presets) const {
    if (background_dir.empty()) {
      return std::make_unique<dci::SyntheticBackgroundProvider>(presets);
    }
    if (!std::filesystem::is_directory(background_dir)) {
      throw ConfigError("--background-dir: not a directory: " + background_dir);
    }
    return std::make_unique<dci::DirectoryBackgroundProvider>(background_dir);
  }

  nlohmann::json echo() const {
    return {{"mesh", mesh_path},       {"texture", texture_path},
            {"weathers", weathers_path}, {"background_dir", background_dir},
            {"width", width},          {"height", height},
            {"texture_bins", texture_bins}};
  }
};

// Where scene instances come from: a saved manifest, or parameters to
// build a discrete/continuous one.
struct ManifestOptions {
  std::string manifest_path;
  std::string part = "continuous";
  int azimuths = 8;
  int distances = 3;
  int locations = 5;
  int pitches = 1;
  double distance_min = 6.0;
  double distance_max = 18.0;
  double pitch_min = 0.15;
  double pitch_max = 0.60;
  std::uint64_t cap = 0;
  std::string lighting;  // comma list of preset names, or "all"
  std::string scripts_path;
  double step_meters = 5.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--manifest", manifest_path,
                    "Load this manifest instead of building one");
    cmd->add_option("--part", part, "Manifest family: continuous or discrete")
        ->check(CLI::IsMember({"continuous", "discrete"}));
    cmd->add_option("--azimuths", azimuths, "Discrete: number of camera azimuths");
    cmd->add_option("--distances", distances, "Discrete: number of camera distances");
    cmd->add_option("--locations", locations, "Discrete: number of vehicle locations");
    cmd->add_option("--pitches", pitches, "Discrete: number of camera pitches");
    cmd->add_option("--distance-min", distance_min, "Discrete: nearest camera distance (m)");
    cmd->add_option("--distance-max", distance_max, "Discrete: farthest camera distance (m)");
    cmd->add_option("--cap", cap, "Discrete: seeded cap on entry count (0 = no cap)");
    cmd->add_option("--lighting", lighting,
                    "Preset names (comma separated) or 'all'; discrete defaults to the first "
                    "preset, continuous to all");
    cmd->add_option("--scripts", scripts_path,
                    "Continuous: scene script JSON; omitted means the bundled scenes");
    cmd->add_option("--step-meters", step_meters, "Continuous: trajectory sample spacing");
  }

  std::vector<dci::WeatherPreset> pick_lighting(
      const std::vector<dci::WeatherPreset>& presets, bool default_all) const {
    if (presets.empty()) throw ConfigError("--weathers: preset list is empty");
    if (lighting.empty()) {
      if (default_all) return presets;
      return {presets.front()};
    }
    if (lighting == "all") return presets;
    std::vector<dci::WeatherPreset> chosen;
    std::stringstream ss(lighting);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (!name.empty()) chosen.push_back(dci::find_weather_preset(presets, name));
    }
    if (chosen.empty()) throw ConfigError("--lighting: no preset names given");
    return chosen;
  }

  dci::Manifest resolve(std::uint64_t seed,
                        const std::vector<dci::WeatherPreset>& presets) const {
    if (!manifest_path.empty()) {
      require_file(manifest_path, "--manifest");
      return dci::load_manifest(manifest_path);
    }
    if (part == "discrete") {
      dci::DiscreteSpec spec;
      for (int i = 0; i < azimuths; ++i) {
        spec.azimuths.push_back(2.0 * M_PI * i / azimuths);
      }
      spec.distances = linspace(distance_min, distance_max, distances);
      spec.pitches = linspace(pitch_min, pitch_max, pitches);
      // Golden-angle spiral keeps locations spread without an RNG.
      for (int i = 0; i < locations; ++i) {
        const double r = 6.0 * std::sqrt(static_cast<double>(i));
        const double a = 2.39996322972865332 * i;
        spec.locations.push_back({r * std::cos(a), r * std::sin(a), 0.0});
      }
      spec.lighting = pick_lighting(presets, /*default_all=*/false);
      if (cap > 0) spec.cap = cap;
      return dci::build_discrete_manifest(spec, seed);
    }
    const auto scripts = scripts_path.empty()
                             ? dci::bundled_scene_scripts()
                             : dci::load_scene_scripts(scripts_path);
    return dci::build_continuous_manifest(scripts, pick_lighting(presets, /*default_all=*/true),
                                          step_meters, seed);
  }

  nlohmann::json echo() const {
    return {{"manifest", manifest_path}, {"part", part},
            {"azimuths", azimuths},      {"distances", distances},
            {"locations", locations},    {"pitches", pitches},
            {"cap", cap},                {"lighting", lighting},
            {"scripts", scripts_path},   {"step_meters", step_meters}};
  }
};

nlohmann::json curve_json(const dci::ApResult& ap) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : ap.curve) curve.push_back({p.recall, p.precision});
  return curve;
}

// ---------------------------------------------------------------- generate

int run_generate(const SceneOptions& scene, const ManifestOptions& manifest_opt,
                 const std::string& out_dir, std::uint64_t seed, int workers) {
  const auto mesh = scene.load_mesh_checked();
  const auto texture = scene.load_texture_or_default(mesh);
  dci::validate_texture(texture, mesh);
  const auto presets = scene.load_weathers();
  const auto manifest = manifest_opt.resolve(seed, presets);
  const auto provider = scene.make_provider(manifest.presets);

  std::filesystem::create_directories(out_dir);
  dci::save_manifest(std::filesystem::path(out_dir) / "manifest.json", manifest);

  dci::MaterializeConfig config;
  config.width = scene.width;
  config.height = scene.height;
  config.workers = workers;
  const auto result =
      dci::materialize_dataset(mesh, texture, *provider, manifest, out_dir, config);

  write_json(std::filesystem::path(out_dir) / "run_config.json",
             {{"command", "generate"},
              {"seed", seed},
              {"workers", workers},
              {"scene", scene.echo()},
              {"manifest", manifest_opt.echo()},
              {"out", out_dir}});

  std::cout << "materialized " << result.written << "/" << manifest.entries.size()
            << " entries into " << out_dir << "\n";
  if (!result.failures.empty()) {
    std::cerr << result.failures.size() << " entries failed:\n";
    for (const auto& f : result.failures) {
      std::cerr << "  " << f.entry_id << ": " << f.message << "\n";
    }
    return kExitPartial;
  }
  return kExitOk;
}

// ----------------------------------------------------------- train-detector

int run_train_detector(const SceneOptions& scene, const ManifestOptions& manifest_opt,
                       const std::string& out_path, std::uint64_t seed, int iterations,
                       int negatives_per_image) {
  const auto mesh = scene.load_mesh_checked();
  const auto texture = scene.load_texture_or_default(mesh);
  const auto presets = scene.load_weathers();
  const auto manifest = manifest_opt.resolve(seed, presets);
  const auto provider = scene.make_provider(manifest.presets);

  std::vector<dci::TrainSample> positives;
  std::vector<dci::Image> negatives;
  for (const auto& entry : manifest.entries) {
    dci::BackgroundRequest request;
    request.scene_id = entry.scene_id;
    request.weather_tag = entry.weather;
    request.viewpoint_tag = entry.viewpoint_tag;
    request.pose_hint = entry.pose;
    request.env_hint = manifest.env_for(entry.weather);
    request.width = scene.width;
    request.height = scene.height;
    auto built = dci::build_scene_instance(mesh, texture, *provider, request);
    negatives.push_back(built.instance.background);
    if (built.instance.vehicle_visible) {
      positives.push_back({std::move(built.composite), *built.instance.ground_truth_box});
    }
  }

  dci::TrainConfig config;
  if (iterations > 0) config.iterations = iterations;
  if (negatives_per_image > 0) config.negatives_per_image = negatives_per_image;
  auto model = dci::train_toy_detector(positives, negatives, seed, config);
  dci::save_detector(out_path, model);
  std::cout << "trained on " << positives.size() << " positives / " << negatives.size()
            << " negatives; final loss "
            << (model.loss_trace.empty() ? 0.0 : model.loss_trace.back()) << "\n";
  if (model.underfit) {
    std::cerr << "warning: training recall below target; model flagged underfit\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------------ attack

int run_attack(const SceneOptions& scene, const ManifestOptions& manifest_opt,
               const std::string& detector_path, const std::string& texture_out,
               const std::string& record_path, dci::AttackConfig config) {
  const auto mesh = scene.load_mesh_checked();
  const auto texture0 = scene.load_texture_or_default(mesh);
  const auto presets = scene.load_weathers();
  const auto manifest = manifest_opt.resolve(config.seed, presets);
  const auto provider = scene.make_provider(manifest.presets);
  require_file(detector_path, "--detector");
  const auto model = dci::load_detector(detector_path);

  config.width = scene.width;
  config.height = scene.height;
  const std::string record =
      record_path.empty() ? texture_out + ".run.json" : record_path;
  try {
    const auto result = dci::attack_texture(mesh, texture0, manifest, *provider, model, config);
    dci::save_texture(texture_out, result.texture);
    dci::save_attack_record(record, config, result.loss_trace, result.checksum_before,
                            result.checksum_after);
    std::cout << "attack finished: " << result.iterations << " iterations, "
              << result.scenes_matched << "/" << result.scenes_sampled
              << " sampled scenes matched; texture checksum " << result.checksum_after << "\n";
    return kExitOk;
  } catch (const dci::AttackError& e) {
    dci::save_attack_record(record, config, e.trace, texture0.checksum(), 0, e.what());
    std::cerr << "error: " << e.what() << " (partial trace in " << record << ")\n";
    return kExitPipeline;
  }
}

// ---------------------------------------------------------------- evaluate

int run_evaluate(const std::string& dataset_dir, const std::string& detector_path,
                 const std::string& external_dir, const std::string& texture_label,
                 std::string detector_label, double threshold, double timeout,
                 const std::string& out_path, std::uint64_t seed) {
  const auto index_path = std::filesystem::path(dataset_dir) / "index.json";
  const auto index = read_json(index_path, "--dataset");
  if (!index.contains("entries")) {
    throw ConfigError("--dataset: " + index_path.string() + " has no 'entries'");
  }
  const bool external = !external_dir.empty();
  if (external == !detector_path.empty()) {
    throw ConfigError("exactly one of --detector and --external-dir is required");
  }
  if (detector_label.empty()) detector_label = external ? "external" : "toy";

  dci::ToyDetectorModel model;
  std::unique_ptr<dci::ExternalDetector> adapter;
  if (external) {
    adapter = std::make_unique<dci::ExternalDetector>(
        dci::ExternalDetectorConfig{external_dir, timeout});
  } else {
    require_file(detector_path, "--detector");
    model = dci::load_detector(detector_path);
  }

  std::vector<dci::ImageDetection> detections;
  std::vector<dci::GroundTruth> gts;
  std::map<std::string, std::string> scene_of;  // entry -> scene
  for (const auto& e : index["entries"]) {
    const std::string entry_id = e["entry_id"].get<std::string>();
    const auto image_path = std::filesystem::path(dataset_dir) / e["image"].get<std::string>();
    const auto label = read_json(std::filesystem::path(dataset_dir) /
                                     e["label"].get<std::string>(),
                                 "--dataset label");
    dci::GroundTruth gt;
    gt.image_id = entry_id;
    gt.visible = label["vehicle_visible"].get<bool>();
    if (!label["box"].is_null()) {
      const auto& b = label["box"];
      gt.box = dci::Box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                        b[3].get<double>()};
    }
    gts.push_back(gt);
    scene_of[entry_id] = label["scene_id"].get<std::string>();

    const auto image = dci::read_png(image_path);
    const auto found = external ? adapter->detect(image, entry_id)
                                : dci::detect(model, image, threshold);
    for (const auto& d : found) detections.push_back({d, entry_id});
  }

  dci::EvalCell cell;
  cell.texture = texture_label;
  cell.detector = detector_label;
  cell.ap = dci::compute_ap(detections, gts);
  std::set<std::string> scenes;
  for (const auto& [entry, sc] : scene_of) scenes.insert(sc);
  for (const auto& sc : scenes) {
    std::vector<dci::ImageDetection> scene_dets;
    std::vector<dci::GroundTruth> scene_gts;
    for (const auto& gt : gts) {
      if (scene_of[gt.image_id] == sc) scene_gts.push_back(gt);
    }
    for (const auto& d : detections) {
      if (scene_of[d.image_id] == sc) scene_dets.push_back(d);
    }
    cell.per_scene_ap[sc] = dci::compute_ap(scene_dets, scene_gts).ap_percent;
  }

  write_json(out_path, {{"texture", cell.texture},
                        {"detector", cell.detector},
                        {"ap_percent", cell.ap.ap_percent},
                        {"curve", curve_json(cell.ap)},
                        {"per_scene", cell.per_scene_ap},
                        {"detections_total", detections.size()},
                        {"config",
                         {{"dataset", dataset_dir},
                          {"detector", detector_path},
                          {"external_dir", external_dir},
                          {"threshold", threshold},
                          {"seed", seed}}}});
  std::cout << "AP[" << cell.texture << ", " << cell.detector
            << "] = " << cell.ap.ap_percent << " over " << gts.size() << " frames\n";
  return kExitOk;
}

// ------------------------------------------------------------------ report

int run_report(const std::vector<std::string>& eval_paths, const std::string& baseline_label,
               const std::vector<std::string>& formats, const std::string& out_dir) {
  if (eval_paths.empty()) throw ConfigError("--eval: at least one evaluation file is required");
  dci::EvalReport report;
  for (const auto& path : eval_paths) {
    const auto j = read_json(path, "--eval");
    dci::EvalCell cell;
    cell.texture = j["texture"].get<std::string>();
    cell.detector = j["detector"].get<std::string>();
    cell.ap.ap_percent = j["ap_percent"].get<double>();
    for (const auto& p : j["curve"]) {
      cell.ap.curve.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (j.contains("per_scene")) {
      for (const auto& [sc, ap] : j["per_scene"].items()) {
        cell.per_scene_ap[sc] = ap.get<double>();
      }
    }
    report.cells.push_back(std::move(cell));
  }

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& name : formats) {
    const auto format = dci::report_format_from_string(name);
    auto files = dci::emit_report(report, format, out_dir);
    written.insert(written.end(), files.begin(), files.end());

    if (!baseline_label.empty() && format != dci::ReportFormat::kSvgPrCurve) {
      dci::EvalReport baseline, attacked;
      for (const auto& cell : report.cells) {
        (cell.texture == baseline_label ? baseline : attacked).cells.push_back(cell);
      }
      if (baseline.cells.empty()) {
        throw ConfigError("--baseline: no evaluation carries texture label '" +
                          baseline_label + "'");
      }
      if (!attacked.cells.empty()) {
        const auto table = dci::ap_decline(baseline, attacked);
        const auto path = std::filesystem::path(out_dir) /
                          (format == dci::ReportFormat::kCsv ? "decline.csv" : "decline.md");
        std::ofstream out(path);
        out << dci::format_decline_table(table, format);
        written.push_back(path);
      }
    }
  }

  write_json(std::filesystem::path(out_dir) / "report_config.json",
             {{"command", "report"},
              {"evals", eval_paths},
              {"baseline", baseline_label},
              {"formats", formats}});
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale scene generation, adversarial texture attack, and "
               "vehicle-detection evaluation"};
  app.require_subcommand(1);

  SceneOptions scene;
  ManifestOptions manifest_opt;
  std::uint64_t seed = 0;
  int workers = 1;
  int rc = kExitOk;

  auto* generate = app.add_subcommand("generate", "Materialize a scene dataset");
  {
    add_config_flag(generate);
    scene.attach(generate);
    manifest_opt.attach(generate);
    static std::string out_dir;
    generate->add_option("--out", out_dir, "Output dataset directory")->required();
    generate->add_option("--seed", seed, "Top-level RNG seed");
    generate->add_option("--workers", workers, "Worker threads (0 = hardware)");
    generate->callback([&] {
      apply_config_files(generate);
      rc = run_generate(scene, manifest_opt, out_dir, seed, workers);
    });
  }

  auto* train = app.add_subcommand("train-detector", "Fit the bundled toy detector");
  {
    add_config_flag(train);
    scene.attach(train);
    manifest_opt.attach(train);
    static std::string out_path = "detector.json";
    static int iterations = 0;
    static int negatives_per_image = 0;
    train->add_option("--out", out_path, "Model JSON output path");
    train->add_option("--seed", seed, "Top-level RNG seed");
    train->add_option("--iterations", iterations, "Gradient steps (0 = default)");
    train->add_option("--negatives-per-image", negatives_per_image,
                      "Sampled negative anchors per background (0 = default)");
    train->callback([&] {
      apply_config_files(train);
      rc = run_train_detector(scene, manifest_opt, out_path, seed, iterations,
                              negatives_per_image);
    });
  }

  auto* attack = app.add_subcommand("attack", "Optimize an adversarial texture");
  {
    add_config_flag(attack);
    scene.attach(attack);
    manifest_opt.attach(attack);
    static std::string detector_path, texture_out = "adversarial.tex", record_path;
    static dci::AttackConfig config;
    static int max_iterations = -1;
    attack->add_option("--detector", detector_path, "Toy detector model JSON")->required();
    attack->add_option("--texture-out", texture_out, "Adversarial texture output path");
    attack->add_option("--record", record_path,
                       "Run record path (default <texture-out>.run.json)");
    attack->add_option("--step", config.step, "Gradient step size");
    attack->add_option("--epochs", config.epochs, "Passes over the manifest");
    attack->add_option("--batch", config.batch, "Scenes per gradient step");
    attack->add_option("--iterations", max_iterations,
                       "Cap on gradient steps (-1 = no cap, 0 = no-op run)");
    attack->add_option("--seed", config.seed, "Scene sampler seed");
    attack->callback([&] {
      apply_config_files(attack);
      if (max_iterations >= 0) config.max_iterations = max_iterations;
      rc = run_attack(scene, manifest_opt, detector_path, texture_out, record_path, config);
    });
  }

  auto* evaluate = app.add_subcommand("evaluate", "Score a materialized dataset");
  {
    add_config_flag(evaluate);
    static std::string dataset_dir, detector_path, external_dir, texture_label = "texture",
                       detector_label, out_path = "eval.json";
    static double threshold = 0.5, timeout = 30.0;
    evaluate->add_option("--dataset", dataset_dir, "Materialized dataset directory")
        ->required();
    evaluate->add_option("--detector", detector_path, "Toy detector model JSON");
    evaluate->add_option("--external-dir", external_dir,
                         "External-detector exchange directory (offline detections honored)");
    evaluate->add_option("--texture-label", texture_label, "Texture label for the report");
    evaluate->add_option("--detector-label", detector_label,
                         "Detector label (default toy/external)");
    evaluate->add_option("--threshold", threshold, "Toy detector score threshold");
    evaluate->add_option("--timeout", timeout, "External detector timeout in seconds");
    evaluate->add_option("--out", out_path, "Evaluation JSON output path");
    evaluate->add_option("--seed", seed, "Seed echoed into the output");
    evaluate->callback([&] {
      apply_config_files(evaluate);
      rc = run_evaluate(dataset_dir, detector_path, external_dir, texture_label,
                        detector_label, threshold, timeout, out_path, seed);
    });
  }

  auto* report = app.add_subcommand("report", "Render tables and PR curves");
  {
    add_config_flag(report);
    static std::vector<std::string> eval_paths;
    static std::string baseline_label, out_dir = "report";
    static std::vector<std::string> formats = {"csv"};
    report->add_option("--eval", eval_paths, "Evaluation JSON files (repeatable)");
    report->add_option("--baseline", baseline_label,
                       "Texture label of the baseline; enables the decline table");
    report->add_option("--formats", formats,
                       "Output formats: csv, markdown, svg-pr-curve (repeatable)");
    report->add_option("--out", out_dir, "Report output directory");
    report->callback([&] {
      apply_config_files(report);
      rc = run_report(eval_paths, baseline_label, formats, out_dir);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return rc;
}
