#include "dci/materialize.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "dci/compositor.hpp"
#include "dci/error.hpp"
#include "dci/json_io.hpp"

namespace dci {
namespace {

nlohmann::json label_json(const ManifestEntry& entry, const SceneInstance& instance) {
  nlohmann::json j = {
      {"entry_id", entry.entry_id},
      {"scene_id", entry.scene_id},
      {"weather", entry.weather},
      {"viewpoint", entry.viewpoint_tag},
      {"vehicle_visible", instance.vehicle_visible},
      {"pose", to_json(instance.pose)},
      {"env", to_json(instance.env)},
  };
  if (instance.ground_truth_box) {
    j["box"] = to_json(*instance.ground_truth_box);
  } else {
    j["box"] = nullptr;
  }
  if (!entry.script.empty()) j["script"] = entry.script;
  if (entry.sample_index >= 0) j["sample_index"] = entry.sample_index;
  return j;
}

}  // namespace

MaterializeResult materialize_dataset(const Mesh& mesh, const Texture& texture,
                                      const BackgroundProvider& provider,
                                      const Manifest& manifest,
                                      const std::filesystem::path& out_dir,
                                      const MaterializeConfig& config) {
  if (config.width <= 0 || config.height <= 0) {
    throw Error("materialize_dataset: non-positive frame dimensions");
  }
  const auto images_dir = out_dir / "images";
  const auto labels_dir = out_dir / "labels";
  std::filesystem::create_directories(images_dir);
  std::filesystem::create_directories(labels_dir);

  struct Slot {
    bool ok = false;
    bool visible = false;
    std::string message;
  };
  std::vector<Slot> slots(manifest.entries.size());

  auto process = [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    Slot& slot = slots[i];
    try {
      BackgroundRequest request;
      request.scene_id = entry.scene_id;
      request.weather_tag = entry.weather;
      request.viewpoint_tag = entry.viewpoint_tag;
      request.pose_hint = entry.pose;
      request.env_hint = manifest.env_for(entry.weather);
      request.width = config.width;
      request.height = config.height;
      SceneBuildResult built = build_scene_instance(mesh, texture, provider, request);

      write_png(images_dir / (entry.entry_id + ".png"), built.composite);
      std::ofstream label(labels_dir / (entry.entry_id + ".json"));
      if (!label) {
        throw IoError("cannot open label file for entry " + entry.entry_id);
      }
      label << label_json(entry, built.instance).dump(2) << '\n';
      slot.ok = true;
      slot.visible = built.instance.vehicle_visible;
    } catch (const std::exception& e) {
      slot.message = e.what();
    }
  };

  unsigned workers = config.workers > 0 ? static_cast<unsigned>(config.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(manifest.entries.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < manifest.entries.size();
             i = next.fetch_add(1)) {
          process(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  MaterializeResult result;
  nlohmann::json index_entries = nlohmann::json::array();
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& entry = manifest.entries[i];
    if (slots[i].ok) {
      ++result.written;
      index_entries.push_back({{"entry_id", entry.entry_id},
                               {"image", "images/" + entry.entry_id + ".png"},
                               {"label", "labels/" + entry.entry_id + ".json"},
                               {"vehicle_visible", slots[i].visible}});
    } else {
      result.failures.push_back({entry.entry_id, slots[i].message});
    }
  }

  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : result.failures) {
    failures.push_back({{"entry_id", f.entry_id}, {"message", f.message}});
  }
  nlohmann::json index = {
      {"part", manifest.part},
      {"seed", manifest.seed},
      {"width", config.width},
      {"height", config.height},
      {"texture_checksum", texture.checksum()},
      {"entry_count", manifest.entries.size()},
      {"written", result.written},
      {"entries", index_entries},
      {"failures", failures},
  };
  result.index_path = out_dir / "index.json";
  std::ofstream out(result.index_path);
  if (!out) throw IoError("materialize_dataset: cannot open " + result.index_path.string());
  out << index.dump(2) << '\n';
  return result;
}

}  // namespace dci
