#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "dci/background.hpp"
#include "dci/manifest.hpp"
#include "dci/mesh.hpp"
#include "dci/texture.hpp"

namespace dci {

struct MaterializeConfig {
  int width = 256;
  int height = 256;
  int workers = 1;  // <= 0 means hardware concurrency
};

struct MaterializeFailure {
  std::string entry_id;
  std::string message;
};

struct MaterializeResult {
  std::size_t written = 0;
  std::vector<MaterializeFailure> failures;  // manifest order
  std::filesystem::path index_path;
};

/// Renders every manifest entry into `out_dir/images/<entry_id>.png` plus a
/// `labels/<entry_id>.json` label, then writes `index.json` listing the run
/// parameters and every produced file. A failing entry is recorded and
/// skipped; the remaining entries still materialize. Output bytes depend
/// only on the inputs, not on worker count or scheduling.
MaterializeResult materialize_dataset(const Mesh& mesh, const Texture& texture,
                                      const BackgroundProvider& provider,
                                      const Manifest& manifest,
                                      const std::filesystem::path& out_dir,
                                      const MaterializeConfig& config = {});

}  // namespace dci
