#include "dci/texture.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dci/error.hpp"
#include "dci/rng.hpp"

namespace dci {

static_assert(std::endian::native == std::endian::little,
              "texture files assume a little-endian host");

Texture::Texture(std::size_t face_count, int bins_per_side, Rgb fill)
    : face_count_(face_count), bins_per_side_(bins_per_side),
      data_(face_count * bins_per_side * bins_per_side, fill) {
  if (bins_per_side < 1) throw Error("texture bins_per_side must be >= 1");
}

std::uint64_t Texture::checksum() const {
  return fnv1a64(data_.data(), data_.size() * sizeof(Rgb));
}

std::pair<int, int> texture_bin_for_barycentric(double b1, double b2, int bins_per_side) {
  int i = std::clamp(static_cast<int>(b1 * bins_per_side), 0, bins_per_side - 1);
  int j = std::clamp(static_cast<int>(b2 * bins_per_side), 0, bins_per_side - 1);
  return {i, j};
}

void validate_texture(const Texture& texture, const Mesh& mesh) {
  if (texture.face_count() != mesh.face_count()) {
    throw Error("texture/mesh face count mismatch: texture has " +
                std::to_string(texture.face_count()) + " faces, mesh has " +
                std::to_string(mesh.face_count()));
  }
  const int t = texture.bins_per_side();
  for (std::size_t f = 0; f < texture.face_count(); ++f) {
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j < t; ++j) {
        const Rgb& v = texture.bin(f, i, j);
        for (double c : {v.r, v.g, v.b}) {
          if (!(c >= 0.0 && c <= 1.0)) {
            throw Error("texture value " + std::to_string(c) + " out of [0,1] at face " +
                        std::to_string(f) + ", bin (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
          }
        }
      }
    }
  }
}

void save_texture(const std::filesystem::path& path, const Texture& texture) {
  nlohmann::json header = {
      {"face_count", texture.face_count()},
      {"bins_per_side", texture.bins_per_side()},
      {"dtype", "f64"},
      {"checksum", texture.checksum()},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_texture: cannot open " + path.string());
  out << header.dump() << '\n';
  out.write(reinterpret_cast<const char*>(texture.data().data()),
            static_cast<std::streamsize>(texture.data().size() * sizeof(Rgb)));
  if (!out) throw IoError("save_texture: write failed for " + path.string());
}

Texture load_texture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_texture: cannot open " + path.string());
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw ParseError("load_texture: missing header line in " + path.string());
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_texture: bad header in " + path.string() + ": " + e.what());
  }
  for (const char* key : {"face_count", "bins_per_side", "dtype", "checksum"}) {
    if (!header.contains(key)) {
      throw ParseError("load_texture: header missing key '" + std::string(key) + "'");
    }
  }
  if (header["dtype"] != "f64") {
    throw ParseError("load_texture: unsupported dtype " + header["dtype"].dump());
  }
  Texture texture(header["face_count"].get<std::size_t>(),
                  header["bins_per_side"].get<int>());
  in.read(reinterpret_cast<char*>(texture.data().data()),
          static_cast<std::streamsize>(texture.data().size() * sizeof(Rgb)));
  if (in.gcount() != static_cast<std::streamsize>(texture.data().size() * sizeof(Rgb))) {
    throw ParseError("load_texture: truncated payload in " + path.string());
  }
  const std::uint64_t expect = header["checksum"].get<std::uint64_t>();
  if (texture.checksum() != expect) {
    std::ostringstream msg;
    msg << "load_texture: checksum mismatch in " << path.string() << " (header " << expect
        << ", payload " << texture.checksum() << ")";
    throw ParseError(msg.str());
  }
  return texture;
}

}  // namespace dci
