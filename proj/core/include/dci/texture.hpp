#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dci/mesh.hpp"
#include "dci/vec.hpp"

namespace dci {

/// Per-face texture grid: every face carries a T x T grid of RGB bins over
/// its barycentric domain. This is the optimization variable of the texture
/// attack; the renderer selects one bin per covered pixel, so the rendered
/// image is linear in these values under fixed geometry.
class Texture {
 public:
  Texture() = default;
  Texture(std::size_t face_count, int bins_per_side, Rgb fill = {0.5, 0.5, 0.5});

  std::size_t face_count() const { return face_count_; }
  int bins_per_side() const { return bins_per_side_; }
  std::size_t bin_count() const { return data_.size(); }

  Rgb& bin(std::size_t face, int i, int j) { return data_[bin_index(face, i, j)]; }
  const Rgb& bin(std::size_t face, int i, int j) const {
    return data_[bin_index(face, i, j)];
  }
  std::size_t bin_index(std::size_t face, int i, int j) const {
    return (face * bins_per_side_ + i) * bins_per_side_ + j;
  }

  std::vector<Rgb>& data() { return data_; }
  const std::vector<Rgb>& data() const { return data_; }

  std::uint64_t checksum() const;

 private:
  std::size_t face_count_ = 0;
  int bins_per_side_ = 0;
  std::vector<Rgb> data_;
};

/// Selects the grid bin for barycentric coordinates (b0, b1, b2): row
/// floor(b1*T), column floor(b2*T), both clamped to [0, T-1]. Bins with
/// b1 + b2 > 1 exist but are never selected, so they keep zero gradient.
std::pair<int, int> texture_bin_for_barycentric(double b1, double b2, int bins_per_side);

/// Confirms the texture matches the mesh face count and every channel lies
/// in [0, 1]. Violations report the offending face/bin location.
void validate_texture(const Texture& texture, const Mesh& mesh);

/// Binary grid file: one JSON header line {face_count, bins_per_side,
/// dtype, checksum} followed by little-endian float64 RGB payload.
void save_texture(const std::filesystem::path& path, const Texture& texture);
Texture load_texture(const std::filesystem::path& path);

}  // namespace dci
