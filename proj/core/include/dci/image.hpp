#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dci/vec.hpp"

namespace dci {

/// Axis-aligned pixel rectangle, [x0, x1) x [y0, y1).
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool valid() const { return width() > 0.0 && height() > 0.0; }
  bool operator==(const Box& o) const {
    return x0 == o.x0 && y0 == o.y0 && x1 == o.x1 && y1 == o.y1;
  }
};

/// Intersection over union of two boxes, in [0, 1]. Throws if either box
/// has zero (or negative) area.
double iou(const Box& a, const Box& b);

/// H x W RGB raster, channels in [0, 1], row-major, y down. The pipeline
/// stays floating point end to end; quantization happens only in the PNG
/// codec.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {0.0, 0.0, 0.0})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Rgb& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const Rgb& at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::vector<Rgb>& data() { return data_; }
  const std::vector<Rgb>& data() const { return data_; }

  bool same_size(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> data_;
};

/// H x W binary coverage raster, values in {0, 1}.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t& at(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint8_t at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::vector<std::uint8_t>& data() { return data_; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  std::size_t coverage() const;

  /// Tight bounding box of the nonzero region; nullopt for an all-zero mask.
  std::optional<Box> tight_bounding_box() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// 8-bit RGB PNG I/O. Round-half-up quantization on write; /255 on read.
/// Gray and paletted inputs are expanded to RGB, alpha is stripped.
void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

}  // namespace dci
