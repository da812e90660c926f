#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hpsep/errors.hpp"

namespace hpsep {

/// Inclusive pixel-coordinate rectangle.
struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = -1;  // default-constructed box is empty
  int y_max = -1;

  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  bool empty() const { return x_max < x_min || y_max < y_min; }
  bool contains(int x, int y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  void expand(int x, int y) {
    if (empty()) {
      x_min = x_max = x;
      y_min = y_max = y;
      return;
    }
    if (x < x_min) x_min = x;
    if (x > x_max) x_max = x;
    if (y < y_min) y_min = y;
    if (y > y_max) y_max = y;
  }
  bool operator==(const BoundingBox&) const = default;
};

/// Row-major bit raster; 1 = ink (black), 0 = background. Rows are packed
/// into 64-bit words, LSB = lowest x. Bits past `width` are kept zero so
/// popcount-based counting stays exact.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, int dpi = 300);

  int width() const { return width_; }
  int height() const { return height_; }
  int dpi() const { return dpi_; }
  void set_dpi(int dpi);
  bool empty() const { return width_ == 0 || height_ == 0; }

  bool get(int x, int y) const {
    return (rows_[static_cast<std::size_t>(y) * wpr_ + (x >> 6)] >> (x & 63)) & 1u;
  }
  void set(int x, int y, bool ink) {
    std::uint64_t& w = rows_[static_cast<std::size_t>(y) * wpr_ + (x >> 6)];
    const std::uint64_t m = std::uint64_t{1} << (x & 63);
    w = ink ? (w | m) : (w & ~m);
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  int words_per_row() const { return wpr_; }
  const std::uint64_t* row(int y) const {
    return rows_.data() + static_cast<std::size_t>(y) * wpr_;
  }
  std::uint64_t* row(int y) {
    return rows_.data() + static_cast<std::size_t>(y) * wpr_;
  }

  int row_ink_count(int y) const {
    const std::uint64_t* r = row(y);
    int n = 0;
    for (int w = 0; w < wpr_; ++w) n += std::popcount(r[w]);
    return n;
  }
  std::uint64_t ink_count() const;

  bool operator==(const BinaryImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int dpi_ = 300;
  int wpr_ = 0;
  std::vector<std::uint64_t> rows_;
};

/// Byte raster of per-pixel class labels (0 background, 1 handwritten,
/// 2 printed, 3 noise). Shares dimensions with the image it describes.
class LabelRaster {
 public:
  LabelRaster() = default;
  LabelRaster(int width, int height, std::uint8_t fill = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::uint8_t get(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  void set(int x, int y, std::uint8_t v) {
    data_[static_cast<std::size_t>(y) * width_ + x] = v;
  }
  const std::vector<std::uint8_t>& data() const { return data_; }

  bool operator==(const LabelRaster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// 8-bit RGB image, used for overlay outputs.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t r = 255, std::uint8_t g = 255, std::uint8_t b = 255);
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }
};

enum class Connectivity { Four = 4, Eight = 8 };

/// One maximal set of mutually connected ink pixels.
struct ConnectedComponent {
  BoundingBox bbox;
  std::int64_t pixel_count = 0;
  double centroid_x = 0.0;  // center of gravity, mean of pixel coordinates
  double centroid_y = 0.0;
  BinaryImage pixel_mask;  // bbox-local ink mask
};

/// Extracts connected components of the ink pixels. Components are returned
/// in deterministic order: ascending bbox y_min, then x_min.
std::vector<ConnectedComponent> connected_components(
    const BinaryImage& img, Connectivity connectivity = Connectivity::Eight);

/// Rotates about the image center with inverse-mapping nearest-neighbor
/// sampling; out-of-frame sources read as background. |angle_deg| <= 90.
BinaryImage rotate(const BinaryImage& img, double angle_deg);
LabelRaster rotate(const LabelRaster& raster, double angle_deg);

enum class Axis { Horizontal, Vertical };

/// Per-row (Horizontal) or per-column (Vertical) ink counts.
std::vector<int> projection_profile(const BinaryImage& img, Axis axis);

// --- netpbm I/O ------------------------------------------------------------

BinaryImage read_pbm(const std::filesystem::path& path);
void write_pbm(const BinaryImage& img, const std::filesystem::path& path);

LabelRaster read_pgm(const std::filesystem::path& path);
void write_pgm(const LabelRaster& raster, const std::filesystem::path& path,
               int maxval = 3);

void write_ppm(const RgbImage& img, const std::filesystem::path& path);

/// Writes via a temp file in the same directory, then renames into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace hpsep
