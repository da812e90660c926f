#include "hpsep/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hpsep {

BinaryImage::BinaryImage(int width, int height, int dpi)
    : width_(width), height_(height), dpi_(dpi) {
  if (width <= 0 || height <= 0) throw ParamError("image dimensions must be positive");
  if (dpi <= 0) throw ParamError("dpi must be positive");
  wpr_ = (width + 63) / 64;
  rows_.assign(static_cast<std::size_t>(wpr_) * height, 0);
}

void BinaryImage::set_dpi(int dpi) {
  if (dpi <= 0) throw ParamError("dpi must be positive");
  dpi_ = dpi;
}

std::uint64_t BinaryImage::ink_count() const {
  std::uint64_t n = 0;
  for (std::uint64_t w : rows_) n += std::popcount(w);
  return n;
}

LabelRaster::LabelRaster(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw ParamError("raster dimensions must be positive");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

RgbImage::RgbImage(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width(w), height(h) {
  rgb.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }
}

std::vector<ConnectedComponent> connected_components(const BinaryImage& img,
                                                     Connectivity connectivity) {
  std::vector<ConnectedComponent> comps;
  if (img.empty()) return comps;
  const int w = img.width(), h = img.height();
  std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
  auto lab = [&](int x, int y) -> std::int32_t& {
    return label[static_cast<std::size_t>(y) * w + x];
  };

  static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int ndirs = connectivity == Connectivity::Eight ? 8 : 4;

  struct Acc {
    BoundingBox bbox;
    std::int64_t count = 0;
    double sum_x = 0, sum_y = 0;
  };
  std::vector<Acc> accs;
  std::vector<std::pair<int, int>> stack;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.get(x, y) || lab(x, y) >= 0) continue;
      const std::int32_t id = static_cast<std::int32_t>(accs.size());
      accs.emplace_back();
      Acc& a = accs.back();
      stack.clear();
      stack.emplace_back(x, y);
      lab(x, y) = id;
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        a.bbox.expand(px, py);
        a.count += 1;
        a.sum_x += px;
        a.sum_y += py;
        for (int d = 0; d < ndirs; ++d) {
          const int nx = px + dx8[d], ny = py + dy8[d];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          if (!img.get(nx, ny) || lab(nx, ny) >= 0) continue;
          lab(nx, ny) = id;
          stack.emplace_back(nx, ny);
        }
      }
    }
  }

  comps.resize(accs.size());
  for (std::size_t i = 0; i < accs.size(); ++i) {
    const Acc& a = accs[i];
    ConnectedComponent& c = comps[i];
    c.bbox = a.bbox;
    c.pixel_count = a.count;
    c.centroid_x = a.sum_x / static_cast<double>(a.count);
    c.centroid_y = a.sum_y / static_cast<double>(a.count);
    c.pixel_mask = BinaryImage(a.bbox.width(), a.bbox.height(), img.dpi());
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t id = lab(x, y);
      if (id < 0) continue;
      ConnectedComponent& c = comps[id];
      c.pixel_mask.set(x - c.bbox.x_min, y - c.bbox.y_min, true);
    }
  }

  std::stable_sort(comps.begin(), comps.end(),
                   [](const ConnectedComponent& a, const ConnectedComponent& b) {
                     if (a.bbox.y_min != b.bbox.y_min) return a.bbox.y_min < b.bbox.y_min;
                     return a.bbox.x_min < b.bbox.x_min;
                   });
  return comps;
}

namespace {

// Inverse-mapping nearest-neighbor rotation shared by image and label rasters.
template <typename ReadPx, typename WritePx>
void rotate_into(double angle_deg, int w, int h, ReadPx read, WritePx write) {
  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  for (int y = 0; y < h; ++y) {
    const double dy = y - cy;
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx;
      // inverse of the forward map x' = cx + c*dx - s*dy, y' = cy + s*dx + c*dy
      const long sx = std::lround(cx + c * dx + s * dy);
      const long sy = std::lround(cy - s * dx + c * dy);
      if (sx < 0 || sx >= w || sy < 0 || sy >= h) continue;
      write(x, y, read(static_cast<int>(sx), static_cast<int>(sy)));
    }
  }
}

void check_rotation_angle(double angle_deg) {
  if (!(std::abs(angle_deg) <= 90.0))
    throw ParamError("rotation angle out of range (|angle| <= 90)");
}

}  // namespace

BinaryImage rotate(const BinaryImage& img, double angle_deg) {
  check_rotation_angle(angle_deg);
  if (angle_deg == 0.0) return img;
  BinaryImage out(img.width(), img.height(), img.dpi());
  rotate_into(
      angle_deg, img.width(), img.height(),
      [&](int x, int y) { return img.get(x, y); },
      [&](int x, int y, bool v) {
        if (v) out.set(x, y, true);
      });
  return out;
}

LabelRaster rotate(const LabelRaster& raster, double angle_deg) {
  check_rotation_angle(angle_deg);
  if (angle_deg == 0.0) return raster;
  LabelRaster out(raster.width(), raster.height(), 0);
  rotate_into(
      angle_deg, raster.width(), raster.height(),
      [&](int x, int y) { return raster.get(x, y); },
      [&](int x, int y, std::uint8_t v) {
        if (v) out.set(x, y, v);
      });
  return out;
}

std::vector<int> projection_profile(const BinaryImage& img, Axis axis) {
  if (axis == Axis::Horizontal) {
    std::vector<int> prof(img.height(), 0);
    for (int y = 0; y < img.height(); ++y) prof[y] = img.row_ink_count(y);
    return prof;
  }
  std::vector<int> prof(img.width(), 0);
  for (int y = 0; y < img.height(); ++y) {
    const std::uint64_t* r = img.row(y);
    for (int w = 0; w < img.words_per_row(); ++w) {
      std::uint64_t bits = r[w];
      while (bits) {
        prof[w * 64 + std::countr_zero(bits)] += 1;
        bits &= bits - 1;
      }
    }
  }
  return prof;
}

// --- netpbm I/O --------------------------------------------------------------

namespace {

class ByteReader {
 public:
  ByteReader(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path_.string() + " for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    bytes_ = std::move(ss).str();
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(path_.string() + ": " + what + " at byte " + std::to_string(pos_));
  }

  int peek() const { return pos_ < bytes_.size() ? static_cast<unsigned char>(bytes_[pos_]) : -1; }
  int take() {
    const int c = peek();
    if (c >= 0) ++pos_;
    return c;
  }

  // Skips whitespace and '#' comments between header tokens.
  void skip_separators() {
    for (;;) {
      int c = peek();
      if (c == '#') {
        while (c >= 0 && c != '\n') c = take();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else {
        return;
      }
    }
  }

  long read_number(const char* what) {
    skip_separators();
    if (peek() < '0' || peek() > '9') fail(std::string("expected ") + what);
    long v = 0;
    while (peek() >= '0' && peek() <= '9') {
      v = v * 10 + (take() - '0');
      if (v > 1'000'000'000L) fail(std::string(what) + " out of range");
    }
    return v;
  }

  void expect_magic(const char* magic) {
    if (bytes_.size() < 2 || bytes_[0] != magic[0] || bytes_[1] != magic[1])
      fail(std::string("expected magic ") + magic);
    pos_ = 2;
  }

  // Consumes exactly one whitespace byte (the separator before pixel data).
  void expect_data_separator() {
    const int c = take();
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') fail("expected whitespace before pixel data");
  }

  const std::string& bytes() const { return bytes_; }
  std::size_t pos() const { return pos_; }

  // Looks for a "# dpi N" comment between magic and dimensions.
  int scan_dpi_comment() {
    int dpi = 0;
    std::size_t save = pos_;
    for (;;) {
      int c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else if (c == '#') {
        std::size_t line_start = pos_;
        std::string line;
        while (peek() >= 0 && peek() != '\n') line.push_back(static_cast<char>(take()));
        int v = 0;
        if (std::sscanf(line.c_str(), "# dpi %d", &v) == 1 && v > 0) dpi = v;
        (void)line_start;
      } else {
        break;
      }
    }
    pos_ = save;
    return dpi;
  }

 private:
  std::filesystem::path path_;
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

BinaryImage read_pbm(const std::filesystem::path& path) {
  ByteReader r(path);
  r.expect_magic("P4");
  const int dpi = r.scan_dpi_comment();
  const long w = r.read_number("width");
  const long h = r.read_number("height");
  if (w <= 0 || h <= 0) r.fail("non-positive dimensions");
  r.expect_data_separator();
  BinaryImage img(static_cast<int>(w), static_cast<int>(h), dpi > 0 ? dpi : 300);
  const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
  if (r.bytes().size() - r.pos() < row_bytes * static_cast<std::size_t>(h))
    r.fail("truncated pixel data");
  const char* data = r.bytes().data() + r.pos();
  for (long y = 0; y < h; ++y) {
    for (std::size_t b = 0; b < row_bytes; ++b) {
      const unsigned char byte = static_cast<unsigned char>(data[y * row_bytes + b]);
      if (!byte) continue;
      for (int bit = 0; bit < 8; ++bit) {
        const long x = static_cast<long>(b) * 8 + bit;
        if (x < w && (byte >> (7 - bit)) & 1) img.set(static_cast<int>(x), static_cast<int>(y), true);
      }
    }
  }
  return img;
}

void write_pbm(const BinaryImage& img, const std::filesystem::path& path) {
  if (img.empty()) throw ParamError("cannot write empty image");
  std::string out = "P4\n# dpi " + std::to_string(img.dpi()) + "\n" +
                    std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n";
  const std::size_t row_bytes = (static_cast<std::size_t>(img.width()) + 7) / 8;
  std::string data(row_bytes * img.height(), '\0');
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.get(x, y))
        data[y * row_bytes + x / 8] |= static_cast<char>(0x80u >> (x % 8));
    }
  }
  out += data;
  write_file_atomic(path, out);
}

LabelRaster read_pgm(const std::filesystem::path& path) {
  ByteReader r(path);
  r.expect_magic("P5");
  const long w = r.read_number("width");
  const long h = r.read_number("height");
  const long maxval = r.read_number("maxval");
  if (w <= 0 || h <= 0) r.fail("non-positive dimensions");
  if (maxval <= 0 || maxval > 255) r.fail("unsupported maxval");
  r.expect_data_separator();
  if (r.bytes().size() - r.pos() < static_cast<std::size_t>(w) * h)
    r.fail("truncated pixel data");
  LabelRaster raster(static_cast<int>(w), static_cast<int>(h));
  const char* data = r.bytes().data() + r.pos();
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x) {
      const unsigned char v = static_cast<unsigned char>(data[y * w + x]);
      if (v > maxval) r.fail("pixel value exceeds maxval");
      raster.set(static_cast<int>(x), static_cast<int>(y), v);
    }
  return raster;
}

void write_pgm(const LabelRaster& raster, const std::filesystem::path& path, int maxval) {
  if (raster.empty()) throw ParamError("cannot write empty raster");
  if (maxval <= 0 || maxval > 255) throw ParamError("maxval out of range");
  std::string out = "P5\n" + std::to_string(raster.width()) + " " +
                    std::to_string(raster.height()) + "\n" + std::to_string(maxval) + "\n";
  out.reserve(out.size() + raster.data().size());
  for (std::uint8_t v : raster.data()) {
    if (v > maxval) throw ParamError("raster value exceeds maxval");
    out.push_back(static_cast<char>(v));
  }
  write_file_atomic(path, out);
}

void write_ppm(const RgbImage& img, const std::filesystem::path& path) {
  if (img.width <= 0 || img.height <= 0) throw ParamError("cannot write empty image");
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
  write_file_atomic(path, out);
}

}  // namespace hpsep
