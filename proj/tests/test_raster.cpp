#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "hpsep/errors.hpp"
#include "hpsep/raster.hpp"
#include "hpsep/rng.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using hpsep::BinaryImage;
using hpsep::LabelRaster;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "hpsep-test-raster";
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::pair<int, int>>> lib_component_pixels(
    const std::vector<hpsep::ConnectedComponent>& comps) {
  std::vector<std::vector<std::pair<int, int>>> out;
  for (const hpsep::ConnectedComponent& cc : comps) {
    std::vector<std::pair<int, int>> pixels;
    for (int y = 0; y < cc.pixel_mask.height(); ++y) {
      for (int x = 0; x < cc.pixel_mask.width(); ++x) {
        if (cc.pixel_mask.get(x, y)) pixels.emplace_back(cc.bbox.x_min + x, cc.bbox.y_min + y);
      }
    }
    std::sort(pixels.begin(), pixels.end());
    out.push_back(std::move(pixels));
  }
  return out;
}

}  // namespace

TEST_CASE("bit raster stores and counts ink exactly") {
  BinaryImage img(70, 5);  // width crosses a 64-bit word boundary
  CHECK(img.ink_count() == 0);
  img.set(0, 0, true);
  img.set(63, 1, true);
  img.set(64, 1, true);
  img.set(69, 4, true);
  CHECK(img.get(0, 0));
  CHECK(img.get(63, 1));
  CHECK(img.get(64, 1));
  CHECK(img.get(69, 4));
  CHECK_FALSE(img.get(1, 0));
  CHECK(img.ink_count() == 4);
  CHECK(img.row_ink_count(1) == 2);
  img.set(63, 1, false);
  CHECK(img.ink_count() == 3);

  CHECK_THROWS_AS(BinaryImage(0, 4), hpsep::ParamError);
  CHECK_THROWS_AS(BinaryImage(4, 4, 0), hpsep::ParamError);
}

TEST_CASE("connected components match flood fill on random images") {
  hpsep::Rng rng(0x51a7e5);
  for (int iter = 0; iter < 150; ++iter) {
    const int w = 1 + static_cast<int>(rng.below(40));
    const int h = 1 + static_cast<int>(rng.below(40));
    const double density = rng.range(0.05, 0.6);
    const BinaryImage img = oracle::random_image(rng, w, h, density);
    for (hpsep::Connectivity conn : {hpsep::Connectivity::Eight, hpsep::Connectivity::Four}) {
      const auto comps = hpsep::connected_components(img, conn);
      auto expected = oracle::components(img, conn == hpsep::Connectivity::Eight);
      auto actual = lib_component_pixels(comps);

      // Same partition of the ink, compared as unordered sets of pixel sets.
      auto expected_sorted = expected;
      auto actual_sorted = actual;
      std::sort(expected_sorted.begin(), expected_sorted.end());
      std::sort(actual_sorted.begin(), actual_sorted.end());
      REQUIRE(actual_sorted == expected_sorted);

      // Deterministic output order: ascending (bbox y_min, bbox x_min).
      for (std::size_t i = 1; i < comps.size(); ++i) {
        const auto a = std::make_pair(comps[i - 1].bbox.y_min, comps[i - 1].bbox.x_min);
        const auto b = std::make_pair(comps[i].bbox.y_min, comps[i].bbox.x_min);
        CHECK(a <= b);
      }

      // Per-component derived fields agree with the pixel set.
      for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto& pixels = actual[i];
        REQUIRE(comps[i].pixel_count == static_cast<std::int64_t>(pixels.size()));
        int x_min = pixels[0].first, x_max = pixels[0].first;
        int y_min = pixels[0].second, y_max = pixels[0].second;
        double sx = 0, sy = 0;
        for (const auto& [x, y] : pixels) {
          x_min = std::min(x_min, x);
          x_max = std::max(x_max, x);
          y_min = std::min(y_min, y);
          y_max = std::max(y_max, y);
          sx += x;
          sy += y;
        }
        CHECK(comps[i].bbox == hpsep::BoundingBox{x_min, y_min, x_max, y_max});
        CHECK(comps[i].centroid_x == doctest::Approx(sx / pixels.size()).epsilon(1e-12));
        CHECK(comps[i].centroid_y == doctest::Approx(sy / pixels.size()).epsilon(1e-12));
        CHECK(comps[i].pixel_mask.width() == comps[i].bbox.width());
        CHECK(comps[i].pixel_mask.height() == comps[i].bbox.height());
      }
    }
  }
}

TEST_CASE("diagonal pixels: one component under 8-connectivity, two under 4") {
  BinaryImage img(4, 4);
  img.set(1, 1, true);
  img.set(2, 2, true);
  CHECK(hpsep::connected_components(img, hpsep::Connectivity::Eight).size() == 1);
  CHECK(hpsep::connected_components(img, hpsep::Connectivity::Four).size() == 2);
}

TEST_CASE("rotation by zero is the identity") {
  hpsep::Rng rng(7);
  const BinaryImage img = oracle::random_image(rng, 33, 21, 0.3);
  CHECK(hpsep::rotate(img, 0.0) == img);
}

TEST_CASE("rotation keeps image and label raster aligned") {
  hpsep::Rng rng(8);
  for (double angle : {-3.0, -0.7, 1.3, 3.0, 45.0}) {
    BinaryImage img(80, 60);
    LabelRaster truth(80, 60);
    for (int i = 0; i < 300; ++i) {
      const int x = 15 + static_cast<int>(rng.below(50));
      const int y = 12 + static_cast<int>(rng.below(36));
      img.set(x, y, true);
      truth.set(x, y, static_cast<std::uint8_t>(1 + rng.below(3)));
    }
    const BinaryImage rimg = hpsep::rotate(img, angle);
    const LabelRaster rtruth = hpsep::rotate(truth, angle);
    REQUIRE(rimg.width() == img.width());
    REQUIRE(rimg.height() == img.height());
    // Identical inverse mapping: labels are nonzero exactly on the ink.
    for (int y = 0; y < rimg.height(); ++y) {
      for (int x = 0; x < rimg.width(); ++x) {
        CHECK((rtruth.get(x, y) != 0) == rimg.get(x, y));
      }
    }
  }
}

TEST_CASE("rotation rejects angles beyond 90 degrees") {
  BinaryImage img(8, 8);
  img.set(4, 4, true);
  CHECK_THROWS_AS(hpsep::rotate(img, 90.5), hpsep::ParamError);
  CHECK_THROWS_AS(hpsep::rotate(img, -91.0), hpsep::ParamError);
}

TEST_CASE("projection profiles sum to the ink count") {
  hpsep::Rng rng(9);
  const BinaryImage img = oracle::random_image(rng, 37, 19, 0.4);
  const auto rows = hpsep::projection_profile(img, hpsep::Axis::Horizontal);
  const auto cols = hpsep::projection_profile(img, hpsep::Axis::Vertical);
  REQUIRE(rows.size() == 19);
  REQUIRE(cols.size() == 37);
  long long row_sum = 0, col_sum = 0;
  for (int v : rows) row_sum += v;
  for (int v : cols) col_sum += v;
  CHECK(row_sum == static_cast<long long>(img.ink_count()));
  CHECK(col_sum == static_cast<long long>(img.ink_count()));
  for (int y = 0; y < img.height(); ++y) CHECK(rows[static_cast<std::size_t>(y)] == img.row_ink_count(y));
}

TEST_CASE("pbm round-trips bit-exactly") {
  hpsep::Rng rng(10);
  const fs::path dir = temp_dir();
  for (int iter = 0; iter < 20; ++iter) {
    const int w = 1 + static_cast<int>(rng.below(70));  // exercises w % 8 != 0
    const int h = 1 + static_cast<int>(rng.below(40));
    const BinaryImage img = oracle::random_image(rng, w, h, 0.35);
    const fs::path path = dir / ("rt_" + std::to_string(iter) + ".pbm");
    hpsep::write_pbm(img, path);
    const BinaryImage back = hpsep::read_pbm(path);
    REQUIRE(back.width() == w);
    REQUIRE(back.height() == h);
    bool same = true;
    for (int y = 0; y < h && same; ++y) {
      for (int x = 0; x < w && same; ++x) same = back.get(x, y) == img.get(x, y);
    }
    CHECK(same);
  }
}

TEST_CASE("pgm round-trips label values exactly") {
  hpsep::Rng rng(11);
  const fs::path dir = temp_dir();
  for (int iter = 0; iter < 10; ++iter) {
    const int w = 1 + static_cast<int>(rng.below(50));
    const int h = 1 + static_cast<int>(rng.below(30));
    const LabelRaster labels = oracle::random_labels(rng, w, h, 3);
    const fs::path path = dir / ("rt_" + std::to_string(iter) + ".pgm");
    hpsep::write_pgm(labels, path, 3);
    const LabelRaster back = hpsep::read_pgm(path);
    CHECK(back == labels);
  }
  // Values above maxval are refused at write time.
  LabelRaster bad(2, 2);
  bad.set(0, 0, 7);
  CHECK_THROWS_AS(hpsep::write_pgm(bad, dir / "bad.pgm", 3), hpsep::ParamError);
}

TEST_CASE("malformed netpbm headers fail with a byte offset") {
  const fs::path dir = temp_dir();
  const auto write_bytes = [&](const std::string& name, const std::string& bytes) {
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    return p;
  };

  const auto expect_format_error = [](auto&& fn) {
    try {
      fn();
      FAIL_CHECK("expected FormatError");
    } catch (const hpsep::FormatError& e) {
      CHECK(std::string(e.what()).find("at byte") != std::string::npos);
    }
  };

  expect_format_error([&] { hpsep::read_pbm(write_bytes("m1.pbm", "P5\n2 2\n3\nAAAA")); });
  expect_format_error([&] { hpsep::read_pbm(write_bytes("m2.pbm", "P4\n-3 2\n")); });
  expect_format_error([&] { hpsep::read_pbm(write_bytes("m3.pbm", "P4\n2\n")); });
  expect_format_error([&] { hpsep::read_pbm(write_bytes("m4.pbm", "P4\n2 2\n\xFF")); });
  expect_format_error([&] { hpsep::read_pgm(write_bytes("m5.pgm", "P4\n2 2\n\xFF\xFF")); });
  expect_format_error([&] { hpsep::read_pgm(write_bytes("m6.pgm", "P5\n2 2\nzz\n")); });
  CHECK_THROWS_AS(hpsep::read_pbm(dir / "does-not-exist.pbm"), hpsep::IoError);
}
