#pragma once

#include <array>
#include <vector>

#include "hpsep/group.hpp"
#include "hpsep/raster.hpp"

namespace hpsep {

/// Per-pixel labels: 0 background, 1 handwritten, 2 printed, 3 noise.
using GroundTruthMap = LabelRaster;

struct ScoreReport {
  // Indexed by LabelClass value - 1: handwritten, printed, noise.
  std::array<double, 3> rates{1.0, 1.0, 1.0};
  std::array<long long, 3> truth_pixels{};
  std::array<long long, 3> correct_pixels{};
  double micro_average = 1.0; // sum correct / sum labeled

  long long labeled_total() const;
  long long correct_total() const;
};

/// Recognition rates: per class, correct pixels of the class over truth
/// pixels of the class (1.0 for absent classes); the average is the pixel
/// micro-average. Background pixels are excluded. Throws on size mismatch.
ScoreReport rate(const LabelRaster& predicted, const GroundTruthMap& truth);

/// Paints each word's ink pixels with its label; ink pixels owned by no word
/// are labeled Noise. Background stays 0.
LabelRaster project_labels(const std::vector<LabeledWord>& words, const BinaryImage& image);

}  // namespace hpsep
