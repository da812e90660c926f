#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "hpsep/raster.hpp"
#include "hpsep/segment.hpp"

namespace hpsep {

inline constexpr int kFeatureCount = 35;

/// Identifies the descriptor layout below. Stored in model files; predict
/// refuses a model whose tag does not match the running extractor.
inline constexpr const char* kFeatureLayoutVersion = "hpsep-features-35-v1";

/// Fixed 35-slot descriptor of a pseudo-word:
///   [0-4]   morphological: height px, width px, aspect w/h, ink count,
///           density ink/(w*h)
///   [5-15]  connected components: count; mean/std width; mean/std height;
///           mean/std aspect; mean/std density; mean/std inter-CC gap
///   [16-22] the 7 Hu invariant moments, signed-log compressed
///   [23-24] variance of the horizontal / vertical projection profile,
///           normalized by the squared mean profile height
///   [25-28] run lengths: mean/std horizontal black runs, mean/std vertical
///   [29-30] mean crossing count per row, per column
///   [31-34] co-occurrence P(black,black) at offsets (1,0),(0,1),(1,1),(1,-1)
using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;

struct NormalizationStats {
  FeatureVector mean = FeatureVector::Zero();
  FeatureVector stddev = FeatureVector::Zero();
};

/// Renders the word's components into a bbox-local ink mask.
BinaryImage word_mask(const PseudoWord& word);

/// The seven Hu invariants from scale-normalized central moments, each
/// compressed by s(v) = sign(v) * log10(1 + |v|). Throws on an empty mask.
std::array<double, 7> hu_moments(const BinaryImage& mask);

/// Mean and population standard deviation of maximal black run lengths,
/// horizontal first: {h_mean, h_std, v_mean, v_std}.
std::array<double, 4> run_length_stats(const BinaryImage& mask);

/// Mean number of white->black transitions per row and per column.
std::array<double, 2> crossing_counts(const BinaryImage& mask);

/// For each offset, the fraction of valid pixel pairs where both pixels are
/// black. Offsets lacking valid pairs yield 0.
std::array<double, 4> cooccurrence(const BinaryImage& mask);

/// Fills all 35 slots. Single-CC words get zero CC stds and zero gap slots.
FeatureVector extract_features(const PseudoWord& word);

/// Per-slot z-score statistics (population stddev). Requires >= 2 vectors.
NormalizationStats fit_normalization(const std::vector<FeatureVector>& vectors);

/// (v - mean) / stddev per slot; zero-stddev slots are centered only.
FeatureVector apply_normalization(const FeatureVector& v, const NormalizationStats& stats);

}  // namespace hpsep
