#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "hpsep/corpus.hpp"
#include "hpsep/evaluate.hpp"
#include "hpsep/group.hpp"
#include "hpsep/preprocess.hpp"
#include "hpsep/segment.hpp"
#include "hpsep/svm.hpp"

namespace hpsep {

/// Every tunable of the end-to-end pipeline in one place. Defaults follow the
/// module defaults; distances are given at the 300 dpi reference and scaled
/// to each image's dpi.
struct PipelineConfig {
  PreprocessConfig preprocess;
  double line_factor = 3.0;          // first-smear threshold factor
  DistanceWeights weights;           // centroid metric weights (wx=1, wy=3)
  int k = 2;                         // neighbors consulted by A1/A2
  double max_dist_centroid = 300.0;  // px at 300 dpi
  double max_dist_bbox = 100.0;      // px at 300 dpi
  NeighborMetric metric = NeighborMetric::Centroid;
  GroupingMethod grouping = GroupingMethod::KnnConstrained;
  KernelParams svm;
  int dpi = 300;  // assumed resolution of loaded images (PBM carries none)
  int jobs = 1;   // worker threads for batch page loops
};

/// Everything one document pass produces.
struct DocumentResult {
  PreprocessResult preprocessed;
  std::vector<LabeledWord> raw_words;  // SVM labels, pre-grouping
  std::vector<LabeledWord> words;      // labels after the configured grouping
  LabelRaster predicted;               // projected from `words`
};

/// The configured grouping pass (method/metric/cutoff) over classified words.
std::vector<LabeledWord> apply_grouping(const std::vector<LabeledWord>& words,
                                        const PipelineConfig& cfg, int dpi);

/// Same, with an explicit method (used by the grouper comparison).
std::vector<LabeledWord> apply_grouping_method(const std::vector<LabeledWord>& words,
                                               const PipelineConfig& cfg, int dpi,
                                               GroupingMethod method);

/// preprocess -> segment -> classify -> group -> project.
DocumentResult run_document(const BinaryImage& image, const MultiClassSvmModel& model,
                            const PipelineConfig& cfg);

/// Ground truth mapped into a preprocessed image's frame: rotated by the same
/// correction angle preprocessing applied, with the same resampling.
GroundTruthMap align_truth(const GroundTruthMap& truth, const PreprocessResult& pre);

/// Majority ground-truth class over the word's ink; pixels the truth leaves
/// unlabeled do not vote, and a word with no labeled ink is Noise. Ties go to
/// the first class in the fixed order handwritten, printed, noise.
LabelClass gold_label(const PseudoWord& word, const GroundTruthMap& truth);

/// Default per-class training caps, indexed by LabelClass value - 1
/// (handwritten, printed, noise). Printed words dominate a page, so they get
/// the largest budget.
inline constexpr std::array<std::size_t, 3> kDefaultTrainingCaps = {900, 1200, 600};

/// Deterministic per-class down-sampling: classes above their cap keep every
/// ceil(n/cap)-th word in encounter order.
TrainingSet cap_training_set(const TrainingSet& full,
                             const std::array<std::size_t, 3>& caps);

/// Preprocesses and segments one labeled page and appends (features, gold
/// label) for every pseudo-word.
void collect_training_words(const BinaryImage& image, const GroundTruthMap& truth,
                            const PipelineConfig& cfg, TrainingSet& out);

/// Labeled word samples for a whole manifest, capped per class.
TrainingSet build_training_set(const DatasetManifest& manifest, const PipelineConfig& cfg,
                               const std::array<std::size_t, 3>& caps = kDefaultTrainingCaps);

/// k-fold cross-validation word accuracy (shuffled deterministically by
/// seed). Folds whose training part lacks a class are skipped; the returned
/// vector holds one accuracy per completed fold.
std::vector<double> cross_validate(const TrainingSet& data, const KernelParams& params,
                                   int folds, std::uint64_t seed);

/// Whole-manifest pixel rates with the configured grouping, aggregated over
/// pages (per-class pixel counts summed, then divided once).
ScoreReport evaluate_corpus(const DatasetManifest& manifest,
                            const MultiClassSvmModel& model, const PipelineConfig& cfg);

ScoreReport evaluate_corpus_method(const DatasetManifest& manifest,
                                   const MultiClassSvmModel& model,
                                   const PipelineConfig& cfg, GroupingMethod method);

/// One ScoreReport per grouping method, fixed row order: none, knn,
/// knn-constrained, gauss, poly2, poly4. Pages are preprocessed and
/// classified once, then every grouper is scored on the same words.
using GrouperComparison = std::array<std::pair<GroupingMethod, ScoreReport>, 6>;

inline constexpr std::array<GroupingMethod, 6> kComparisonOrder = {
    GroupingMethod::None,      GroupingMethod::Knn,      GroupingMethod::KnnConstrained,
    GroupingMethod::ConfGauss, GroupingMethod::ConfPoly2, GroupingMethod::ConfPoly4};

GrouperComparison compare_groupers(const DatasetManifest& manifest,
                                   const MultiClassSvmModel& model,
                                   const PipelineConfig& cfg);

}  // namespace hpsep
