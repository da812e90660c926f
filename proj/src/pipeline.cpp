#include "hpsep/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "hpsep/errors.hpp"
#include "hpsep/rng.hpp"

namespace hpsep {

namespace {

constexpr double kReferenceDpi = 300.0;

/// Runs fn(i) for i in [0, n) on `jobs` threads. Work items are independent
/// and land in caller-owned slots, so the result is identical for any jobs
/// value. The first exception is rethrown on the caller thread.
template <typename Fn>
void parallel_for_indexed(int n, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

struct RateAccumulator {
  std::array<long long, 3> truth{};
  std::array<long long, 3> correct{};

  void add(const ScoreReport& report) {
    for (int c = 0; c < 3; ++c) {
      truth[c] += report.truth_pixels[c];
      correct[c] += report.correct_pixels[c];
    }
  }

  ScoreReport finish() const {
    ScoreReport report;
    report.truth_pixels = truth;
    report.correct_pixels = correct;
    long long truth_total = 0;
    long long correct_total = 0;
    for (int c = 0; c < 3; ++c) {
      truth_total += truth[c];
      correct_total += correct[c];
      report.rates[static_cast<std::size_t>(c)] =
          truth[c] > 0 ? static_cast<double>(correct[c]) / static_cast<double>(truth[c])
                       : 1.0;
    }
    report.micro_average =
        truth_total > 0
            ? static_cast<double>(correct_total) / static_cast<double>(truth_total)
            : 1.0;
    return report;
  }
};

/// One page, preprocessed and classified; groupers are applied on top.
struct PreparedPage {
  BinaryImage cleaned;
  GroundTruthMap aligned_truth;
  std::vector<LabeledWord> raw_words;
};

std::vector<LabeledWord> classify_words(const BinaryImage& cleaned,
                                        const MultiClassSvmModel& model,
                                        const PipelineConfig& cfg) {
  const std::vector<PseudoWord> segmented = segment_words(cleaned, cfg.line_factor);
  std::vector<LabeledWord> out;
  out.reserve(segmented.size());
  for (const PseudoWord& word : segmented) {
    const FeatureVector features = extract_features(word);
    const Prediction prediction = predict(model, features);
    out.push_back(make_labeled_word(word, prediction.label, prediction.confidence));
  }
  return out;
}

PreparedPage prepare_page(const ManifestEntry& entry, const MultiClassSvmModel& model,
                          const PipelineConfig& cfg) {
  BinaryImage image = read_pbm(entry.image_path);
  image.set_dpi(cfg.dpi);
  const GroundTruthMap truth = read_pgm(entry.truth_path);
  if (truth.width() != image.width() || truth.height() != image.height()) {
    throw FormatError("image/truth size mismatch for " + entry.image_path);
  }
  PreparedPage page;
  const PreprocessResult pre = preprocess(image, cfg.preprocess);
  page.aligned_truth = align_truth(truth, pre);
  page.cleaned = pre.image;
  page.raw_words = classify_words(page.cleaned, model, cfg);
  return page;
}

}  // namespace

std::vector<LabeledWord> apply_grouping(const std::vector<LabeledWord>& words,
                                        const PipelineConfig& cfg, int dpi) {
  return apply_grouping_method(words, cfg, dpi, cfg.grouping);
}

std::vector<LabeledWord> apply_grouping_method(const std::vector<LabeledWord>& words,
                                               const PipelineConfig& cfg, int dpi,
                                               GroupingMethod method) {
  if (method == GroupingMethod::None || words.empty()) return words;
  const double scale = (dpi > 0 ? dpi : cfg.dpi) / kReferenceDpi;

  if (cfg.metric == NeighborMetric::BBox) {
    const double max_dist = cfg.max_dist_bbox * scale;
    switch (method) {
      case GroupingMethod::Knn: return regroup_knn_bbox(words, cfg.k, max_dist);
      case GroupingMethod::KnnConstrained:
        return regroup_constrained_bbox(words, cfg.k, max_dist);
      case GroupingMethod::ConfGauss:
        return regroup_confidence_bbox(words, ConfidenceLaw::Gauss, max_dist);
      case GroupingMethod::ConfPoly2:
        return regroup_confidence_bbox(words, ConfidenceLaw::Poly2, max_dist);
      case GroupingMethod::ConfPoly4:
        return regroup_confidence_bbox(words, ConfidenceLaw::Poly4, max_dist);
      case GroupingMethod::None: break;
    }
    return words;
  }

  const double max_dist = cfg.max_dist_centroid * scale;
  const SpatialIndex index(words, cfg.weights);
  switch (method) {
    case GroupingMethod::Knn: return regroup_knn(words, index, cfg.k, max_dist);
    case GroupingMethod::KnnConstrained:
      return regroup_constrained(words, index, cfg.k, max_dist);
    case GroupingMethod::ConfGauss:
      return regroup_confidence(words, index, ConfidenceLaw::Gauss, max_dist);
    case GroupingMethod::ConfPoly2:
      return regroup_confidence(words, index, ConfidenceLaw::Poly2, max_dist);
    case GroupingMethod::ConfPoly4:
      return regroup_confidence(words, index, ConfidenceLaw::Poly4, max_dist);
    case GroupingMethod::None: break;
  }
  return words;
}

DocumentResult run_document(const BinaryImage& image, const MultiClassSvmModel& model,
                            const PipelineConfig& cfg) {
  DocumentResult result;
  result.preprocessed = preprocess(image, cfg.preprocess);
  result.raw_words = classify_words(result.preprocessed.image, model, cfg);
  result.words =
      apply_grouping(result.raw_words, cfg, result.preprocessed.image.dpi());
  result.predicted = project_labels(result.words, result.preprocessed.image);
  return result;
}

GroundTruthMap align_truth(const GroundTruthMap& truth, const PreprocessResult& pre) {
  return rotate(truth, pre.skew_correction_deg);
}

LabelClass gold_label(const PseudoWord& word, const GroundTruthMap& truth) {
  std::array<long long, 3> counts{};
  for (const ConnectedComponent& cc : word.components) {
    const BinaryImage& mask = cc.pixel_mask;
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) {
        if (!mask.get(x, y)) continue;
        const int gx = cc.bbox.x_min + x;
        const int gy = cc.bbox.y_min + y;
        if (gx < 0 || gx >= truth.width() || gy < 0 || gy >= truth.height()) continue;
        const std::uint8_t label = truth.get(gx, gy);
        if (label >= 1 && label <= 3) ++counts[label - 1];
      }
    }
  }
  if (counts[0] == 0 && counts[1] == 0 && counts[2] == 0) return LabelClass::Noise;
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<LabelClass>(best + 1);
}

TrainingSet cap_training_set(const TrainingSet& full,
                             const std::array<std::size_t, 3>& caps) {
  std::array<std::size_t, 3> totals{};
  for (const LabelClass label : full.labels) {
    ++totals[static_cast<std::size_t>(label) - 1];
  }
  std::array<std::size_t, 3> stride{};
  for (std::size_t c = 0; c < 3; ++c) {
    if (caps[c] == 0) throw ParamError("training cap must be positive");
    stride[c] = (totals[c] + caps[c] - 1) / caps[c];  // ceil(n / cap)
    if (stride[c] == 0) stride[c] = 1;
  }
  TrainingSet capped;
  std::array<std::size_t, 3> seen{};
  for (std::size_t i = 0; i < full.samples.size(); ++i) {
    const std::size_t c = static_cast<std::size_t>(full.labels[i]) - 1;
    if (seen[c] % stride[c] == 0) {
      capped.samples.push_back(full.samples[i]);
      capped.labels.push_back(full.labels[i]);
    }
    ++seen[c];
  }
  return capped;
}

void collect_training_words(const BinaryImage& image, const GroundTruthMap& truth,
                            const PipelineConfig& cfg, TrainingSet& out) {
  if (truth.width() != image.width() || truth.height() != image.height()) {
    throw ParamError("image/truth size mismatch");
  }
  const PreprocessResult pre = preprocess(image, cfg.preprocess);
  const GroundTruthMap aligned = align_truth(truth, pre);
  const std::vector<PseudoWord> words = segment_words(pre.image, cfg.line_factor);
  for (const PseudoWord& word : words) {
    out.samples.push_back(extract_features(word));
    out.labels.push_back(gold_label(word, aligned));
  }
}

TrainingSet build_training_set(const DatasetManifest& manifest, const PipelineConfig& cfg,
                               const std::array<std::size_t, 3>& caps) {
  const int n = static_cast<int>(manifest.entries.size());
  std::vector<TrainingSet> per_page(static_cast<std::size_t>(n));
  parallel_for_indexed(n, cfg.jobs, [&](int i) {
    const ManifestEntry& entry = manifest.entries[static_cast<std::size_t>(i)];
    BinaryImage image = read_pbm(entry.image_path);
    image.set_dpi(cfg.dpi);
    const GroundTruthMap truth = read_pgm(entry.truth_path);
    collect_training_words(image, truth, cfg, per_page[static_cast<std::size_t>(i)]);
  });
  TrainingSet full;
  for (const TrainingSet& page : per_page) {
    full.samples.insert(full.samples.end(), page.samples.begin(), page.samples.end());
    full.labels.insert(full.labels.end(), page.labels.begin(), page.labels.end());
  }
  return cap_training_set(full, caps);
}

std::vector<double> cross_validate(const TrainingSet& data, const KernelParams& params,
                                   int folds, std::uint64_t seed) {
  if (folds < 2) throw ParamError("cross-validation needs >= 2 folds");
  const std::size_t n = data.samples.size();
  if (n < static_cast<std::size_t>(folds)) {
    throw ParamError("fewer samples than folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(order[i], order[j]);
  }

  std::vector<double> accuracies;
  for (int fold = 0; fold < folds; ++fold) {
    const std::size_t begin = n * static_cast<std::size_t>(fold) / static_cast<std::size_t>(folds);
    const std::size_t end = n * static_cast<std::size_t>(fold + 1) / static_cast<std::size_t>(folds);
    if (begin == end) continue;
    TrainingSet train_part;
    TrainingSet test_part;
    for (std::size_t i = 0; i < n; ++i) {
      TrainingSet& dst = (i >= begin && i < end) ? test_part : train_part;
      dst.samples.push_back(data.samples[order[i]]);
      dst.labels.push_back(data.labels[order[i]]);
    }
    std::array<std::size_t, 3> present{};
    for (const LabelClass label : train_part.labels) {
      ++present[static_cast<std::size_t>(label) - 1];
    }
    if (present[0] == 0 || present[1] == 0 || present[2] == 0) continue;
    const MultiClassSvmModel model = train_multiclass(train_part, params);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < test_part.samples.size(); ++i) {
      if (predict(model, test_part.samples[i]).label == test_part.labels[i]) ++hits;
    }
    accuracies.push_back(static_cast<double>(hits) /
                         static_cast<double>(test_part.samples.size()));
  }
  return accuracies;
}

ScoreReport evaluate_corpus(const DatasetManifest& manifest,
                            const MultiClassSvmModel& model, const PipelineConfig& cfg) {
  return evaluate_corpus_method(manifest, model, cfg, cfg.grouping);
}

ScoreReport evaluate_corpus_method(const DatasetManifest& manifest,
                                   const MultiClassSvmModel& model,
                                   const PipelineConfig& cfg, GroupingMethod method) {
  const int n = static_cast<int>(manifest.entries.size());
  std::vector<ScoreReport> reports(static_cast<std::size_t>(n));
  parallel_for_indexed(n, cfg.jobs, [&](int i) {
    const PreparedPage page =
        prepare_page(manifest.entries[static_cast<std::size_t>(i)], model, cfg);
    const std::vector<LabeledWord> grouped =
        apply_grouping_method(page.raw_words, cfg, page.cleaned.dpi(), method);
    reports[static_cast<std::size_t>(i)] =
        rate(project_labels(grouped, page.cleaned), page.aligned_truth);
  });
  RateAccumulator acc;
  for (const ScoreReport& r : reports) acc.add(r);
  return acc.finish();
}

GrouperComparison compare_groupers(const DatasetManifest& manifest,
                                   const MultiClassSvmModel& model,
                                   const PipelineConfig& cfg) {
  const int n = static_cast<int>(manifest.entries.size());
  std::vector<std::array<ScoreReport, 6>> reports(static_cast<std::size_t>(n));
  parallel_for_indexed(n, cfg.jobs, [&](int i) {
    const PreparedPage page =
        prepare_page(manifest.entries[static_cast<std::size_t>(i)], model, cfg);
    for (std::size_t m = 0; m < kComparisonOrder.size(); ++m) {
      const std::vector<LabeledWord> grouped = apply_grouping_method(
          page.raw_words, cfg, page.cleaned.dpi(), kComparisonOrder[m]);
      reports[static_cast<std::size_t>(i)][m] =
          rate(project_labels(grouped, page.cleaned), page.aligned_truth);
    }
  });
  GrouperComparison comparison;
  for (std::size_t m = 0; m < kComparisonOrder.size(); ++m) {
    RateAccumulator acc;
    for (int i = 0; i < n; ++i) acc.add(reports[static_cast<std::size_t>(i)][m]);
    comparison[m] = {kComparisonOrder[m], acc.finish()};
  }
  return comparison;
}

}  // namespace hpsep
