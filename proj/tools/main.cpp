#include <array>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hpsep/errors.hpp"
#include "hpsep/pipeline.hpp"
#include "hpsep/textio.hpp"

namespace {

using hpsep::format_double;

// Overlay colors: handwritten red, printed blue, noise gray.
constexpr std::array<std::uint8_t, 3> kHandColor = {220, 40, 40};
constexpr std::array<std::uint8_t, 3> kPrintedColor = {40, 70, 220};
constexpr std::array<std::uint8_t, 3> kNoiseColor = {128, 128, 128};

// Distinct colors for the segmentation overlay, cycled by word id.
constexpr std::array<std::array<std::uint8_t, 3>, 12> kWordPalette = {{
    {230, 25, 75},   {60, 180, 75},   {255, 190, 25},  {0, 130, 200},
    {245, 130, 48},  {145, 30, 180},  {70, 200, 200},  {240, 50, 230},
    {160, 190, 30},  {0, 128, 128},   {120, 80, 220},  {170, 110, 40},
}};

struct CommonOptions {
  hpsep::PipelineConfig cfg;
  std::string metric_name = "centroid";
  std::string grouping_name = "knn-constrained";
  bool print_config = false;
};

void add_pipeline_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->set_config("--config", "", "key=value config file; flags take precedence");
  cmd->allow_config_extras(CLI::config_extras_mode::error);
  cmd->add_flag("--print-config", opt.print_config,
                "print the effective configuration and exit");

  hpsep::PipelineConfig& cfg = opt.cfg;
  cmd->add_option("--kfill-k", cfg.preprocess.kfill_k, "kfill window size (odd, >= 3)")
      ->capture_default_str();
  cmd->add_option("--skew-range", cfg.preprocess.skew_range,
                  "skew search half-range in degrees")
      ->capture_default_str();
  cmd->add_option("--skew-resolution", cfg.preprocess.skew_resolution,
                  "fine skew search step in degrees")
      ->capture_default_str();
  cmd->add_option("--border-margin", cfg.preprocess.edge_rules.border_margin_px,
                  "edge-artifact margin in px (-1: 2% of min page side)")
      ->capture_default_str();
  cmd->add_option("--line-factor", cfg.line_factor,
                  "line smear threshold as a multiple of median component height")
      ->capture_default_str();
  cmd->add_option("--weight-x", cfg.weights.wx, "horizontal distance weight")
      ->capture_default_str();
  cmd->add_option("--weight-y", cfg.weights.wy, "vertical distance weight")
      ->capture_default_str();
  cmd->add_option("--k", cfg.k, "neighbors consulted by knn groupers")
      ->capture_default_str();
  cmd->add_option("--max-dist-centroid", cfg.max_dist_centroid,
                  "neighbor cutoff for the centroid metric, px at 300 dpi")
      ->capture_default_str();
  cmd->add_option("--max-dist-bbox", cfg.max_dist_bbox,
                  "neighbor cutoff for the bbox metric, px at 300 dpi")
      ->capture_default_str();
  cmd->add_option("--metric", opt.metric_name, "neighbor metric: centroid|bbox")
      ->capture_default_str();
  cmd->add_option("--grouping", opt.grouping_name,
                  "grouping method: none|knn|knn-constrained|gauss|poly2|poly4")
      ->capture_default_str();
  cmd->add_option("--gamma", cfg.svm.gamma, "Gaussian kernel width")
      ->capture_default_str();
  cmd->add_option("--c", cfg.svm.C, "SVM box constraint")->capture_default_str();
  cmd->add_option("--tol", cfg.svm.tol, "SMO stopping tolerance")
      ->capture_default_str();
  cmd->add_option("--max-passes", cfg.svm.max_passes, "SMO step cap")
      ->capture_default_str();
  cmd->add_option("--dpi", cfg.dpi, "resolution assumed for loaded images")
      ->capture_default_str();
  cmd->add_option("--jobs", cfg.jobs, "worker threads for batch page loops")
      ->capture_default_str();
}

/// Resolves the string-valued flags and validates ranges shared by all
/// pipeline subcommands.
void finalize_config(CommonOptions& opt) {
  opt.cfg.metric = hpsep::neighbor_metric_from_string(opt.metric_name);
  opt.cfg.grouping = hpsep::grouping_method_from_string(opt.grouping_name);
  if (opt.cfg.k < 1) throw hpsep::ParamError("--k must be >= 1");
  if (opt.cfg.jobs < 1) throw hpsep::ParamError("--jobs must be >= 1");
  if (opt.cfg.dpi < 1) throw hpsep::ParamError("--dpi must be >= 1");
}

std::string canonical_config(const CommonOptions& opt) {
  const hpsep::PipelineConfig& cfg = opt.cfg;
  std::ostringstream out;
  out << "kfill-k=" << cfg.preprocess.kfill_k << "\n";
  out << "skew-range=" << format_double(cfg.preprocess.skew_range) << "\n";
  out << "skew-resolution=" << format_double(cfg.preprocess.skew_resolution) << "\n";
  out << "border-margin=" << cfg.preprocess.edge_rules.border_margin_px << "\n";
  out << "line-factor=" << format_double(cfg.line_factor) << "\n";
  out << "weight-x=" << format_double(cfg.weights.wx) << "\n";
  out << "weight-y=" << format_double(cfg.weights.wy) << "\n";
  out << "k=" << cfg.k << "\n";
  out << "max-dist-centroid=" << format_double(cfg.max_dist_centroid) << "\n";
  out << "max-dist-bbox=" << format_double(cfg.max_dist_bbox) << "\n";
  out << "metric=" << hpsep::to_string(cfg.metric) << "\n";
  out << "grouping=" << hpsep::to_string(cfg.grouping) << "\n";
  out << "gamma=" << format_double(cfg.svm.gamma) << "\n";
  out << "c=" << format_double(cfg.svm.C) << "\n";
  out << "tol=" << format_double(cfg.svm.tol) << "\n";
  out << "max-passes=" << cfg.svm.max_passes << "\n";
  out << "dpi=" << cfg.dpi << "\n";
  out << "jobs=" << cfg.jobs << "\n";
  return out.str();
}

hpsep::RgbImage overlay_from_labels(const hpsep::LabelRaster& labels) {
  hpsep::RgbImage img(labels.width(), labels.height());
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const std::array<std::uint8_t, 3>* color = nullptr;
      switch (labels.get(x, y)) {
        case 1: color = &kHandColor; break;
        case 2: color = &kPrintedColor; break;
        case 3: color = &kNoiseColor; break;
        default: break;
      }
      if (color) img.set(x, y, (*color)[0], (*color)[1], (*color)[2]);
    }
  }
  return img;
}

template <typename WordLike>
void paint_word(hpsep::RgbImage& img, const WordLike& word,
                const std::array<std::uint8_t, 3>& color) {
  for (const hpsep::ConnectedComponent& cc : word.components) {
    for (int y = 0; y < cc.pixel_mask.height(); ++y) {
      for (int x = 0; x < cc.pixel_mask.width(); ++x) {
        if (!cc.pixel_mask.get(x, y)) continue;
        const int gx = cc.bbox.x_min + x;
        const int gy = cc.bbox.y_min + y;
        if (gx >= 0 && gx < img.width && gy >= 0 && gy < img.height) {
          img.set(gx, gy, color[0], color[1], color[2]);
        }
      }
    }
  }
}

std::string format_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string score_table(const hpsep::ScoreReport& report) {
  static const char* kNames[3] = {"handwritten", "printed", "noise"};
  std::ostringstream out;
  out << "class           rate     correct      truth\n";
  for (int c = 0; c < 3; ++c) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-15s %-8s %10lld %10lld\n", kNames[c],
                  format_rate(report.rates[static_cast<std::size_t>(c)]).c_str(),
                  report.correct_pixels[static_cast<std::size_t>(c)],
                  report.truth_pixels[static_cast<std::size_t>(c)]);
    out << line;
  }
  char micro[128];
  std::snprintf(micro, sizeof(micro), "%-15s %-8s %10lld %10lld\n", "micro-average",
                format_rate(report.micro_average).c_str(), report.correct_total(),
                report.labeled_total());
  out << micro;
  return out.str();
}

nlohmann::json report_json(const hpsep::ScoreReport& report) {
  static const char* kNames[3] = {"handwritten", "printed", "noise"};
  nlohmann::json j;
  for (int c = 0; c < 3; ++c) {
    j[kNames[c]] = {{"rate", report.rates[static_cast<std::size_t>(c)]},
                    {"correct_pixels", report.correct_pixels[static_cast<std::size_t>(c)]},
                    {"truth_pixels", report.truth_pixels[static_cast<std::size_t>(c)]}};
  }
  j["micro_average"] = report.micro_average;
  return j;
}

std::string words_tsv(const std::vector<hpsep::PseudoWord>& words) {
  std::ostringstream out;
  out << "# columns: id\tline_id\tx_min\ty_min\tx_max\ty_max\tpixels\n";
  for (const hpsep::PseudoWord& w : words) {
    out << w.id << '\t' << w.line_id << '\t' << w.bbox.x_min << '\t' << w.bbox.y_min
        << '\t' << w.bbox.x_max << '\t' << w.bbox.y_max << '\t' << w.pixel_count
        << '\n';
  }
  return out.str();
}

std::string labeled_words_tsv(const std::vector<hpsep::LabeledWord>& words) {
  std::ostringstream out;
  out << "# columns: id\tline_id\tx_min\ty_min\tx_max\ty_max\tpixels\tlabel\tconfidence\n";
  for (const hpsep::LabeledWord& w : words) {
    out << w.word.id << '\t' << w.word.line_id << '\t' << w.word.bbox.x_min << '\t'
        << w.word.bbox.y_min << '\t' << w.word.bbox.x_max << '\t' << w.word.bbox.y_max
        << '\t' << w.word.pixel_count << '\t' << hpsep::to_string(w.label) << '\t'
        << format_double(w.confidence) << '\n';
  }
  return out.str();
}

// --- subcommand bodies -------------------------------------------------------

struct GenerateArgs {
  int n_train = 2;
  int n_test = 1;
  std::uint64_t seed = 1;
  std::string out_dir;
};

int cmd_generate(const GenerateArgs& args) {
  const hpsep::CorpusOutput out =
      hpsep::generate_corpus(args.n_train, args.n_test, args.seed, args.out_dir);
  std::cout << "train_manifest=" << out.train_manifest.string() << "\n";
  std::cout << "test_manifest=" << out.test_manifest.string() << "\n";
  std::cout << "pages=" << (args.n_train + args.n_test) << "\n";
  return 0;
}

struct PreprocessArgs {
  CommonOptions common;
  std::string input;
  std::string output;
};

int cmd_preprocess(PreprocessArgs& args) {
  finalize_config(args.common);
  if (args.input.empty()) throw hpsep::ParamError("--in is required");
  if (args.output.empty()) throw hpsep::ParamError("--out is required");
  hpsep::BinaryImage image = hpsep::read_pbm(args.input);
  image.set_dpi(args.common.cfg.dpi);
  const hpsep::PreprocessResult result =
      hpsep::preprocess(image, args.common.cfg.preprocess);
  hpsep::write_pbm(result.image, args.output);
  std::cout << "skew_correction_deg=" << format_double(result.skew_correction_deg)
            << "\n";
  std::cout << "ink_pixels=" << result.image.ink_count() << "\n";
  return 0;
}

struct SegmentArgs {
  CommonOptions common;
  std::string input;
  std::string words_out;
  std::string overlay_out;
};

int cmd_segment(SegmentArgs& args) {
  finalize_config(args.common);
  if (args.input.empty()) throw hpsep::ParamError("--in is required");
  if (args.words_out.empty()) throw hpsep::ParamError("--words-out is required");
  hpsep::BinaryImage image = hpsep::read_pbm(args.input);
  image.set_dpi(args.common.cfg.dpi);
  const std::vector<hpsep::PseudoWord> words =
      hpsep::segment_words(image, args.common.cfg.line_factor);
  hpsep::write_file_atomic(args.words_out, words_tsv(words));
  if (!args.overlay_out.empty()) {
    hpsep::RgbImage overlay(image.width(), image.height());
    for (const hpsep::PseudoWord& w : words) {
      paint_word(overlay, w, kWordPalette[static_cast<std::size_t>(w.id) %
                                          kWordPalette.size()]);
    }
    hpsep::write_ppm(overlay, args.overlay_out);
  }
  std::cout << "words=" << words.size() << "\n";
  return 0;
}

struct TrainArgs {
  CommonOptions common;
  std::string manifest_path;
  std::string model_out;
  int folds = 5;
  std::uint64_t cv_seed = 24209;
};

int cmd_train(TrainArgs& args) {
  finalize_config(args.common);
  if (args.manifest_path.empty()) throw hpsep::ParamError("--manifest is required");
  if (args.model_out.empty()) throw hpsep::ParamError("--model-out is required");
  const hpsep::DatasetManifest manifest = hpsep::load_manifest(args.manifest_path);
  const hpsep::TrainingSet data =
      hpsep::build_training_set(manifest, args.common.cfg);
  std::array<std::size_t, 3> per_class{};
  for (const hpsep::LabelClass label : data.labels) {
    ++per_class[static_cast<std::size_t>(label) - 1];
  }
  std::ostringstream out;
  out << "samples=" << data.samples.size() << " handwritten=" << per_class[0]
      << " printed=" << per_class[1] << " noise=" << per_class[2] << "\n";

  if (args.folds >= 2) {
    const std::vector<double> accuracies =
        hpsep::cross_validate(data, args.common.cfg.svm, args.folds, args.cv_seed);
    double sum = 0.0;
    for (std::size_t i = 0; i < accuracies.size(); ++i) {
      sum += accuracies[i];
      out << "fold " << (i + 1) << "/" << accuracies.size()
          << " accuracy=" << format_rate(accuracies[i]) << "\n";
    }
    if (!accuracies.empty()) {
      out << "cv-mean-accuracy="
          << format_rate(sum / static_cast<double>(accuracies.size())) << "\n";
    } else {
      out << "cv-skipped (a class is too sparse for " << args.folds << " folds)\n";
    }
  }

  const hpsep::MultiClassSvmModel model =
      hpsep::train_multiclass(data, args.common.cfg.svm);
  hpsep::save_model(model, args.model_out);
  long long sv_total = 0;
  for (const hpsep::BinarySvmModel& m : model.pairwise) {
    sv_total += static_cast<long long>(m.support_vectors.size());
  }
  out << "support-vectors=" << sv_total << "\n";
  out << "model=" << args.model_out << "\n";
  std::cout << out.str();
  return 0;
}

struct PredictArgs {
  CommonOptions common;
  std::string input;
  std::string model_path;
  std::string labels_out;
  std::string words_out;
  std::string overlay_out;
  std::string truth_in;
  std::string truth_out;
};

int cmd_predict(PredictArgs& args) {
  finalize_config(args.common);
  if (args.input.empty()) throw hpsep::ParamError("--in is required");
  if (args.model_path.empty()) throw hpsep::ParamError("--model is required");
  if (!args.truth_out.empty() && args.truth_in.empty()) {
    throw hpsep::ParamError("--truth-out requires --truth");
  }
  hpsep::BinaryImage image = hpsep::read_pbm(args.input);
  image.set_dpi(args.common.cfg.dpi);
  const hpsep::MultiClassSvmModel model = hpsep::load_model(args.model_path);
  const hpsep::DocumentResult result =
      hpsep::run_document(image, model, args.common.cfg);

  if (!args.labels_out.empty()) {
    hpsep::write_pgm(result.predicted, args.labels_out, 3);
  }
  if (!args.words_out.empty()) {
    hpsep::write_file_atomic(args.words_out, labeled_words_tsv(result.words));
  }
  if (!args.overlay_out.empty()) {
    hpsep::write_ppm(overlay_from_labels(result.predicted), args.overlay_out);
  }
  if (!args.truth_in.empty()) {
    const hpsep::GroundTruthMap truth = hpsep::read_pgm(args.truth_in);
    if (truth.width() != image.width() || truth.height() != image.height()) {
      throw hpsep::FormatError("truth size does not match the input image");
    }
    const hpsep::GroundTruthMap aligned =
        hpsep::align_truth(truth, result.preprocessed);
    if (!args.truth_out.empty()) hpsep::write_pgm(aligned, args.truth_out, 3);
  }

  std::array<std::size_t, 3> per_class{};
  for (const hpsep::LabeledWord& w : result.words) {
    ++per_class[static_cast<std::size_t>(w.label) - 1];
  }
  std::cout << "words=" << result.words.size() << " handwritten=" << per_class[0]
            << " printed=" << per_class[1] << " noise=" << per_class[2] << "\n";
  std::cout << "skew_correction_deg="
            << format_double(result.preprocessed.skew_correction_deg) << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string predicted_path;
  std::string truth_path;
  std::string report_out;
};

int cmd_evaluate(EvaluateArgs& args) {
  const hpsep::LabelRaster predicted = hpsep::read_pgm(args.predicted_path);
  const hpsep::GroundTruthMap truth = hpsep::read_pgm(args.truth_path);
  const hpsep::ScoreReport report = hpsep::rate(predicted, truth);
  if (!args.report_out.empty()) {
    hpsep::write_file_atomic(args.report_out, report_json(report).dump(2) + "\n");
  }
  std::cout << score_table(report);
  return 0;
}

struct CompareArgs {
  CommonOptions common;
  std::string manifest_path;
  std::string model_path;
  std::string report_out;
};

int cmd_compare(CompareArgs& args) {
  finalize_config(args.common);
  if (args.manifest_path.empty()) throw hpsep::ParamError("--manifest is required");
  if (args.model_path.empty()) throw hpsep::ParamError("--model is required");
  const hpsep::DatasetManifest manifest = hpsep::load_manifest(args.manifest_path);
  const hpsep::MultiClassSvmModel model = hpsep::load_model(args.model_path);
  const hpsep::GrouperComparison comparison =
      hpsep::compare_groupers(manifest, model, args.common.cfg);

  std::ostringstream out;
  out << "method           handwritten printed  noise    micro\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [method, report] : comparison) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %-11s %-8s %-8s %-8s\n",
                  hpsep::to_string(method), format_rate(report.rates[0]).c_str(),
                  format_rate(report.rates[1]).c_str(),
                  format_rate(report.rates[2]).c_str(),
                  format_rate(report.micro_average).c_str());
    out << line;
    nlohmann::json row = report_json(report);
    row["method"] = hpsep::to_string(method);
    rows.push_back(row);
  }
  if (!args.report_out.empty()) {
    hpsep::write_file_atomic(args.report_out, rows.dump(2) + "\n");
  }
  std::cout << out.str();
  return 0;
}

template <typename Fn>
int run_guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const hpsep::VersionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const hpsep::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const hpsep::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const hpsep::ParamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separation of handwritten and machine-printed text in document images"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hpsep 1.0.0");

  GenerateArgs gen_args;
  CLI::App* gen = app.add_subcommand("generate-corpus",
                                     "generate a synthetic labeled corpus");
  gen->add_option("--train", gen_args.n_train, "training pages")
      ->capture_default_str();
  gen->add_option("--test", gen_args.n_test, "test pages")->capture_default_str();
  gen->add_option("--seed", gen_args.seed, "master seed")->capture_default_str();
  gen->add_option("--out", gen_args.out_dir, "output directory")->required();

  PreprocessArgs pre_args;
  CLI::App* pre = app.add_subcommand("preprocess",
                                     "edge removal, kfill denoise, deskew");
  pre->add_option("--in", pre_args.input, "input PBM image");
  pre->add_option("--out", pre_args.output, "cleaned PBM image");
  add_pipeline_flags(pre, pre_args.common);

  SegmentArgs seg_args;
  CLI::App* seg = app.add_subcommand(
      "segment", "double-smearing pseudo-word segmentation of a (clean) image");
  seg->add_option("--in", seg_args.input, "input PBM image");
  seg->add_option("--words-out", seg_args.words_out, "word manifest TSV");
  seg->add_option("--overlay-out", seg_args.overlay_out,
                  "PPM overlay, one color per word");
  add_pipeline_flags(seg, seg_args.common);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train the word classifier");
  train->add_option("--manifest", train_args.manifest_path, "training manifest");
  train->add_option("--model-out", train_args.model_out, "model file to write");
  train->add_option("--folds", train_args.folds,
                    "cross-validation folds (0 or 1 skips CV)")
      ->capture_default_str();
  train->add_option("--cv-seed", train_args.cv_seed, "cross-validation shuffle seed")
      ->capture_default_str();
  add_pipeline_flags(train, train_args.common);

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand(
      "predict", "classify one document image with a trained model");
  predict->add_option("--in", predict_args.input, "input PBM image");
  predict->add_option("--model", predict_args.model_path, "model file");
  predict->add_option("--labels-out", predict_args.labels_out,
                      "predicted per-pixel labels (PGM, maxval 3)");
  predict->add_option("--words-out", predict_args.words_out, "labeled word TSV");
  predict->add_option("--overlay-out", predict_args.overlay_out,
                      "PPM overlay: handwritten red, printed blue, noise gray");
  predict->add_option("--truth", predict_args.truth_in,
                      "ground-truth PGM to align to the deskewed frame");
  predict->add_option("--truth-out", predict_args.truth_out,
                      "where to write the aligned truth (requires --truth)");
  add_pipeline_flags(predict, predict_args.common);

  EvaluateArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "evaluate", "pixel recognition rates of a prediction against truth");
  eval->add_option("--predicted", eval_args.predicted_path, "predicted PGM labels")
      ->required();
  eval->add_option("--truth", eval_args.truth_path, "ground-truth PGM labels")
      ->required();
  eval->add_option("--report-out", eval_args.report_out, "JSON report path");

  CompareArgs compare_args;
  CLI::App* compare = app.add_subcommand(
      "compare-groupers", "score every grouping method on a labeled corpus");
  compare->add_option("--manifest", compare_args.manifest_path, "test manifest");
  compare->add_option("--model", compare_args.model_path, "model file");
  compare->add_option("--report-out", compare_args.report_out, "JSON report path");
  add_pipeline_flags(compare, compare_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto maybe_print_config = [](const CommonOptions& opt) {
    if (!opt.print_config) return false;
    std::cout << canonical_config(opt);
    return true;
  };

  if (gen->parsed()) return run_guarded([&] { return cmd_generate(gen_args); });
  if (pre->parsed()) {
    return run_guarded([&] {
      finalize_config(pre_args.common);
      if (maybe_print_config(pre_args.common)) return 0;
      return cmd_preprocess(pre_args);
    });
  }
  if (seg->parsed()) {
    return run_guarded([&] {
      finalize_config(seg_args.common);
      if (maybe_print_config(seg_args.common)) return 0;
      return cmd_segment(seg_args);
    });
  }
  if (train->parsed()) {
    return run_guarded([&] {
      finalize_config(train_args.common);
      if (maybe_print_config(train_args.common)) return 0;
      return cmd_train(train_args);
    });
  }
  if (predict->parsed()) {
    return run_guarded([&] {
      finalize_config(predict_args.common);
      if (maybe_print_config(predict_args.common)) return 0;
      return cmd_predict(predict_args);
    });
  }
  if (eval->parsed()) return run_guarded([&] { return cmd_evaluate(eval_args); });
  if (compare->parsed()) {
    return run_guarded([&] {
      finalize_config(compare_args.common);
      if (maybe_print_config(compare_args.common)) return 0;
      return cmd_compare(compare_args);
    });
  }
  return 2;
}
