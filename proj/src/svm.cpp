#include "hpsep/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hpsep/errors.hpp"
#include "hpsep/raster.hpp"
#include "hpsep/textio.hpp"

namespace hpsep {

const char* to_string(LabelClass c) {
  switch (c) {
    case LabelClass::Handwritten: return "handwritten";
    case LabelClass::Printed: return "printed";
    case LabelClass::Noise: return "noise";
  }
  return "?";
}

LabelClass label_class_from_string(const std::string& name) {
  if (name == "handwritten") return LabelClass::Handwritten;
  if (name == "printed") return LabelClass::Printed;
  if (name == "noise") return LabelClass::Noise;
  throw FormatError("unknown label class: '" + name + "'");
}

double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double gamma) {
  if (x.size() != y.size()) throw ParamError("kernel: dimension mismatch");
  return std::exp(-gamma * (x - y).squaredNorm());
}

namespace {

void validate_params(const KernelParams& p) {
  if (p.gamma <= 0.0) throw ParamError("gamma must be positive");
  if (p.C <= 0.0) throw ParamError("C must be positive");
  if (p.tol <= 0.0) throw ParamError("tol must be positive");
  if (p.max_passes < 1) throw ParamError("max_passes must be >= 1");
}

Eigen::MatrixXd gram_matrix(const std::vector<Eigen::VectorXd>& samples, double gamma) {
  const int n = static_cast<int>(samples.size());
  const int d = static_cast<int>(samples[0].size());
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i) X.row(i) = samples[i];
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();
  Eigen::MatrixXd dist2 = -2.0 * (X * X.transpose());
  dist2.colwise() += sq;
  dist2.rowwise() += sq.transpose();
  Eigen::MatrixXd K = (-gamma * dist2.cwiseMax(0.0)).array().exp();
  K.diagonal().setOnes();
  return K;
}

}  // namespace

BinarySvmModel train_binary(const std::vector<Eigen::VectorXd>& samples,
                            const std::vector<int>& labels,
                            const KernelParams& params) {
  validate_params(params);
  const int n = static_cast<int>(samples.size());
  if (n < 2 || labels.size() != samples.size())
    throw ParamError("train_binary: need >= 2 samples with matching labels");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw ParamError("train_binary: labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw ParamError("degenerate training set");
  for (const auto& s : samples)
    if (s.size() != samples[0].size())
      throw ParamError("train_binary: inconsistent sample dimensions");

  const Eigen::MatrixXd K = gram_matrix(samples, params.gamma);
  const double C = params.C;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n); // f_k = sum_j alpha_j y_j K_jk

  // v_k = y_k - f_k. A point enters I_up when its signed alpha can still
  // grow, I_low when it can shrink; optimality is max(v|I_up) - min(v|I_low)
  // <= tol (all KKT violations within tolerance).
  auto in_up = [&](int i) { return labels[i] == 1 ? alpha[i] < C : alpha[i] > 0.0; };
  auto in_low = [&](int i) { return labels[i] == 1 ? alpha[i] > 0.0 : alpha[i] < C; };

  double m = 0.0, M = 0.0;
  auto scan_violators = [&](int& i_up, int& j_low) {
    i_up = -1;
    j_low = -1;
    for (int i = 0; i < n; ++i) {
      const double v = labels[i] - f[i];
      if (in_up(i) && (i_up < 0 || v > m)) { m = v; i_up = i; }
      if (in_low(i) && (j_low < 0 || v < M)) { M = v; j_low = i; }
    }
  };

  for (long pass = 0; pass < params.max_passes; ++pass) {
    int i, j;
    scan_violators(i, j);
    if (i < 0 || j < 0 || m - M <= params.tol) break;

    const double a = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), 1e-12);
    const double room_i = labels[i] == 1 ? C - alpha[i] : alpha[i];
    const double room_j = labels[j] == 1 ? alpha[j] : C - alpha[j];
    const double t = std::min({(m - M) / a, room_i, room_j});
    if (t <= 0.0) break;

    // Land exactly on the box bound when the step is room-limited, so the
    // I_up/I_low membership tests stay exact.
    if (t == room_i) alpha[i] = labels[i] == 1 ? C : 0.0;
    else alpha[i] += labels[i] * t;
    if (t == room_j) alpha[j] = labels[j] == 1 ? 0.0 : C;
    else alpha[j] -= labels[j] * t;
    f += t * (K.col(i) - K.col(j));
  }

  // Bias: v of any unbounded support vector equals b at the optimum; average
  // them, or fall back to the violation-gap midpoint when all are at bounds.
  {
    int i, j;
    scan_violators(i, j);
  }
  double bias_sum = 0.0;
  int free_count = 0;
  for (int i = 0; i < n; ++i)
    if (alpha[i] > 0.0 && alpha[i] < C) {
      bias_sum += labels[i] - f[i];
      ++free_count;
    }

  BinarySvmModel model;
  model.params = params;
  model.bias = free_count > 0 ? bias_sum / free_count : (m + M) / 2.0;
  for (int i = 0; i < n; ++i)
    if (alpha[i] > 1e-12) {
      model.support_vectors.push_back(samples[i]);
      model.alphas.push_back(alpha[i] * labels[i]);
    }
  return model;
}

double decision_value(const BinarySvmModel& model, const Eigen::VectorXd& x) {
  double f = model.bias;
  for (size_t i = 0; i < model.support_vectors.size(); ++i)
    f += model.alphas[i] * kernel(model.support_vectors[i], x, model.params.gamma);
  return f;
}

namespace {

constexpr LabelClass kClassOrder[3] = {LabelClass::Handwritten, LabelClass::Printed,
                                       LabelClass::Noise};
constexpr std::pair<LabelClass, LabelClass> kPairOrder[3] = {
    {LabelClass::Handwritten, LabelClass::Printed},
    {LabelClass::Handwritten, LabelClass::Noise},
    {LabelClass::Printed, LabelClass::Noise}};

}  // namespace

MultiClassSvmModel train_multiclass(const TrainingSet& dataset, const KernelParams& params) {
  validate_params(params);
  if (dataset.samples.size() != dataset.labels.size())
    throw ParamError("train_multiclass: sample/label count mismatch");
  for (LabelClass c : kClassOrder)
    if (std::find(dataset.labels.begin(), dataset.labels.end(), c) == dataset.labels.end())
      throw ParamError(std::string("missing class: ") + to_string(c));

  MultiClassSvmModel model;
  model.layout_version = kFeatureLayoutVersion;
  model.norm = fit_normalization(dataset.samples);

  std::vector<Eigen::VectorXd> normalized;
  normalized.reserve(dataset.samples.size());
  for (const FeatureVector& v : dataset.samples)
    normalized.push_back(apply_normalization(v, model.norm));

  for (const auto& [pos, neg] : kPairOrder) {
    std::vector<Eigen::VectorXd> subset;
    std::vector<int> labels;
    for (size_t i = 0; i < normalized.size(); ++i) {
      if (dataset.labels[i] == pos) {
        subset.push_back(normalized[i]);
        labels.push_back(1);
      } else if (dataset.labels[i] == neg) {
        subset.push_back(normalized[i]);
        labels.push_back(-1);
      }
    }
    BinarySvmModel binary = train_binary(subset, labels, params);
    binary.pair = {pos, neg};
    model.pairwise.push_back(std::move(binary));
  }
  return model;
}

Prediction predict(const MultiClassSvmModel& model, const FeatureVector& x) {
  if (model.layout_version != kFeatureLayoutVersion)
    throw VersionError("model layout '" + model.layout_version +
                       "' does not match extractor '" + kFeatureLayoutVersion + "'");
  if (model.pairwise.size() != 3)
    throw FormatError("multiclass model must hold exactly 3 pairwise models");

  const Eigen::VectorXd nx = apply_normalization(x, model.norm);
  double decisions[3];
  for (int i = 0; i < 3; ++i) decisions[i] = decision_value(model.pairwise[i], nx);

  auto class_index = [](LabelClass c) {
    return static_cast<int>(c) - 1; // H=0, P=1, N=2
  };
  int votes[3] = {};
  double abs_sum[3] = {};
  for (int i = 0; i < 3; ++i) {
    const auto& [pos, neg] = model.pairwise[i].pair;
    votes[class_index(decisions[i] > 0.0 ? pos : neg)] += 1;
    abs_sum[class_index(pos)] += std::abs(decisions[i]);
    abs_sum[class_index(neg)] += std::abs(decisions[i]);
  }
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (votes[c] > votes[best] ||
        (votes[c] == votes[best] && abs_sum[c] > abs_sum[best]))
      best = c;
  }

  double margin_sum = 0.0;
  int margin_count = 0;
  for (int i = 0; i < 3; ++i) {
    const auto& [pos, neg] = model.pairwise[i].pair;
    if (class_index(pos) == best) {
      margin_sum += decisions[i];
      ++margin_count;
    } else if (class_index(neg) == best) {
      margin_sum -= decisions[i];
      ++margin_count;
    }
  }
  Prediction out;
  out.label = kClassOrder[best];
  out.confidence = 1.0 / (1.0 + std::exp(-margin_sum / margin_count));
  return out;
}

namespace {

constexpr const char* kModelMagic = "hpsep-svm-model";
constexpr int kModelFormatVersion = 1;

void append_vector(std::string& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += ' ';
    out += format_double(v[i]);
  }
}

// Line-oriented tokenizer with 1-based line numbers for error messages.
struct LineReader {
  std::istringstream stream;
  int line_no = 0;

  explicit LineReader(std::string text) : stream(std::move(text)) {}

  std::vector<std::string> next(const std::string& expected_key) {
    std::string line;
    while (std::getline(stream, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (tokens.empty()) continue;
      if (tokens[0] != expected_key)
        throw FormatError("model file line " + std::to_string(line_no) +
                          ": expected '" + expected_key + "', got '" + tokens[0] + "'");
      return tokens;
    }
    throw FormatError("model file: unexpected end of file, expected '" +
                      expected_key + "'");
  }
};

Eigen::VectorXd parse_vector(const std::vector<std::string>& tokens, size_t from,
                             int dim, int line_no) {
  if (tokens.size() != from + static_cast<size_t>(dim))
    throw FormatError("model file line " + std::to_string(line_no) + ": expected " +
                      std::to_string(dim) + " values");
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = parse_double(tokens[from + i]);
  return v;
}

}  // namespace

void save_model(const MultiClassSvmModel& model, const std::string& path) {
  std::string out;
  out += kModelMagic;
  out += ' ';
  out += std::to_string(kModelFormatVersion);
  out += '\n';
  out += "layout " + model.layout_version + '\n';
  out += "dim " + std::to_string(kFeatureCount) + '\n';
  out += "norm_mean";
  append_vector(out, model.norm.mean);
  out += '\n';
  out += "norm_stddev";
  append_vector(out, model.norm.stddev);
  out += '\n';
  out += "pairs " + std::to_string(model.pairwise.size()) + '\n';
  for (const BinarySvmModel& m : model.pairwise) {
    out += std::string("pair ") + to_string(m.pair.first) + ' ' + to_string(m.pair.second) + '\n';
    out += "gamma " + format_double(m.params.gamma) + '\n';
    out += "c " + format_double(m.params.C) + '\n';
    out += "tol " + format_double(m.params.tol) + '\n';
    out += "max_passes " + std::to_string(m.params.max_passes) + '\n';
    out += "bias " + format_double(m.bias) + '\n';
    out += "support_vectors " + std::to_string(m.support_vectors.size()) + '\n';
    for (size_t i = 0; i < m.support_vectors.size(); ++i) {
      out += "sv " + format_double(m.alphas[i]);
      append_vector(out, m.support_vectors[i]);
      out += '\n';
    }
  }
  out += "end\n";
  write_file_atomic(path, out);
}

MultiClassSvmModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  LineReader reader(buffer.str());

  auto magic = reader.next(kModelMagic);
  if (magic.size() != 2) throw FormatError("model file: malformed header");
  if (parse_long(magic[1]) != kModelFormatVersion)
    throw VersionError("unsupported model format version " + magic[1]);

  MultiClassSvmModel model;
  auto layout = reader.next("layout");
  if (layout.size() != 2) throw FormatError("model file: malformed layout line");
  model.layout_version = layout[1];
  if (model.layout_version != kFeatureLayoutVersion)
    throw VersionError("model layout '" + model.layout_version +
                       "' does not match extractor '" + kFeatureLayoutVersion + "'");

  auto dim_line = reader.next("dim");
  if (dim_line.size() != 2 || parse_long(dim_line[1]) != kFeatureCount)
    throw VersionError("model dimension does not match the 35-slot layout");
  const int dim = kFeatureCount;

  model.norm.mean = parse_vector(reader.next("norm_mean"), 1, dim, reader.line_no);
  model.norm.stddev = parse_vector(reader.next("norm_stddev"), 1, dim, reader.line_no);

  auto pairs_line = reader.next("pairs");
  if (pairs_line.size() != 2) throw FormatError("model file: malformed pairs line");
  const long n_pairs = parse_long(pairs_line[1]);
  if (n_pairs != 3) throw FormatError("model file: expected 3 pairwise models");

  for (long p = 0; p < n_pairs; ++p) {
    BinarySvmModel binary;
    auto pair_line = reader.next("pair");
    if (pair_line.size() != 3) throw FormatError("model file: malformed pair line");
    binary.pair = {label_class_from_string(pair_line[1]),
                   label_class_from_string(pair_line[2])};
    auto gamma_line = reader.next("gamma");
    if (gamma_line.size() != 2) throw FormatError("model file: malformed gamma line");
    binary.params.gamma = parse_double(gamma_line[1]);
    auto c_line = reader.next("c");
    if (c_line.size() != 2) throw FormatError("model file: malformed c line");
    binary.params.C = parse_double(c_line[1]);
    auto tol_line = reader.next("tol");
    if (tol_line.size() != 2) throw FormatError("model file: malformed tol line");
    binary.params.tol = parse_double(tol_line[1]);
    auto passes_line = reader.next("max_passes");
    if (passes_line.size() != 2) throw FormatError("model file: malformed max_passes line");
    binary.params.max_passes = parse_long(passes_line[1]);
    auto bias_line = reader.next("bias");
    if (bias_line.size() != 2) throw FormatError("model file: malformed bias line");
    binary.bias = parse_double(bias_line[1]);
    auto count_line = reader.next("support_vectors");
    if (count_line.size() != 2)
      throw FormatError("model file: malformed support_vectors line");
    const long n_sv = parse_long(count_line[1]);
    if (n_sv < 0) throw FormatError("model file: negative support vector count");
    for (long s = 0; s < n_sv; ++s) {
      auto sv_line = reader.next("sv");
      if (sv_line.size() != 2 + static_cast<size_t>(dim))
        throw FormatError("model file line " + std::to_string(reader.line_no) +
                          ": malformed sv line");
      binary.alphas.push_back(parse_double(sv_line[1]));
      binary.support_vectors.push_back(parse_vector(sv_line, 2, dim, reader.line_no));
    }
    model.pairwise.push_back(std::move(binary));
  }
  reader.next("end");
  return model;
}

}  // namespace hpsep
