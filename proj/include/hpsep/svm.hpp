#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hpsep/features.hpp"

namespace hpsep {

/// Word classes. Values double as the ground-truth raster codes.
enum class LabelClass : std::uint8_t { Handwritten = 1, Printed = 2, Noise = 3 };

const char* to_string(LabelClass c);
LabelClass label_class_from_string(const std::string& name);

struct KernelParams {
  double gamma = 1.0 / kFeatureCount;
  double C = 10.0;
  double tol = 1e-3;        // KKT stopping tolerance
  long max_passes = 200000; // cap on two-variable optimization steps
};

/// Gaussian kernel exp(-gamma * |x - y|^2). Throws on dimension mismatch.
double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double gamma);

struct BinarySvmModel {
  std::vector<Eigen::VectorXd> support_vectors;
  std::vector<double> alphas; // signed coefficients alpha_i * y_i
  double bias = 0.0;
  KernelParams params;
  // The +1 class first, the -1 class second.
  std::pair<LabelClass, LabelClass> pair{LabelClass::Handwritten, LabelClass::Printed};
};

/// SMO dual solver: repeatedly optimizes the maximal-KKT-violating pair
/// (deterministic ascending-index scan) until the violation gap is within
/// tol or max_passes steps ran. Labels must be -1/+1 with both present.
BinarySvmModel train_binary(const std::vector<Eigen::VectorXd>& samples,
                            const std::vector<int>& labels,
                            const KernelParams& params);

/// f(x) = sum_i alpha_i * kernel(sv_i, x) + bias.
double decision_value(const BinarySvmModel& model, const Eigen::VectorXd& x);

struct TrainingSet {
  std::vector<FeatureVector> samples;
  std::vector<LabelClass> labels;
};

struct MultiClassSvmModel {
  // Fixed pair order: (H,P), (H,N), (P,N).
  std::vector<BinarySvmModel> pairwise;
  NormalizationStats norm;
  std::string layout_version;
};

/// One binary model per class pair, trained on that pair's samples only,
/// sharing normalization stats fit on the full training set. Throws when a
/// class is missing, naming it.
MultiClassSvmModel train_multiclass(const TrainingSet& dataset, const KernelParams& params);

struct Prediction {
  LabelClass label = LabelClass::Noise;
  double confidence = 0.5; // in (0,1)
};

/// One-vs-one vote over the three pairwise models; ties broken by summed
/// |decision value|, then by the fixed class order H, P, N. Confidence is the
/// logistic of the mean signed margin toward the winner over the winner's two
/// models. Takes a raw (unnormalized) feature vector.
Prediction predict(const MultiClassSvmModel& model, const FeatureVector& x);

/// Versioned self-describing text format; doubles serialized with shortest
/// round-trip precision so a reloaded model reproduces decision values
/// bit-identically. load_model refuses files whose layout tag differs from
/// the running extractor.
void save_model(const MultiClassSvmModel& model, const std::string& path);
MultiClassSvmModel load_model(const std::string& path);

}  // namespace hpsep
