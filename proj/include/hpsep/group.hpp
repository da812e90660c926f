#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hpsep/segment.hpp"
#include "hpsep/svm.hpp"

namespace hpsep {

struct LabeledWord {
  PseudoWord word;
  LabelClass label = LabelClass::Noise;
  double confidence = 0.5; // in (0,1)
  double centroid_x = 0.0; // center of gravity of the word's ink
  double centroid_y = 0.0;
};

/// Builds a LabeledWord with the ink centroid filled in from the components.
LabeledWord make_labeled_word(PseudoWord word, LabelClass label, double confidence);

struct DistanceWeights {
  double wx = 1.0;
  double wy = 3.0; // vertical distance penalized: horizontal proximity preferred
};

/// Squared weighted centroid distance dx^2*wx^2 + dy^2*wy^2. All neighbor
/// ordering (kd-tree and any reference scan) must flow through this exact
/// arithmetic so results are comparable bit-for-bit.
double weighted_distance2(double ax, double ay, double bx, double by,
                          const DistanceWeights& w);

/// sqrt((x1-x2)^2*wx^2 + (y1-y2)^2*wy^2) between word ink centroids.
double weighted_distance(const LabeledWord& a, const LabeledWord& b,
                         const DistanceWeights& w);

/// Euclidean gap between closest bounding-box edges: per axis
/// max(0, max(min_a, min_b) - min(max_a, max_b) - 1), combined Euclidean.
/// 0 when the boxes overlap or touch.
double bbox_distance(const LabeledWord& a, const LabeledWord& b);

struct NeighborHit {
  const LabeledWord* word = nullptr;
  double distance = 0.0;
};

/// kd-tree over word centroids in the weighted metric. Holds its own copy of
/// the words, so regroupers naturally read pre-pass labels from it. Queries
/// return results identical to a brute-force scan: ordered by ascending
/// (squared distance, word id).
class SpatialIndex {
 public:
  SpatialIndex() = default;
  SpatialIndex(std::vector<LabeledWord> words, const DistanceWeights& weights,
               int leaf_size = 16);

  /// Up to k nearest indexed words with distance <= max_dist, excluding any
  /// indexed word whose id equals query.word.id.
  std::vector<NeighborHit> knn(const LabeledWord& query, int k, double max_dist) const;

  const std::vector<LabeledWord>& words() const { return words_; }
  bool empty() const { return words_.empty(); }

 private:
  struct Node {
    int axis = 0;        // 0 = x, 1 = y
    double split = 0.0;  // splitting coordinate (unweighted)
    int point = -1;      // word index stored at this node
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf: range into order_
    bool leaf = false;
  };
  int build(std::vector<int>& order, int begin, int end, int axis);

  std::vector<LabeledWord> words_;
  DistanceWeights weights_;
  int leaf_size_ = 16;
  std::vector<Node> nodes_;
  std::vector<int> order_; // leaf nodes index word ranges through this
  // Flat copies of the per-word search state, so traversal stays in compact
  // contiguous memory instead of striding through the full word structs.
  std::vector<double> xs_, ys_;
  std::vector<int> ids_;
  int root_ = -1;
};

SpatialIndex build_index(std::vector<LabeledWord> words, const DistanceWeights& weights);

std::vector<NeighborHit> knn(const SpatialIndex& index, const LabeledWord& word,
                             int k, double max_dist);

/// Brute-force k-NN under the bounding-box edge distance (the kd-tree covers
/// only the centroid metric). Same ordering and tie rules.
std::vector<NeighborHit> knn_bbox(const std::vector<LabeledWord>& words,
                                  const LabeledWord& query, int k, double max_dist);

/// A1 — plain k-NN majority. One synchronized pass: decisions are computed
/// from the index's (pre-pass) labels, then applied; a word flips only when
/// a strict majority (> n/2 of its found neighbors) shares one label.
std::vector<LabeledWord> regroup_knn(const std::vector<LabeledWord>& words,
                                     const SpatialIndex& index, int k, double max_dist);

/// A2 — as A1 plus the area constraint: the flip applies only when the
/// majority neighbors' summed ink area strictly exceeds half the word's own.
std::vector<LabeledWord> regroup_constrained(const std::vector<LabeledWord>& words,
                                             const SpatialIndex& index, int k,
                                             double max_dist);

/// Confidence-vs-distance weighting laws. conf must be positive.
enum class ConfidenceLaw { Gauss, Poly2, Poly4 };

double f_gauss(double conf, double dist);
double f_poly2(double conf, double dist);
double f_poly4(double conf, double dist);

/// The same passes under the bounding-box edge distance instead of the
/// weighted centroid metric, typically run with the tighter 100 px cutoff.
std::vector<LabeledWord> regroup_knn_bbox(const std::vector<LabeledWord>& words, int k,
                                          double max_dist);
std::vector<LabeledWord> regroup_constrained_bbox(const std::vector<LabeledWord>& words,
                                                  int k, double max_dist);
std::vector<LabeledWord> regroup_confidence_bbox(const std::vector<LabeledWord>& words,
                                                 ConfidenceLaw law, double max_dist);

enum class NeighborMetric { Centroid, BBox };

const char* to_string(NeighborMetric m);
NeighborMetric neighbor_metric_from_string(const std::string& name);

/// A3 — confidence voting: each word looks at its single nearest neighbor
/// within max_dist; when law(conf_neighbor, dist) exceeds the word's own
/// confidence the word adopts the neighbor's pre-pass label.
std::vector<LabeledWord> regroup_confidence(const std::vector<LabeledWord>& words,
                                            const SpatialIndex& index,
                                            ConfidenceLaw law, double max_dist);

enum class GroupingMethod { None, Knn, KnnConstrained, ConfGauss, ConfPoly2, ConfPoly4 };

const char* to_string(GroupingMethod m);
GroupingMethod grouping_method_from_string(const std::string& name);

}  // namespace hpsep
