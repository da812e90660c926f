#include "hpsep/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hpsep/errors.hpp"

namespace hpsep {

LabeledWord make_labeled_word(PseudoWord word, LabelClass label, double confidence) {
  LabeledWord lw;
  lw.label = label;
  lw.confidence = confidence;
  double ink = 0.0, sx = 0.0, sy = 0.0;
  for (const ConnectedComponent& cc : word.components) {
    ink += cc.pixel_count;
    sx += cc.centroid_x * cc.pixel_count;
    sy += cc.centroid_y * cc.pixel_count;
  }
  if (ink > 0.0) {
    lw.centroid_x = sx / ink;
    lw.centroid_y = sy / ink;
  }
  lw.word = std::move(word);
  return lw;
}

double weighted_distance2(double ax, double ay, double bx, double by,
                          const DistanceWeights& w) {
  const double dx = ax - bx, dy = ay - by;
  return dx * dx * w.wx * w.wx + dy * dy * w.wy * w.wy;
}

double weighted_distance(const LabeledWord& a, const LabeledWord& b,
                         const DistanceWeights& w) {
  return std::sqrt(
      weighted_distance2(a.centroid_x, a.centroid_y, b.centroid_x, b.centroid_y, w));
}

double bbox_distance(const LabeledWord& a, const LabeledWord& b) {
  const BoundingBox& p = a.word.bbox;
  const BoundingBox& q = b.word.bbox;
  const double gx = std::max({0, std::max(p.x_min, q.x_min) - std::min(p.x_max, q.x_max) - 1});
  const double gy = std::max({0, std::max(p.y_min, q.y_min) - std::min(p.y_max, q.y_max) - 1});
  return std::sqrt(gx * gx + gy * gy);
}

namespace {

// Candidate ranking key: ascending distance key (squared distance for the
// kd-tree, plain edge distance for the bbox scan), then ascending word id.
struct HeapEntry {
  double key;
  int id;
  int index;
  bool operator<(const HeapEntry& other) const {
    return key != other.key ? key < other.key : id < other.id;
  }
};

}  // namespace

SpatialIndex::SpatialIndex(std::vector<LabeledWord> words, const DistanceWeights& weights,
                           int leaf_size)
    : words_(std::move(words)), weights_(weights), leaf_size_(std::max(1, leaf_size)) {
  if (weights_.wx <= 0.0 || weights_.wy <= 0.0)
    throw ParamError("distance weights must be positive");
  if (words_.empty()) return;
  xs_.reserve(words_.size());
  ys_.reserve(words_.size());
  ids_.reserve(words_.size());
  for (const LabeledWord& w : words_) {
    xs_.push_back(w.centroid_x);
    ys_.push_back(w.centroid_y);
    ids_.push_back(w.word.id);
  }
  std::vector<int> order(words_.size());
  std::iota(order.begin(), order.end(), 0);
  nodes_.reserve(2 * words_.size() / static_cast<size_t>(leaf_size_) + 8);
  root_ = build(order, 0, static_cast<int>(order.size()), 0);
  order_ = std::move(order);
}

int SpatialIndex::build(std::vector<int>& order, int begin, int end, int axis) {
  Node node;
  node.axis = axis;
  if (end - begin <= leaf_size_) {
    node.leaf = true;
    node.begin = begin;
    node.end = end;
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }
  const int mid = (begin + end) / 2;
  auto coord = [&](int i) { return axis == 0 ? xs_[i] : ys_[i]; };
  std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                   [&](int a, int b) {
                     const double ca = coord(a), cb = coord(b);
                     return ca != cb ? ca < cb : ids_[a] < ids_[b];
                   });
  node.point = order[mid];
  node.split = coord(order[mid]);
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int left = build(order, begin, mid, 1 - axis);
  const int right = build(order, mid + 1, end, 1 - axis);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

std::vector<NeighborHit> SpatialIndex::knn(const LabeledWord& query, int k,
                                           double max_dist) const {
  std::vector<NeighborHit> out;
  if (k < 1) throw ParamError("knn: k must be >= 1");
  if (words_.empty() || max_dist < 0.0) return out;
  const double max_d2 = max_dist * max_dist;
  const double qx = query.centroid_x, qy = query.centroid_y;

  // Bounded max-heap of the best k candidates; worst candidate on top.
  std::vector<HeapEntry> heap;
  heap.reserve(static_cast<size_t>(k) + 1);
  auto worse = [](const HeapEntry& a, const HeapEntry& b) { return a < b; };

  auto consider = [&](int i) {
    if (ids_[i] == query.word.id) return;
    const double d2 = weighted_distance2(qx, qy, xs_[i], ys_[i], weights_);
    if (d2 > max_d2) return;
    const HeapEntry entry{d2, ids_[i], i};
    if (static_cast<int>(heap.size()) < k) {
      heap.push_back(entry);
      std::push_heap(heap.begin(), heap.end(), worse);
    } else if (entry < heap.front()) {
      std::pop_heap(heap.begin(), heap.end(), worse);
      heap.back() = entry;
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  };

  // Iterative depth-first descent, nearer child first. A subtree is skipped
  // only when the weighted axis distance alone already exceeds the cutoff or
  // is strictly worse than the current k-th candidate (ties must descend: an
  // equal distance can still win on the id rule).
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int ni = stack.back();
    stack.pop_back();
    if (ni < 0) continue;
    const Node& node = nodes_[ni];
    if (node.leaf) {
      for (int o = node.begin; o < node.end; ++o) consider(order_[o]);
      continue;
    }
    consider(node.point);
    const double qc = node.axis == 0 ? qx : qy;
    const double wgt = node.axis == 0 ? weights_.wx : weights_.wy;
    const double axis_diff = (qc - node.split) * wgt;
    const double axis_d2 = axis_diff * axis_diff;
    const int near = qc < node.split ? node.left : node.right;
    const int far = qc < node.split ? node.right : node.left;
    bool visit_far = axis_d2 <= max_d2;
    if (visit_far && static_cast<int>(heap.size()) == k && axis_d2 > heap.front().key)
      visit_far = false;
    if (visit_far) stack.push_back(far);
    stack.push_back(near); // processed first (LIFO)
  }

  std::sort(heap.begin(), heap.end());
  out.reserve(heap.size());
  for (const HeapEntry& e : heap)
    out.push_back({&words_[e.index], std::sqrt(e.key)});
  return out;
}

SpatialIndex build_index(std::vector<LabeledWord> words, const DistanceWeights& weights) {
  return SpatialIndex(std::move(words), weights);
}

std::vector<NeighborHit> knn(const SpatialIndex& index, const LabeledWord& word,
                             int k, double max_dist) {
  return index.knn(word, k, max_dist);
}

std::vector<NeighborHit> knn_bbox(const std::vector<LabeledWord>& words,
                                  const LabeledWord& query, int k, double max_dist) {
  if (k < 1) throw ParamError("knn_bbox: k must be >= 1");
  std::vector<HeapEntry> hits;
  for (size_t i = 0; i < words.size(); ++i) {
    if (words[i].word.id == query.word.id) continue;
    const double d = bbox_distance(query, words[i]);
    if (d > max_dist) continue;
    hits.push_back({d, words[i].word.id, static_cast<int>(i)});
  }
  std::sort(hits.begin(), hits.end());
  if (static_cast<int>(hits.size()) > k) hits.resize(static_cast<size_t>(k));
  std::vector<NeighborHit> out;
  out.reserve(hits.size());
  for (const HeapEntry& e : hits)
    out.push_back({&words[e.index], e.key});
  return out;
}

namespace {

// Strict-majority label among the hits, if any: the label held by more than
// half of the found neighbors. Returns false when no label qualifies.
bool majority_label(const std::vector<NeighborHit>& hits, LabelClass& out) {
  if (hits.empty()) return false;
  int counts[4] = {};
  for (const NeighborHit& h : hits) counts[static_cast<int>(h.word->label)] += 1;
  const int n = static_cast<int>(hits.size());
  for (LabelClass c : {LabelClass::Handwritten, LabelClass::Printed, LabelClass::Noise}) {
    if (2 * counts[static_cast<int>(c)] > n) {
      out = c;
      return true;
    }
  }
  return false;
}

}  // namespace

namespace {

// Shared A1/A2 core. The neighbor provider must serve pre-pass labels (the
// index copy, or the untouched input vector for the brute-force metric), so
// the pass stays synchronized: decisions never see already-applied flips.
template <typename NeighborsOf>
std::vector<LabeledWord> majority_pass(const std::vector<LabeledWord>& words,
                                       NeighborsOf&& neighbors_of, bool area_guard) {
  std::vector<LabeledWord> out = words;
  for (LabeledWord& w : out) {
    const std::vector<NeighborHit> hits = neighbors_of(w);
    LabelClass majority;
    if (!majority_label(hits, majority) || majority == w.label) continue;
    if (area_guard) {
      double majority_area = 0.0;
      for (const NeighborHit& h : hits)
        if (h.word->label == majority) majority_area += h.word->word.pixel_count;
      if (!(majority_area > 0.5 * w.word.pixel_count)) continue;
    }
    w.label = majority;
  }
  return out;
}

template <typename NeighborsOf>
std::vector<LabeledWord> confidence_pass(const std::vector<LabeledWord>& words,
                                         NeighborsOf&& neighbors_of,
                                         double (*weigh)(double, double)) {
  std::vector<LabeledWord> out = words;
  for (LabeledWord& w : out) {
    const std::vector<NeighborHit> hits = neighbors_of(w);
    if (hits.empty()) continue;
    const NeighborHit& nb = hits.front();
    if (weigh(nb.word->confidence, nb.distance) > w.confidence)
      w.label = nb.word->label;
  }
  return out;
}

double (*law_function(ConfidenceLaw law))(double, double) {
  switch (law) {
    case ConfidenceLaw::Gauss: return f_gauss;
    case ConfidenceLaw::Poly2: return f_poly2;
    case ConfidenceLaw::Poly4: return f_poly4;
  }
  throw ParamError("unknown confidence law");
}

}  // namespace

std::vector<LabeledWord> regroup_knn(const std::vector<LabeledWord>& words,
                                     const SpatialIndex& index, int k, double max_dist) {
  return majority_pass(
      words, [&](const LabeledWord& w) { return index.knn(w, k, max_dist); }, false);
}

std::vector<LabeledWord> regroup_constrained(const std::vector<LabeledWord>& words,
                                             const SpatialIndex& index, int k,
                                             double max_dist) {
  return majority_pass(
      words, [&](const LabeledWord& w) { return index.knn(w, k, max_dist); }, true);
}

std::vector<LabeledWord> regroup_knn_bbox(const std::vector<LabeledWord>& words, int k,
                                          double max_dist) {
  return majority_pass(
      words, [&](const LabeledWord& w) { return knn_bbox(words, w, k, max_dist); }, false);
}

std::vector<LabeledWord> regroup_constrained_bbox(const std::vector<LabeledWord>& words,
                                                  int k, double max_dist) {
  return majority_pass(
      words, [&](const LabeledWord& w) { return knn_bbox(words, w, k, max_dist); }, true);
}

double f_gauss(double conf, double dist) {
  if (conf <= 0.0) throw ParamError("confidence must be positive");
  return conf * std::exp(-1e-3 * dist * dist / (conf * conf));
}

double f_poly2(double conf, double dist) {
  if (conf <= 0.0) throw ParamError("confidence must be positive");
  const double r = (dist - 1.0) / conf;
  return -5e-4 * r * r + conf;
}

double f_poly4(double conf, double dist) {
  if (conf <= 0.0) throw ParamError("confidence must be positive");
  const double r = (dist - 1.0) / conf;
  return -1e-6 * r * r * r * r + conf;
}

std::vector<LabeledWord> regroup_confidence(const std::vector<LabeledWord>& words,
                                            const SpatialIndex& index,
                                            ConfidenceLaw law, double max_dist) {
  return confidence_pass(
      words, [&](const LabeledWord& w) { return index.knn(w, 1, max_dist); },
      law_function(law));
}

std::vector<LabeledWord> regroup_confidence_bbox(const std::vector<LabeledWord>& words,
                                                 ConfidenceLaw law, double max_dist) {
  return confidence_pass(
      words, [&](const LabeledWord& w) { return knn_bbox(words, w, 1, max_dist); },
      law_function(law));
}

const char* to_string(GroupingMethod m) {
  switch (m) {
    case GroupingMethod::None: return "none";
    case GroupingMethod::Knn: return "knn";
    case GroupingMethod::KnnConstrained: return "knn-constrained";
    case GroupingMethod::ConfGauss: return "gauss";
    case GroupingMethod::ConfPoly2: return "poly2";
    case GroupingMethod::ConfPoly4: return "poly4";
  }
  return "?";
}

const char* to_string(NeighborMetric m) {
  switch (m) {
    case NeighborMetric::Centroid: return "centroid";
    case NeighborMetric::BBox: return "bbox";
  }
  return "?";
}

NeighborMetric neighbor_metric_from_string(const std::string& name) {
  if (name == "centroid") return NeighborMetric::Centroid;
  if (name == "bbox") return NeighborMetric::BBox;
  throw ParamError("unknown neighbor metric: '" + name + "'");
}

GroupingMethod grouping_method_from_string(const std::string& name) {
  if (name == "none") return GroupingMethod::None;
  if (name == "knn") return GroupingMethod::Knn;
  if (name == "knn-constrained") return GroupingMethod::KnnConstrained;
  if (name == "gauss") return GroupingMethod::ConfGauss;
  if (name == "poly2") return GroupingMethod::ConfPoly2;
  if (name == "poly4") return GroupingMethod::ConfPoly4;
  throw ParamError("unknown grouping method: '" + name + "'");
}

}  // namespace hpsep
