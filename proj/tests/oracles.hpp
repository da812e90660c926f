#pragma once

// Independent reference implementations that the tests compare the library
// against. Everything here is written the most direct way possible (per-pixel
// loops, brute-force scans, a different optimization algorithm for the SVM
// dual) and deliberately shares no code with the library beyond basic types
// and the distance/kernel formulas under test elsewhere.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hpsep/group.hpp"
#include "hpsep/raster.hpp"
#include "hpsep/rng.hpp"
#include "hpsep/segment.hpp"
#include "hpsep/svm.hpp"

namespace oracle {

// --- random rasters ----------------------------------------------------------

inline hpsep::BinaryImage random_image(hpsep::Rng& rng, int w, int h, double density) {
  hpsep::BinaryImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (rng.unit() < density) img.set(x, y, true);
    }
  }
  return img;
}

inline hpsep::LabelRaster random_labels(hpsep::Rng& rng, int w, int h, int max_label) {
  hpsep::LabelRaster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.set(x, y, static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(max_label) + 1)));
    }
  }
  return out;
}

// --- RLSA ---------------------------------------------------------------------

// Fills a white run iff it lies between two ink pixels of the same row and is
// no longer than the threshold.
inline hpsep::BinaryImage rlsa_horizontal(const hpsep::BinaryImage& in, int threshold) {
  hpsep::BinaryImage out = in;
  for (int y = 0; y < in.height(); ++y) {
    int prev_ink = -1;
    for (int x = 0; x < in.width(); ++x) {
      if (!in.get(x, y)) continue;
      if (prev_ink >= 0) {
        const int run = x - prev_ink - 1;
        if (run > 0 && run <= threshold) {
          for (int f = prev_ink + 1; f < x; ++f) out.set(f, y, true);
        }
      }
      prev_ink = x;
    }
  }
  return out;
}

inline hpsep::BinaryImage rlsa_vertical(const hpsep::BinaryImage& in, int threshold) {
  hpsep::BinaryImage out = in;
  for (int x = 0; x < in.width(); ++x) {
    int prev_ink = -1;
    for (int y = 0; y < in.height(); ++y) {
      if (!in.get(x, y)) continue;
      if (prev_ink >= 0) {
        const int run = y - prev_ink - 1;
        if (run > 0 && run <= threshold) {
          for (int f = prev_ink + 1; f < y; ++f) out.set(x, f, true);
        }
      }
      prev_ink = y;
    }
  }
  return out;
}

inline hpsep::BinaryImage image_and(const hpsep::BinaryImage& a, const hpsep::BinaryImage& b) {
  hpsep::BinaryImage out(a.width(), a.height(), a.dpi());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (a.get(x, y) && b.get(x, y)) out.set(x, y, true);
    }
  }
  return out;
}

// --- connected components (BFS flood fill) ------------------------------------

inline std::vector<std::vector<std::pair<int, int>>> components(
    const hpsep::BinaryImage& img, bool eight_connected) {
  const int w = img.width(), h = img.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.get(x, y) || seen[static_cast<std::size_t>(y) * w + x]) continue;
      std::vector<std::pair<int, int>> comp;
      queue.clear();
      queue.emplace_back(x, y);
      seen[static_cast<std::size_t>(y) * w + x] = 1;
      while (!queue.empty()) {
        const auto [cx, cy] = queue.back();
        queue.pop_back();
        comp.emplace_back(cx, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight_connected && dx != 0 && dy != 0) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (!img.get(nx, ny) || seen[static_cast<std::size_t>(ny) * w + nx]) continue;
            seen[static_cast<std::size_t>(ny) * w + nx] = 1;
            queue.emplace_back(nx, ny);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  }
  return out;
}

// --- kfill single pass ---------------------------------------------------------

// Direct restatement of the window rule. For every window whose (k-2)x(k-2)
// core overlaps the image: if the core is homogeneous of the color opposite
// the pass color, count the pass-colored perimeter cells (n), their circular
// runs, and the pass-colored window corners (r); the core flips iff the
// perimeter forms at most one run and n > 3k-4, or n == 3k-4 with exactly two
// corners. Cells outside the image read as white.
inline hpsep::BinaryImage kfill_pass(const hpsep::BinaryImage& in, int k, bool fill_black) {
  const int core = k - 2;
  const int n_threshold = 3 * k - 4;
  hpsep::BinaryImage out = in;
  auto at = [&](int x, int y) {
    return in.in_bounds(x, y) ? in.get(x, y) : false;
  };
  // Enumerate by core top-left corner so any window whose core overlaps the
  // image is visited exactly once.
  for (int cy0 = 1 - core; cy0 < in.height(); ++cy0) {
    for (int cx0 = 1 - core; cx0 < in.width(); ++cx0) {
      bool homogeneous = true;
      for (int dy = 0; dy < core && homogeneous; ++dy) {
        for (int dx = 0; dx < core && homogeneous; ++dx) {
          homogeneous = at(cx0 + dx, cy0 + dy) == !fill_black;
        }
      }
      if (!homogeneous) continue;

      const int wx = cx0 - 1, wy = cy0 - 1;  // window top-left
      std::vector<bool> ring;
      for (int x = 0; x < k; ++x) ring.push_back(at(wx + x, wy) == fill_black);
      for (int y = 1; y < k; ++y) ring.push_back(at(wx + k - 1, wy + y) == fill_black);
      for (int x = k - 2; x >= 0; --x) ring.push_back(at(wx + x, wy + k - 1) == fill_black);
      for (int y = k - 2; y >= 1; --y) ring.push_back(at(wx, wy + y) == fill_black);

      int n = 0, transitions = 0;
      for (std::size_t i = 0; i < ring.size(); ++i) {
        if (ring[i]) ++n;
        if (ring[i] != ring[(i + 1) % ring.size()]) ++transitions;
      }
      const int runs = n == 0 ? 0 : (transitions == 0 ? 1 : transitions / 2);
      if (runs != 1) continue;
      if (n < n_threshold) continue;
      if (n == n_threshold) {
        const int corners = (at(wx, wy) == fill_black) +
                            (at(wx + k - 1, wy) == fill_black) +
                            (at(wx, wy + k - 1) == fill_black) +
                            (at(wx + k - 1, wy + k - 1) == fill_black);
        if (corners != 2) continue;
      }
      for (int dy = 0; dy < core; ++dy) {
        for (int dx = 0; dx < core; ++dx) {
          if (in.in_bounds(cx0 + dx, cy0 + dy)) out.set(cx0 + dx, cy0 + dy, fill_black);
        }
      }
    }
  }
  return out;
}

// Full filter: alternate a fill-black pass and a fill-white pass (in that
// order) until an iteration changes nothing, at most five iterations.
inline hpsep::BinaryImage kfill(const hpsep::BinaryImage& in, int k) {
  hpsep::BinaryImage current = in;
  for (int iter = 0; iter < 5; ++iter) {
    const hpsep::BinaryImage a = kfill_pass(current, k, true);
    const hpsep::BinaryImage b = kfill_pass(a, k, false);
    const bool changed = !(a == current) || !(b == a);
    current = b;
    if (!changed) break;
  }
  return current;
}

// --- pixel recognition rates ----------------------------------------------------

struct RateResult {
  std::array<double, 3> rates{1.0, 1.0, 1.0};
  std::array<long long, 3> truth{};
  std::array<long long, 3> correct{};
  double micro = 1.0;
};

inline RateResult rate(const hpsep::LabelRaster& predicted, const hpsep::LabelRaster& truth) {
  RateResult r;
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) {
      const int t = truth.get(x, y);
      if (t < 1 || t > 3) continue;
      ++r.truth[static_cast<std::size_t>(t) - 1];
      if (predicted.get(x, y) == t) ++r.correct[static_cast<std::size_t>(t) - 1];
    }
  }
  long long truth_total = 0, correct_total = 0;
  for (int c = 0; c < 3; ++c) {
    truth_total += r.truth[static_cast<std::size_t>(c)];
    correct_total += r.correct[static_cast<std::size_t>(c)];
    if (r.truth[static_cast<std::size_t>(c)] > 0) {
      r.rates[static_cast<std::size_t>(c)] =
          static_cast<double>(r.correct[static_cast<std::size_t>(c)]) /
          static_cast<double>(r.truth[static_cast<std::size_t>(c)]);
    }
  }
  r.micro = truth_total > 0
                ? static_cast<double>(correct_total) / static_cast<double>(truth_total)
                : 1.0;
  return r;
}

// --- brute-force nearest neighbors ----------------------------------------------

struct KnnHit {
  double distance;
  int id;
};

inline std::vector<KnnHit> knn_centroid(const std::vector<hpsep::LabeledWord>& words,
                                        const hpsep::LabeledWord& query, int k,
                                        double max_dist, const hpsep::DistanceWeights& w) {
  std::vector<std::pair<double, int>> candidates;  // (squared distance, id)
  for (const hpsep::LabeledWord& other : words) {
    if (other.word.id == query.word.id) continue;
    const double d2 = hpsep::weighted_distance2(query.centroid_x, query.centroid_y,
                                                other.centroid_x, other.centroid_y, w);
    if (d2 > max_dist * max_dist) continue;
    candidates.emplace_back(d2, other.word.id);
  }
  std::sort(candidates.begin(), candidates.end());
  if (static_cast<int>(candidates.size()) > k) candidates.resize(static_cast<std::size_t>(k));
  std::vector<KnnHit> out;
  for (const auto& [d2, id] : candidates) out.push_back({std::sqrt(d2), id});
  return out;
}

inline std::vector<KnnHit> knn_bbox(const std::vector<hpsep::LabeledWord>& words,
                                    const hpsep::LabeledWord& query, int k,
                                    double max_dist) {
  std::vector<std::pair<double, int>> candidates;
  for (const hpsep::LabeledWord& other : words) {
    if (other.word.id == query.word.id) continue;
    const double d = hpsep::bbox_distance(query, other);
    if (d > max_dist) continue;
    candidates.emplace_back(d, other.word.id);
  }
  std::sort(candidates.begin(), candidates.end());
  if (static_cast<int>(candidates.size()) > k) candidates.resize(static_cast<std::size_t>(k));
  std::vector<KnnHit> out;
  for (const auto& [d, id] : candidates) out.push_back({d, id});
  return out;
}

// --- grouping pseudo-code transcription ------------------------------------------

// For each word: take the k nearest labeled neighbors within the cutoff;
// if some class holds a strict count majority (> n/2) — and, when the area
// constraint is on, the summed ink of those majority neighbors strictly
// exceeds half the word's own ink — the word adopts that class. All
// decisions are computed from the input labels and applied together.
inline std::vector<hpsep::LabelClass> regroup_transcription(
    const std::vector<hpsep::LabeledWord>& words, int k, double max_dist,
    const hpsep::DistanceWeights& w, bool constrained) {
  std::vector<hpsep::LabelClass> out;
  out.reserve(words.size());
  for (const hpsep::LabeledWord& word : words) {
    struct Cand {
      double d2;
      int id;
      std::size_t index;
    };
    std::vector<Cand> cands;
    for (std::size_t j = 0; j < words.size(); ++j) {
      if (words[j].word.id == word.word.id) continue;
      const double d2 = hpsep::weighted_distance2(word.centroid_x, word.centroid_y,
                                                  words[j].centroid_x,
                                                  words[j].centroid_y, w);
      if (d2 > max_dist * max_dist) continue;
      cands.push_back({d2, words[j].word.id, j});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return a.d2 != b.d2 ? a.d2 < b.d2 : a.id < b.id;
    });
    if (static_cast<int>(cands.size()) > k) cands.resize(static_cast<std::size_t>(k));

    hpsep::LabelClass decided = word.label;
    const int n = static_cast<int>(cands.size());
    for (hpsep::LabelClass cls : {hpsep::LabelClass::Handwritten,
                                  hpsep::LabelClass::Printed, hpsep::LabelClass::Noise}) {
      int count = 0;
      double area = 0.0;
      for (const Cand& c : cands) {
        if (words[c.index].label == cls) {
          ++count;
          area += static_cast<double>(words[c.index].word.pixel_count);
        }
      }
      if (2 * count > n) {
        if (!constrained || area > 0.5 * static_cast<double>(word.word.pixel_count)) {
          decided = cls;
        }
        break;  // only one class can hold a strict majority
      }
    }
    out.push_back(decided);
  }
  return out;
}

// Same transcription under the bounding-box edge metric.
inline std::vector<hpsep::LabelClass> regroup_transcription_bbox(
    const std::vector<hpsep::LabeledWord>& words, int k, double max_dist,
    bool constrained) {
  std::vector<hpsep::LabelClass> out;
  out.reserve(words.size());
  for (const hpsep::LabeledWord& word : words) {
    struct Cand {
      double d;
      int id;
      std::size_t index;
    };
    std::vector<Cand> cands;
    for (std::size_t j = 0; j < words.size(); ++j) {
      if (words[j].word.id == word.word.id) continue;
      const double d = hpsep::bbox_distance(word, words[j]);
      if (d > max_dist) continue;
      cands.push_back({d, words[j].word.id, j});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return a.d != b.d ? a.d < b.d : a.id < b.id;
    });
    if (static_cast<int>(cands.size()) > k) cands.resize(static_cast<std::size_t>(k));

    hpsep::LabelClass decided = word.label;
    const int n = static_cast<int>(cands.size());
    for (hpsep::LabelClass cls : {hpsep::LabelClass::Handwritten,
                                  hpsep::LabelClass::Printed, hpsep::LabelClass::Noise}) {
      int count = 0;
      double area = 0.0;
      for (const Cand& c : cands) {
        if (words[c.index].label == cls) {
          ++count;
          area += static_cast<double>(words[c.index].word.pixel_count);
        }
      }
      if (2 * count > n) {
        if (!constrained || area > 0.5 * static_cast<double>(word.word.pixel_count)) {
          decided = cls;
        }
        break;
      }
    }
    out.push_back(decided);
  }
  return out;
}

// --- SVM dual via accelerated projected gradient ---------------------------------

// Projection of v onto {0 <= a <= C, sum_i y_i a_i = 0} by bisection on the
// hyperplane multiplier (the constraint value is monotone in it).
inline Eigen::VectorXd project_dual(const Eigen::VectorXd& v, const std::vector<int>& ys,
                                    double C) {
  const int n = static_cast<int>(v.size());
  auto clipped = [&](double lambda) {
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) {
      a[i] = std::clamp(v[i] + lambda * ys[static_cast<std::size_t>(i)], 0.0, C);
    }
    return a;
  };
  auto constraint = [&](double lambda) {
    const Eigen::VectorXd a = clipped(lambda);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += ys[static_cast<std::size_t>(i)] * a[i];
    return s;
  };
  double lo = -(C + v.cwiseAbs().maxCoeff() + 1.0);
  double hi = -lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (constraint(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return clipped(0.5 * (lo + hi));
}

struct DualSolution {
  Eigen::VectorXd alpha;
  double objective = 0.0;
};

// Maximizes W(a) = sum a - 1/2 a^T Q a over the dual feasible set with
// accelerated projected gradient (a different algorithm family from the
// library's solver). Accurate to well below 1e-6 on the small instances the
// tests use.
inline DualSolution solve_svm_dual(const std::vector<Eigen::VectorXd>& xs,
                                   const std::vector<int>& ys, double gamma, double C,
                                   int iterations = 20000) {
  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXd Q(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double k = std::exp(-gamma * (xs[static_cast<std::size_t>(i)] -
                                          xs[static_cast<std::size_t>(j)])
                                             .squaredNorm());
      Q(i, j) = ys[static_cast<std::size_t>(i)] * ys[static_cast<std::size_t>(j)] * k;
    }
  }
  // Lipschitz constant of the gradient from power iteration.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  for (int it = 0; it < 60; ++it) {
    v = (Q * v).normalized();
  }
  const double L = std::max(1e-9, v.dot(Q * v));
  const double eta = 1.0 / (L * 1.01);

  auto objective = [&](const Eigen::VectorXd& a) {
    return a.sum() - 0.5 * a.dot(Q * a);
  };

  Eigen::VectorXd x = project_dual(Eigen::VectorXd::Zero(n), ys, C);
  Eigen::VectorXd y = x;
  double t = 1.0;
  double best = objective(x);
  Eigen::VectorXd best_x = x;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - Q * y;
    const Eigen::VectorXd x_next = project_dual(y + eta * grad, ys, C);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + ((t - 1.0) / t_next) * (x_next - x);
    const double delta = (x_next - x).cwiseAbs().maxCoeff();
    x = x_next;
    t = t_next;
    const double w = objective(x);
    if (w > best) {
      best = w;
      best_x = x;
    }
    if (delta < 1e-14) break;
  }
  return {best_x, best};
}

// Dual objective of a trained binary model, computed from its stored signed
// coefficients (alpha_i = |signed_i| because alpha is non-negative).
inline double model_dual_objective(const hpsep::BinarySvmModel& model) {
  const int n = static_cast<int>(model.support_vectors.size());
  double sum_alpha = 0.0;
  for (double a : model.alphas) sum_alpha += std::abs(a);
  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double k =
          std::exp(-model.params.gamma * (model.support_vectors[static_cast<std::size_t>(i)] -
                                          model.support_vectors[static_cast<std::size_t>(j)])
                                             .squaredNorm());
      quad += model.alphas[static_cast<std::size_t>(i)] *
              model.alphas[static_cast<std::size_t>(j)] * k;
    }
  }
  return sum_alpha - 0.5 * quad;
}

// Worst KKT violation of a binary model over its training set. Each sample's
// alpha is recovered by matching it bit-identically against the model's
// stored support vectors (unmatched samples have alpha 0); decision values
// are recomputed here from the stored coefficients. KKT with box [0, C]:
// alpha = 0 needs margin >= 1, alpha = C needs margin <= 1, interior alphas
// need margin == 1. Returns the largest shortfall over all samples; a
// negative value means every condition holds with slack.
inline double kkt_violation(const std::vector<Eigen::VectorXd>& xs,
                            const std::vector<int>& ys,
                            const hpsep::BinarySvmModel& model) {
  const int n = static_cast<int>(xs.size());
  const int m = static_cast<int>(model.support_vectors.size());
  std::vector<char> sv_used(static_cast<std::size_t>(m), 0);
  std::vector<double> alpha_signed(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < m; ++s) {
      if (sv_used[static_cast<std::size_t>(s)]) continue;
      if (xs[static_cast<std::size_t>(i)] == model.support_vectors[static_cast<std::size_t>(s)]) {
        sv_used[static_cast<std::size_t>(s)] = 1;
        alpha_signed[static_cast<std::size_t>(i)] = model.alphas[static_cast<std::size_t>(s)];
        break;
      }
    }
  }

  auto f_value = [&](const Eigen::VectorXd& x) {
    double f = model.bias;
    for (int s = 0; s < m; ++s) {
      const double k = std::exp(
          -model.params.gamma *
          (x - model.support_vectors[static_cast<std::size_t>(s)]).squaredNorm());
      f += model.alphas[static_cast<std::size_t>(s)] * k;
    }
    return f;
  };

  const double C = model.params.C;
  double worst = -1e300;
  for (int i = 0; i < n; ++i) {
    const double alpha = std::abs(alpha_signed[static_cast<std::size_t>(i)]);
    const double margin = ys[static_cast<std::size_t>(i)] * f_value(xs[static_cast<std::size_t>(i)]);
    if (alpha <= 1e-9) {
      worst = std::max(worst, 1.0 - margin);
    } else if (alpha >= C - 1e-9) {
      worst = std::max(worst, margin - 1.0);
    } else {
      worst = std::max(worst, std::abs(margin - 1.0));
    }
  }
  return worst;
}

// --- co-occurrence ---------------------------------------------------------------

// P(black, black) over all in-bounds pixel pairs at the four offsets
// (1,0), (0,1), (1,1), (1,-1).
inline std::array<double, 4> cooccurrence(const hpsep::BinaryImage& mask) {
  constexpr std::array<std::pair<int, int>, 4> kOffsets = {
      {{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
  std::array<double, 4> out{};
  for (std::size_t o = 0; o < kOffsets.size(); ++o) {
    const auto [dx, dy] = kOffsets[o];
    long long pairs = 0, black = 0;
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= mask.width() || ny >= mask.height()) continue;
        ++pairs;
        if (mask.get(x, y) && mask.get(nx, ny)) ++black;
      }
    }
    out[o] = pairs > 0 ? static_cast<double>(black) / static_cast<double>(pairs) : 0.0;
  }
  return out;
}

}  // namespace oracle

namespace testutil {

// Wraps a whole image into one PseudoWord (components + bbox + ink), the way
// segmentation would if everything were a single word.
inline hpsep::PseudoWord make_word(const hpsep::BinaryImage& img, int id = 0) {
  hpsep::PseudoWord word;
  word.id = id;
  word.components = hpsep::connected_components(img);
  for (const hpsep::ConnectedComponent& cc : word.components) {
    if (word.bbox.empty()) {
      word.bbox = cc.bbox;
    } else {
      word.bbox.expand(cc.bbox.x_min, cc.bbox.y_min);
      word.bbox.expand(cc.bbox.x_max, cc.bbox.y_max);
    }
    word.pixel_count += cc.pixel_count;
  }
  return word;
}

// A LabeledWord at an explicit centroid with an explicit bbox and ink count,
// for direct grouping tests.
inline hpsep::LabeledWord make_point_word(int id, double cx, double cy,
                                          hpsep::LabelClass label, double confidence,
                                          std::int64_t area = 100,
                                          hpsep::BoundingBox bbox = {}) {
  hpsep::LabeledWord w;
  w.word.id = id;
  w.word.pixel_count = area;
  if (bbox.empty()) {
    const int ix = static_cast<int>(std::lround(cx));
    const int iy = static_cast<int>(std::lround(cy));
    bbox = {ix, iy, ix, iy};
  }
  w.word.bbox = bbox;
  w.label = label;
  w.confidence = confidence;
  w.centroid_x = cx;
  w.centroid_y = cy;
  return w;
}

}  // namespace testutil
