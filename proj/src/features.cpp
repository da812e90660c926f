#include "hpsep/features.hpp"

#include <algorithm>
#include <cmath>

#include "hpsep/errors.hpp"

namespace hpsep {

BinaryImage word_mask(const PseudoWord& word) {
  BinaryImage mask(word.bbox.width(), word.bbox.height());
  for (const ConnectedComponent& cc : word.components) {
    const int ox = cc.bbox.x_min - word.bbox.x_min;
    const int oy = cc.bbox.y_min - word.bbox.y_min;
    for (int y = 0; y < cc.pixel_mask.height(); ++y)
      for (int x = 0; x < cc.pixel_mask.width(); ++x)
        if (cc.pixel_mask.get(x, y)) mask.set(ox + x, oy + y, true);
  }
  return mask;
}

namespace {

double signed_log(double v) {
  return (v < 0 ? -1.0 : 1.0) * std::log10(1.0 + std::abs(v));
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / values.size();
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / values.size())};
}

}  // namespace

std::array<double, 7> hu_moments(const BinaryImage& mask) {
  double m00 = 0, m10 = 0, m01 = 0;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.get(x, y)) {
        m00 += 1;
        m10 += x;
        m01 += y;
      }
  if (m00 == 0) throw ParamError("hu_moments: empty mask");
  const double cx = m10 / m00, cy = m01 / m00;

  // Central moments up to order 3.
  double mu[4][4] = {};
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y)) continue;
      const double dx = x - cx, dy = y - cy;
      double xp = 1.0;
      for (int p = 0; p <= 3; ++p) {
        double yq = 1.0;
        for (int q = 0; p + q <= 3; ++q) {
          mu[p][q] += xp * yq;
          yq *= dy;
        }
        xp *= dx;
      }
    }

  // Scale-normalized moments eta_pq = mu_pq / mu00^(1 + (p+q)/2).
  auto eta = [&](int p, int q) {
    return mu[p][q] / std::pow(m00, 1.0 + (p + q) / 2.0);
  };
  const double n20 = eta(2, 0), n02 = eta(0, 2), n11 = eta(1, 1);
  const double n30 = eta(3, 0), n03 = eta(0, 3), n21 = eta(2, 1), n12 = eta(1, 2);

  std::array<double, 7> h{};
  h[0] = n20 + n02;
  h[1] = (n20 - n02) * (n20 - n02) + 4 * n11 * n11;
  h[2] = (n30 - 3 * n12) * (n30 - 3 * n12) + (3 * n21 - n03) * (3 * n21 - n03);
  h[3] = (n30 + n12) * (n30 + n12) + (n21 + n03) * (n21 + n03);
  h[4] = (n30 - 3 * n12) * (n30 + n12) *
             ((n30 + n12) * (n30 + n12) - 3 * (n21 + n03) * (n21 + n03)) +
         (3 * n21 - n03) * (n21 + n03) *
             (3 * (n30 + n12) * (n30 + n12) - (n21 + n03) * (n21 + n03));
  h[5] = (n20 - n02) * ((n30 + n12) * (n30 + n12) - (n21 + n03) * (n21 + n03)) +
         4 * n11 * (n30 + n12) * (n21 + n03);
  h[6] = (3 * n21 - n03) * (n30 + n12) *
             ((n30 + n12) * (n30 + n12) - 3 * (n21 + n03) * (n21 + n03)) -
         (n30 - 3 * n12) * (n21 + n03) *
             (3 * (n30 + n12) * (n30 + n12) - (n21 + n03) * (n21 + n03));
  for (double& v : h) v = signed_log(v);
  return h;
}

std::array<double, 4> run_length_stats(const BinaryImage& mask) {
  std::vector<double> h_runs, v_runs;
  for (int y = 0; y < mask.height(); ++y) {
    int run = 0;
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.get(x, y)) {
        ++run;
      } else if (run > 0) {
        h_runs.push_back(run);
        run = 0;
      }
    }
    if (run > 0) h_runs.push_back(run);
  }
  for (int x = 0; x < mask.width(); ++x) {
    int run = 0;
    for (int y = 0; y < mask.height(); ++y) {
      if (mask.get(x, y)) {
        ++run;
      } else if (run > 0) {
        v_runs.push_back(run);
        run = 0;
      }
    }
    if (run > 0) v_runs.push_back(run);
  }
  const MeanStd h = mean_std(h_runs), v = mean_std(v_runs);
  return {h.mean, h.std, v.mean, v.std};
}

std::array<double, 2> crossing_counts(const BinaryImage& mask) {
  long long row_crossings = 0, col_crossings = 0;
  for (int y = 0; y < mask.height(); ++y) {
    bool prev = false;
    for (int x = 0; x < mask.width(); ++x) {
      const bool cur = mask.get(x, y);
      if (cur && !prev) ++row_crossings;
      prev = cur;
    }
  }
  for (int x = 0; x < mask.width(); ++x) {
    bool prev = false;
    for (int y = 0; y < mask.height(); ++y) {
      const bool cur = mask.get(x, y);
      if (cur && !prev) ++col_crossings;
      prev = cur;
    }
  }
  return {mask.height() > 0 ? static_cast<double>(row_crossings) / mask.height() : 0.0,
          mask.width() > 0 ? static_cast<double>(col_crossings) / mask.width() : 0.0};
}

std::array<double, 4> cooccurrence(const BinaryImage& mask) {
  static constexpr int kOffsets[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    const int dx = kOffsets[i][0], dy = kOffsets[i][1];
    long long pairs = 0, both = 0;
    for (int y = 0; y < mask.height(); ++y) {
      const int y2 = y + dy;
      if (y2 < 0 || y2 >= mask.height()) continue;
      for (int x = 0; x + dx < mask.width(); ++x) {
        ++pairs;
        if (mask.get(x, y) && mask.get(x + dx, y2)) ++both;
      }
    }
    out[i] = pairs > 0 ? static_cast<double>(both) / pairs : 0.0;
  }
  return out;
}

namespace {

double normalized_profile_variance(const BinaryImage& mask, Axis axis) {
  const std::vector<int> profile = projection_profile(mask, axis);
  if (profile.empty()) return 0.0;
  double sum = 0.0;
  for (int v : profile) sum += v;
  const double mean = sum / profile.size();
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (int v : profile) var += (v - mean) * (v - mean);
  var /= profile.size();
  return var / (mean * mean);
}

}  // namespace

FeatureVector extract_features(const PseudoWord& word) {
  if (word.components.empty())
    throw ParamError("extract_features: word has no components");
  FeatureVector f = FeatureVector::Zero();
  const BinaryImage mask = word_mask(word);
  const double w = word.bbox.width(), h = word.bbox.height();
  const double ink = word.pixel_count;

  f[0] = h;
  f[1] = w;
  f[2] = w / h;
  f[3] = ink;
  f[4] = ink / (w * h);

  std::vector<double> widths, heights, aspects, densities, gaps;
  for (const ConnectedComponent& cc : word.components) {
    const double cw = cc.bbox.width(), ch = cc.bbox.height();
    widths.push_back(cw);
    heights.push_back(ch);
    aspects.push_back(cw / ch);
    densities.push_back(cc.pixel_count / (cw * ch));
  }
  for (size_t i = 1; i < word.components.size(); ++i)
    gaps.push_back(horizontal_gap(word.components[i - 1].bbox, word.components[i].bbox));
  const MeanStd sw = mean_std(widths), sh = mean_std(heights),
                sa = mean_std(aspects), sd = mean_std(densities),
                sg = mean_std(gaps);
  f[5] = static_cast<double>(word.components.size());
  f[6] = sw.mean;
  f[7] = sw.std;
  f[8] = sh.mean;
  f[9] = sh.std;
  f[10] = sa.mean;
  f[11] = sa.std;
  f[12] = sd.mean;
  f[13] = sd.std;
  f[14] = sg.mean;
  f[15] = sg.std;

  const auto hu = hu_moments(mask);
  for (int i = 0; i < 7; ++i) f[16 + i] = hu[i];

  f[23] = normalized_profile_variance(mask, Axis::Horizontal);
  f[24] = normalized_profile_variance(mask, Axis::Vertical);

  const auto runs = run_length_stats(mask);
  for (int i = 0; i < 4; ++i) f[25 + i] = runs[i];

  const auto cross = crossing_counts(mask);
  f[29] = cross[0];
  f[30] = cross[1];

  const auto cooc = cooccurrence(mask);
  for (int i = 0; i < 4; ++i) f[31 + i] = cooc[i];
  return f;
}

NormalizationStats fit_normalization(const std::vector<FeatureVector>& vectors) {
  if (vectors.size() < 2)
    throw ParamError("fit_normalization: need at least 2 training vectors");
  NormalizationStats stats;
  for (const FeatureVector& v : vectors) stats.mean += v;
  stats.mean /= static_cast<double>(vectors.size());
  for (const FeatureVector& v : vectors)
    stats.stddev += (v - stats.mean).cwiseProduct(v - stats.mean);
  stats.stddev = (stats.stddev / static_cast<double>(vectors.size())).cwiseSqrt();
  return stats;
}

FeatureVector apply_normalization(const FeatureVector& v, const NormalizationStats& stats) {
  FeatureVector out = v - stats.mean;
  for (int i = 0; i < kFeatureCount; ++i)
    if (stats.stddev[i] > 0.0) out[i] /= stats.stddev[i];
  return out;
}

}  // namespace hpsep
