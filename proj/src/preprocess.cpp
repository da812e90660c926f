#include "hpsep/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "hpsep/errors.hpp"

namespace hpsep {

int EdgeRuleSet::resolve_margin(int width, int height) const {
  if (border_margin_px >= 0) return border_margin_px;
  return static_cast<int>(std::lround(0.02 * std::min(width, height)));
}

namespace {

bool touches_margin(const BoundingBox& box, int width, int height, int margin) {
  return box.x_min < margin || box.y_min < margin ||
         box.x_max >= width - margin || box.y_max >= height - margin;
}

bool is_border_artifact(const ConnectedComponent& cc, int width, int height,
                        const EdgeRuleSet& rules, int margin) {
  if (!touches_margin(cc.bbox, width, height, margin)) return false;
  const int bw = cc.bbox.width();
  const int bh = cc.bbox.height();
  if (bw >= rules.span_fraction * width || bh >= rules.span_fraction * height)
    return true;
  const int longer = std::max(bw, bh);
  const int shorter = std::max(1, std::min(bw, bh));
  if (static_cast<double>(longer) / shorter < rules.elongation_ratio)
    return false;
  const int page_dim = (bw >= bh) ? width : height;
  return longer >= rules.elongation_span * page_dim;
}

}  // namespace

BinaryImage remove_edges(const BinaryImage& img, const EdgeRuleSet& rules) {
  const int margin = rules.resolve_margin(img.width(), img.height());
  BinaryImage out = img;
  for (const ConnectedComponent& cc : connected_components(img, Connectivity::Eight)) {
    if (!is_border_artifact(cc, img.width(), img.height(), rules, margin)) continue;
    for (int y = 0; y < cc.pixel_mask.height(); ++y)
      for (int x = 0; x < cc.pixel_mask.width(); ++x)
        if (cc.pixel_mask.get(x, y))
          out.set(cc.bbox.x_min + x, cc.bbox.y_min + y, false);
  }
  return out;
}

namespace {

// One synchronous kfill pass. Flips homogeneous cores of color !fill_black to
// fill_black wherever the perimeter vote passes; returns the flip count.
// Window pixels outside the image read as white.
int kfill_pass(const BinaryImage& src, BinaryImage& dst, int k, bool fill_black) {
  const int core = k - 2;
  const int n_hi = 3 * k - 4;
  dst = src;
  auto at = [&src](int x, int y) -> bool {
    if (x < 0 || y < 0 || x >= src.width() || y >= src.height()) return false;
    return src.get(x, y);
  };

  // Perimeter of the k x k window anchored at (wx, wy), walked clockwise from
  // the top-left corner so runs can be counted circularly.
  std::vector<std::pair<int, int>> ring;
  ring.reserve(4 * (k - 1));
  for (int x = 0; x < k - 1; ++x) ring.emplace_back(x, 0);
  for (int y = 0; y < k - 1; ++y) ring.emplace_back(k - 1, y);
  for (int x = k - 1; x > 0; --x) ring.emplace_back(x, k - 1);
  for (int y = k - 1; y > 0; --y) ring.emplace_back(0, y);

  int flips = 0;
  for (int wy = 1 - k; wy <= src.height() - 1; ++wy) {
    // The core rows of this window are wy+1 .. wy+k-2; skip windows whose
    // core lies fully outside the image.
    if (wy + 1 + core <= 0 || wy + 1 >= src.height()) continue;
    // Fast reject: a window whose rows carry no ink can only flip when
    // filling white over an all-black core, which needs ink.
    bool any_ink = false;
    for (int y = std::max(0, wy); y < std::min(src.height(), wy + k) && !any_ink; ++y)
      any_ink = src.row_ink_count(y) > 0;
    if (!any_ink) continue;

    for (int wx = 1 - k; wx <= src.width() - 1; ++wx) {
      if (wx + 1 + core <= 0 || wx + 1 >= src.width()) continue;
      // Core must be homogeneous and of the opposite color.
      bool core_ok = true;
      for (int cy = 0; cy < core && core_ok; ++cy)
        for (int cx = 0; cx < core && core_ok; ++cx)
          core_ok = at(wx + 1 + cx, wy + 1 + cy) == !fill_black;
      if (!core_ok) continue;

      int n = 0, runs = 0;
      bool prev = at(wx + ring.back().first, wy + ring.back().second) == fill_black;
      for (const auto& [rx, ry] : ring) {
        const bool v = at(wx + rx, wy + ry) == fill_black;
        if (v) {
          ++n;
          if (!prev) ++runs;
        }
        prev = v;
      }
      if (n == static_cast<int>(ring.size())) runs = 1;  // full circle is one run
      if (runs > 1 || n < n_hi) continue;
      if (n == n_hi) {
        int corners = (at(wx, wy) == fill_black) +
                      (at(wx + k - 1, wy) == fill_black) +
                      (at(wx, wy + k - 1) == fill_black) +
                      (at(wx + k - 1, wy + k - 1) == fill_black);
        if (corners != 2) continue;
      }
      for (int cy = 0; cy < core; ++cy)
        for (int cx = 0; cx < core; ++cx) {
          const int px = wx + 1 + cx, py = wy + 1 + cy;
          if (px >= 0 && py >= 0 && px < src.width() && py < src.height()) {
            dst.set(px, py, fill_black);
            ++flips;
          }
        }
    }
  }
  return flips;
}

}  // namespace

BinaryImage kfill(const BinaryImage& img, int k) {
  if (k < 3 || k % 2 == 0)
    throw ParamError("kfill window size must be odd and >= 3");
  BinaryImage current = img;
  BinaryImage next(img.width(), img.height(), img.dpi());
  for (int iter = 0; iter < 5; ++iter) {
    int flips = kfill_pass(current, next, k, /*fill_black=*/true);
    std::swap(current, next);
    flips += kfill_pass(current, next, k, /*fill_black=*/false);
    std::swap(current, next);
    if (flips == 0) break;
  }
  return current;
}

double skew_profile_variance(const std::vector<std::pair<int, int>>& ink_pixels,
                             int width, int height, double angle_deg) {
  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
  std::vector<int> profile(static_cast<size_t>(height), 0);
  long long kept = 0;
  for (const auto& [x, y] : ink_pixels) {
    const double dx = x - cx, dy = y - cy;
    const long xr = std::lround(cx + c * dx - s * dy);
    const long yr = std::lround(cy + s * dx + c * dy);
    if (xr < 0 || yr < 0 || xr >= width || yr >= height) continue;
    ++profile[static_cast<size_t>(yr)];
    ++kept;
  }
  const double mean = static_cast<double>(kept) / height;
  double var = 0.0;
  for (int count : profile) var += (count - mean) * (count - mean);
  return var / height;
}

namespace {

std::vector<std::pair<int, int>> collect_ink(const BinaryImage& img) {
  std::vector<std::pair<int, int>> ink;
  for (int y = 0; y < img.height(); ++y) {
    if (img.row_ink_count(y) == 0) continue;
    for (int x = 0; x < img.width(); ++x)
      if (img.get(x, y)) ink.emplace_back(x, y);
  }
  return ink;
}

}  // namespace

double estimate_skew(const BinaryImage& img, const PreprocessConfig& config) {
  if (config.skew_range <= 0.0) throw ParamError("skew_range must be positive");
  if (config.skew_resolution <= 0.0)
    throw ParamError("skew_resolution must be positive");
  const auto ink = collect_ink(img);
  if (ink.empty()) throw ParamError("no content");

  auto objective = [&](double a) {
    return skew_profile_variance(ink, img.width(), img.height(), a);
  };

  // Coarse pass: whole-degree grid centered on zero, endpoints included.
  std::vector<double> coarse;
  for (int a = -static_cast<int>(std::floor(config.skew_range));
       a <= static_cast<int>(std::floor(config.skew_range)); ++a)
    coarse.push_back(a);
  if (coarse.empty() || coarse.front() > -config.skew_range) {
    coarse.insert(coarse.begin(), -config.skew_range);
    coarse.push_back(config.skew_range);
  }
  double best = coarse.front(), best_var = objective(coarse.front());
  for (size_t i = 1; i < coarse.size(); ++i) {
    const double v = objective(coarse[i]);
    if (v > best_var) { best_var = v; best = coarse[i]; }
  }

  // Fine pass: cover the whole coarse cell on both sides.
  const double coarse_best = best;
  const int steps = static_cast<int>(std::ceil(1.0 / config.skew_resolution));
  for (int j = -steps; j <= steps; ++j) {
    if (j == 0) continue;
    const double a = std::clamp(coarse_best + j * config.skew_resolution,
                                -config.skew_range, config.skew_range);
    const double v = objective(a);
    if (v > best_var) { best_var = v; best = a; }
  }
  return best;
}

PreprocessResult preprocess(const BinaryImage& img, const PreprocessConfig& config) {
  BinaryImage cleaned = kfill(remove_edges(img, config.edge_rules), config.kfill_k);
  PreprocessResult result;
  if (cleaned.ink_count() == 0) {
    result.image = std::move(cleaned);
    return result;
  }
  result.skew_correction_deg = estimate_skew(cleaned, config);
  if (result.skew_correction_deg != 0.0)
    cleaned = rotate(cleaned, result.skew_correction_deg);
  result.image = kfill(cleaned, config.kfill_k);
  return result;
}

}  // namespace hpsep
