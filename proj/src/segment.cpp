#include "hpsep/segment.hpp"

#include <algorithm>
#include <cmath>

#include "hpsep/errors.hpp"

namespace hpsep {

BinaryImage rlsa_horizontal(const BinaryImage& img, int threshold) {
  if (threshold < 0) throw ParamError("rlsa threshold must be >= 0");
  BinaryImage out = img;
  if (threshold == 0) return out;
  for (int y = 0; y < img.height(); ++y) {
    int last_ink = -1;
    for (int x = 0; x < img.width(); ++x) {
      if (!img.get(x, y)) continue;
      if (last_ink >= 0) {
        const int gap = x - last_ink - 1;
        if (gap > 0 && gap <= threshold)
          for (int f = last_ink + 1; f < x; ++f) out.set(f, y, true);
      }
      last_ink = x;
    }
  }
  return out;
}

BinaryImage rlsa_vertical(const BinaryImage& img, int threshold) {
  if (threshold < 0) throw ParamError("rlsa threshold must be >= 0");
  BinaryImage out = img;
  if (threshold == 0) return out;
  for (int x = 0; x < img.width(); ++x) {
    int last_ink = -1;
    for (int y = 0; y < img.height(); ++y) {
      if (!img.get(x, y)) continue;
      if (last_ink >= 0) {
        const int gap = y - last_ink - 1;
        if (gap > 0 && gap <= threshold)
          for (int f = last_ink + 1; f < y; ++f) out.set(x, f, true);
      }
      last_ink = y;
    }
  }
  return out;
}

BinaryImage classical_rlsa(const BinaryImage& img, int h_threshold, int v_threshold) {
  const BinaryImage h = rlsa_horizontal(img, h_threshold);
  const BinaryImage v = rlsa_vertical(img, v_threshold);
  BinaryImage out(img.width(), img.height(), img.dpi());
  for (int y = 0; y < img.height(); ++y) {
    std::uint64_t* o = out.row(y);
    const std::uint64_t* a = h.row(y);
    const std::uint64_t* b = v.row(y);
    for (int w = 0; w < img.words_per_row(); ++w) o[w] = a[w] & b[w];
  }
  return out;
}

int line_smear_threshold(const std::vector<ConnectedComponent>& comps, int dpi,
                         double factor) {
  if (comps.empty()) return 10;
  std::vector<int> heights;
  heights.reserve(comps.size());
  for (const auto& c : comps) heights.push_back(c.bbox.height());
  std::nth_element(heights.begin(), heights.begin() + heights.size() / 2, heights.end());
  const int median = heights[heights.size() / 2];
  const double scale = dpi / 300.0;
  const int lo = std::max(1, static_cast<int>(std::lround(10 * scale)));
  const int hi = std::max(lo, static_cast<int>(std::lround(500 * scale)));
  return std::clamp(static_cast<int>(std::lround(factor * median)), lo, hi);
}

std::vector<PseudoLine> extract_lines(const BinaryImage& img, double line_factor) {
  std::vector<PseudoLine> lines;
  std::vector<ConnectedComponent> comps = connected_components(img);
  if (comps.empty()) return lines;

  const int threshold = line_smear_threshold(comps, img.dpi(), line_factor);
  const BinaryImage smeared = rlsa_horizontal(img, threshold);

  // Label map of the smeared image; every original component lies entirely
  // inside one smeared component.
  std::vector<ConnectedComponent> regions = connected_components(smeared);
  const int w = img.width(), h = img.height();
  std::vector<std::int32_t> region_of(static_cast<std::size_t>(w) * h, -1);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const ConnectedComponent& rc = regions[r];
    for (int my = 0; my < rc.pixel_mask.height(); ++my)
      for (int mx = 0; mx < rc.pixel_mask.width(); ++mx)
        if (rc.pixel_mask.get(mx, my))
          region_of[static_cast<std::size_t>(rc.bbox.y_min + my) * w + rc.bbox.x_min + mx] =
              static_cast<std::int32_t>(r);
  }

  auto region_at = [&](int x, int y) { return region_of[static_cast<std::size_t>(y) * w + x]; };

  std::vector<std::vector<ConnectedComponent>> grouped(regions.size());
  for (ConnectedComponent& c : comps) {
    const int cx = static_cast<int>(std::lround(c.centroid_x));
    const int cy = static_cast<int>(std::lround(c.centroid_y));
    std::int32_t r = -1;
    if (cx >= 0 && cx < w && cy >= 0 && cy < h) r = region_at(cx, cy);
    if (r < 0) {
      // Rounded centroid fell on background (hollow shapes); any pixel of the
      // component identifies its region.
      for (int my = 0; my < c.pixel_mask.height() && r < 0; ++my)
        for (int mx = 0; mx < c.pixel_mask.width() && r < 0; ++mx)
          if (c.pixel_mask.get(mx, my))
            r = region_at(c.bbox.x_min + mx, c.bbox.y_min + my);
    }
    grouped[static_cast<std::size_t>(r)].push_back(std::move(c));
  }

  // Regions come out of connected_components ordered top-to-bottom already.
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (grouped[r].empty()) continue;
    PseudoLine line;
    line.components = std::move(grouped[r]);
    std::stable_sort(line.components.begin(), line.components.end(),
                     [](const ConnectedComponent& a, const ConnectedComponent& b) {
                       if (a.bbox.x_min != b.bbox.x_min) return a.bbox.x_min < b.bbox.x_min;
                       return a.bbox.y_min < b.bbox.y_min;
                     });
    for (const auto& c : line.components) {
      line.bbox.expand(c.bbox.x_min, c.bbox.y_min);
      line.bbox.expand(c.bbox.x_max, c.bbox.y_max);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

int horizontal_gap(const BoundingBox& a, const BoundingBox& b) {
  return std::max(0, b.x_min - a.x_max - 1);
}

GapHistogram gap_histogram(const PseudoLine& line) {
  GapHistogram h;
  if (line.components.size() < 2) return h;
  int max_gap = 0;
  std::vector<int> gaps;
  gaps.reserve(line.components.size() - 1);
  for (std::size_t i = 1; i < line.components.size(); ++i) {
    const int g = horizontal_gap(line.components[i - 1].bbox, line.components[i].bbox);
    gaps.push_back(g);
    max_gap = std::max(max_gap, g);
  }
  h.counts.assign(static_cast<std::size_t>(max_gap) + 1, 0);
  for (int g : gaps) h.counts[static_cast<std::size_t>(g)] += 1;
  for (std::size_t b = 0; 2 + 2 * b < h.counts.size(); ++b) {
    std::int64_t v = h.counts[2 + 2 * b];
    if (3 + 2 * b < h.counts.size()) v += h.counts[3 + 2 * b];
    h.paired_bins.push_back(v);
  }
  return h;
}

int word_gap_threshold(const GapHistogram& h) {
  const auto& bins = h.paired_bins;
  bool any = false;
  for (std::int64_t v : bins) any = any || v > 0;
  if (!any) throw ParamError("degenerate line: empty gap histogram");

  std::size_t peak = 0;
  for (std::size_t i = 1; i < bins.size(); ++i)
    if (bins[i] > bins[peak]) peak = i;

  std::size_t i = peak;
  std::int64_t previous = bins[i];
  ++i;
  while (i < bins.size()) {
    if (bins[i] > previous) return static_cast<int>(i) + 2;
    previous = bins[i];
    ++i;
  }
  // No rise before the bins ran out: merge up to the upper edge of the peak bin.
  return static_cast<int>(2 * peak) + 3;
}

namespace {

PseudoWord make_word(int id, int line_id, std::vector<ConnectedComponent> comps) {
  PseudoWord word;
  word.id = id;
  word.line_id = line_id;
  word.components = std::move(comps);
  for (const auto& c : word.components) {
    word.bbox.expand(c.bbox.x_min, c.bbox.y_min);
    word.bbox.expand(c.bbox.x_max, c.bbox.y_max);
    word.pixel_count += c.pixel_count;
  }
  return word;
}

}  // namespace

std::vector<PseudoWord> segment_words(const std::vector<PseudoLine>& lines) {
  std::vector<PseudoWord> words;
  int next_id = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const PseudoLine& line = lines[li];
    const int line_id = static_cast<int>(li);

    int d_hs = -1;
    if (line.components.size() >= 2) {
      const GapHistogram h = gap_histogram(line);
      bool degenerate = true;
      for (std::int64_t v : h.paired_bins) degenerate = degenerate && v == 0;
      if (!h.paired_bins.empty() && !degenerate) d_hs = word_gap_threshold(h);
    }

    if (d_hs < 0) {
      // Single-component line or degenerate histogram: one word per component.
      for (const auto& c : line.components)
        words.push_back(make_word(next_id++, line_id, {c}));
      continue;
    }

    std::vector<ConnectedComponent> current;
    for (std::size_t i = 0; i < line.components.size(); ++i) {
      if (!current.empty()) {
        const int gap = horizontal_gap(current.back().bbox, line.components[i].bbox);
        if (gap > d_hs) {
          words.push_back(make_word(next_id++, line_id, std::move(current)));
          current.clear();
        }
      }
      current.push_back(line.components[i]);
    }
    if (!current.empty()) words.push_back(make_word(next_id++, line_id, std::move(current)));
  }
  return words;
}

std::vector<PseudoWord> segment_words(const BinaryImage& img, double line_factor) {
  return segment_words(extract_lines(img, line_factor));
}

}  // namespace hpsep
