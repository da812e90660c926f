#include "hpsep/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hpsep/errors.hpp"
#include "hpsep/font.hpp"
#include "hpsep/rng.hpp"
#include "hpsep/textio.hpp"

namespace hpsep {

namespace {

constexpr int kScale = 4;                           // glyph cell magnification
constexpr int kCellWidth = kGlyphWidth * kScale;    // 20 px
constexpr int kCellHeight = kGlyphHeight * kScale;  // 28 px
constexpr int kMargin = 48;                         // content margin

constexpr std::uint8_t kHand = 1;
constexpr std::uint8_t kPrinted = 2;
constexpr std::uint8_t kNoise = 3;

struct Rect {
  int x0, y0, x1, y1;  // inclusive
};

bool rects_near(const Rect& a, const Rect& b, int pad) {
  return a.x0 <= b.x1 + pad && b.x0 <= a.x1 + pad &&
         a.y0 <= b.y1 + pad && b.y0 <= a.y1 + pad;
}

bool clear_of_reserved(const Rect& r, const std::vector<Rect>& reserved, int pad) {
  for (const Rect& other : reserved) {
    if (rects_near(r, other, pad)) return false;
  }
  return true;
}

struct PageCanvas {
  BinaryImage* img;
  LabelRaster* truth;

  void plot(int x, int y, std::uint8_t label) {
    if (!img->in_bounds(x, y)) return;
    img->set(x, y, true);
    truth->set(x, y, label);
  }
};

void fill_rect(PageCanvas& c, int x0, int y0, int x1, int y1, std::uint8_t label) {
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) c.plot(x, y, label);
  }
}

void draw_glyph(PageCanvas& c, int x0, int y0, char ch) {
  const GlyphRows& rows = glyph_rows(ch);
  for (int r = 0; r < kGlyphHeight; ++r) {
    for (int col = 0; col < kGlyphWidth; ++col) {
      if (rows[r][col] != '#') continue;
      fill_rect(c, x0 + col * kScale, y0 + r * kScale,
                x0 + col * kScale + kScale - 1, y0 + r * kScale + kScale - 1,
                kPrinted);
    }
  }
}

// A printed word planned up front (letters + the exact gaps between them) so
// the layout code can test fit before committing any ink.
struct PlannedWord {
  std::string text;
  std::vector<int> gaps;  // between consecutive glyphs, size text.size()-1
  int width = 0;
};

PlannedWord plan_word(Rng& rng, const PageSpec& spec, int min_len, int max_len,
                      double digit_share) {
  PlannedWord w;
  const int len = rng.range(min_len, max_len);
  const bool digits = rng.chance(digit_share);
  w.text.resize(static_cast<std::size_t>(len));
  for (char& ch : w.text) {
    ch = digits ? static_cast<char>('0' + rng.below(10))
                : static_cast<char>('A' + rng.below(26));
  }
  w.width = len * kCellWidth;
  for (int i = 0; i + 1 < len; ++i) {
    const int gap = rng.range(spec.intra_word_gap_min, spec.intra_word_gap_max);
    w.gaps.push_back(gap);
    w.width += gap;
  }
  return w;
}

void draw_planned_word(PageCanvas& c, const PlannedWord& w, int x, int y) {
  int cursor = x;
  for (std::size_t i = 0; i < w.text.size(); ++i) {
    draw_glyph(c, cursor, y, w.text[i]);
    cursor += kCellWidth;
    if (i < w.gaps.size()) cursor += w.gaps[i];
  }
}

void require_lines_fit(const PageSpec& spec, int pitch) {
  if (spec.printed_lines == 0) return;
  const int last_bottom = kMargin + (spec.printed_lines - 1) * pitch + kCellHeight;
  if (last_bottom > spec.height - kMargin) {
    throw ParamError("layout does not fit the page: " +
                     std::to_string(spec.printed_lines) + " lines at pitch " +
                     std::to_string(pitch) + " exceed height " +
                     std::to_string(spec.height));
  }
}

void render_free(PageCanvas& c, const PageSpec& spec, Rng& rng,
                 std::vector<Rect>& reserved) {
  const int pitch = kCellHeight + rng.range(16, 24);
  require_lines_fit(spec, pitch);
  const int limit = spec.width - kMargin;
  for (int li = 0; li < spec.printed_lines; ++li) {
    const int y = kMargin + li * pitch;
    int x = kMargin + rng.range(0, 24);
    const int x_start = x;
    int x_end = x;
    while (true) {
      const PlannedWord w = plan_word(rng, spec, 2, 8, 0.15);
      if (x + w.width > limit) break;
      draw_planned_word(c, w, x, y);
      x += w.width;
      x_end = x;
      x += rng.range(spec.inter_word_gap_min, spec.inter_word_gap_max);
    }
    if (x_end > x_start) {
      reserved.push_back({x_start, y, x_end - 1, y + kCellHeight - 1});
    }
  }
}

void render_form(PageCanvas& c, const PageSpec& spec, Rng& rng,
                 std::vector<Rect>& reserved) {
  const int pitch = kCellHeight + rng.range(20, 28);
  require_lines_fit(spec, pitch);
  const int limit = spec.width - kMargin;
  for (int li = 0; li < spec.printed_lines; ++li) {
    const int y = kMargin + li * pitch;
    int x = kMargin + rng.range(0, 12);
    const int x_start = x;
    int x_end = x;
    auto draw_group = [&](int count, int min_len, int max_len, double digit_share) {
      for (int wi = 0; wi < count; ++wi) {
        const PlannedWord w = plan_word(rng, spec, min_len, max_len, digit_share);
        if (x + w.width > limit) return;
        draw_planned_word(c, w, x, y);
        x += w.width;
        x_end = x;
        x += rng.range(spec.inter_word_gap_min, spec.inter_word_gap_max);
      }
    };
    draw_group(rng.range(1, 2), 3, 8, 0.0);   // field label
    x += rng.range(24, 56);                   // label/value separation
    draw_group(rng.range(1, 2), 2, 7, 0.5);   // field value
    if (rng.chance(0.6)) {
      // fill-in rule to the right of the value, bottom-aligned with the text
      const int bar_len = rng.range(60, 180);
      const int bar_x = x + rng.range(4, 16);
      if (bar_x + bar_len <= limit) {
        fill_rect(c, bar_x, y + kCellHeight - 4, bar_x + bar_len - 1,
                  y + kCellHeight - 1, kPrinted);
        x_end = bar_x + bar_len;
      }
    }
    if (x_end > x_start) {
      reserved.push_back({x_start, y, x_end - 1, y + kCellHeight - 1});
    }
  }
}

void render_table(PageCanvas& c, const PageSpec& spec, Rng& rng,
                  std::vector<Rect>& reserved) {
  const int columns = rng.range(3, 5);
  const int pitch = kCellHeight + rng.range(14, 20);
  require_lines_fit(spec, pitch);
  const int column_width = (spec.width - 2 * kMargin) / columns;
  for (int row = 0; row < spec.printed_lines; ++row) {
    const int y = kMargin + row * pitch;
    const bool header = row == 0;
    for (int col = 0; col < columns; ++col) {
      const int x = kMargin + col * column_width + rng.range(0, 8);
      const PlannedWord w = header ? plan_word(rng, spec, 3, 7, 0.0)
                                   : plan_word(rng, spec, 2, 6, 0.7);
      const bool skip = !header && rng.chance(0.12);
      if (skip) continue;
      if (x + w.width > kMargin + (col + 1) * column_width - spec.inter_word_gap_min) {
        continue;
      }
      draw_planned_word(c, w, x, y);
      reserved.push_back({x, y, x + w.width - 1, y + kCellHeight - 1});
    }
  }
}

// --- handwriting -------------------------------------------------------------

// A simulated handwritten word: one or more pen paths of varying thickness,
// each stored as a run of (x, y, radius) stamps relative to the word's own
// bounding box. A cursive scribble is a single continuous path; block
// lettering uses several short disconnected ones.
struct ScribbleWord {
  std::vector<std::vector<std::array<double, 3>>> strokes;
  int width = 0;
  int height = 0;
};

// Shifts the stamps to the origin and fills in the bounding-box size.
void finish_scribble(ScribbleWord& word) {
  double min_x = 1e9, min_y = 1e9, max_x = -1e9, max_y = -1e9;
  for (const auto& stroke : word.strokes) {
    for (const auto& p : stroke) {
      min_x = std::min(min_x, p[0] - p[2]);
      max_x = std::max(max_x, p[0] + p[2]);
      min_y = std::min(min_y, p[1] - p[2]);
      max_y = std::max(max_y, p[1] + p[2]);
    }
  }
  for (auto& stroke : word.strokes) {
    for (auto& p : stroke) {
      p[0] -= min_x;
      p[1] -= min_y;
    }
  }
  word.width = static_cast<int>(std::ceil(max_x - min_x)) + 1;
  word.height = static_cast<int>(std::ceil(max_y - min_y)) + 1;
}

ScribbleWord plan_scribble(Rng& rng) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double length = rng.range(55.0, 135.0);
  const double slope = rng.range(-0.18, 0.18);
  const double amp1 = rng.range(4.0, 9.0);
  const double freq1 = rng.range(0.035, 0.08);
  const double phase1 = rng.range(0.0, two_pi);
  const double amp2 = rng.range(1.5, 3.5);
  const double freq2 = rng.range(0.14, 0.3);
  const double phase2 = rng.range(0.0, two_pi);
  const double pen = rng.range(1.3, 2.1);
  const double pen_freq = rng.range(0.02, 0.05);
  const double pen_phase = rng.range(0.0, two_pi);

  ScribbleWord word;
  word.strokes.emplace_back();
  for (double t = 0.0; t <= length; t += 0.5) {
    const double x = t;
    const double y = slope * t + amp1 * std::sin(two_pi * freq1 * t + phase1) +
                     amp2 * std::sin(two_pi * freq2 * t + phase2);
    const double r = std::max(0.8, pen + 0.9 * std::sin(two_pi * pen_freq * t + pen_phase));
    word.strokes.back().push_back({x, y, r});
  }
  finish_scribble(word);
  return word;
}

// One hand-drawn pen segment from (x0,y0) to (x1,y1): slightly bowed, with
// endpoint jitter and a radius that drifts along the path.
std::vector<std::array<double, 3>> pen_segment(Rng& rng, double x0, double y0,
                                               double x1, double y1, double pen) {
  x0 += rng.range(-0.7, 0.7);
  y0 += rng.range(-0.7, 0.7);
  x1 += rng.range(-0.7, 0.7);
  y1 += rng.range(-0.7, 0.7);
  const double bow = rng.range(-0.9, 0.9);
  const double drift = rng.range(-0.15, 0.15);
  const double dx = x1 - x0, dy = y1 - y0;
  const double len = std::max(1.0, std::hypot(dx, dy));
  // Unit normal for the bow displacement.
  const double nx = -dy / len, ny = dx / len;
  std::vector<std::array<double, 3>> stroke;
  const int steps = std::max(2, static_cast<int>(len * 2.0));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const double arch = bow * 4.0 * t * (1.0 - t);  // 0 at ends, bow at middle
    stroke.push_back({x0 + dx * t + nx * arch, y0 + dy * t + ny * arch,
                      std::max(0.8, pen + drift * (2.0 * t - 1.0))});
  }
  return stroke;
}

// Block lettering: separate letter-like marks built from straight-ish pen
// segments in per-letter boxes, spaced like printed type. Deliberately the
// hard case for the classifier -- neat hand lettering shares the stroke
// width, component count, and spacing statistics of machine print, so some
// of these words are only recoverable from their spatial context.
ScribbleWord plan_block_word(Rng& rng) {
  ScribbleWord word;
  const int letters = rng.range(2, 6);
  const double height = rng.range(20.0, 30.0);
  const double pen = rng.range(1.7, 2.2);
  double x = 0.0;
  for (int li = 0; li < letters; ++li) {
    const double h = height * rng.range(0.94, 1.06);
    const double w = h * rng.range(0.55, 0.85);
    const double top = rng.range(-1.0, 1.0);
    const int shape = static_cast<int>(rng.below(8));
    auto seg = [&](double ax, double ay, double bx, double by) {
      word.strokes.push_back(
          pen_segment(rng, x + ax * w, top + ay * h, x + bx * w, top + by * h, pen));
    };
    switch (shape) {
      case 0:  // L
        seg(0.1, 0.0, 0.1, 1.0);
        seg(0.1, 1.0, 0.9, 1.0);
        break;
      case 1:  // T
        seg(0.0, 0.0, 1.0, 0.0);
        seg(0.5, 0.0, 0.5, 1.0);
        break;
      case 2:  // H
        seg(0.1, 0.0, 0.1, 1.0);
        seg(0.9, 0.0, 0.9, 1.0);
        seg(0.1, 0.5, 0.9, 0.5);
        break;
      case 3:  // N
        seg(0.1, 1.0, 0.1, 0.0);
        seg(0.1, 0.0, 0.9, 1.0);
        seg(0.9, 1.0, 0.9, 0.0);
        break;
      case 4:  // Z
        seg(0.0, 0.0, 1.0, 0.0);
        seg(1.0, 0.0, 0.0, 1.0);
        seg(0.0, 1.0, 1.0, 1.0);
        break;
      case 5:  // V
        seg(0.0, 0.0, 0.5, 1.0);
        seg(0.5, 1.0, 1.0, 0.0);
        break;
      case 6:  // X
        seg(0.0, 0.0, 1.0, 1.0);
        seg(1.0, 0.0, 0.0, 1.0);
        break;
      default:  // U
        seg(0.1, 0.0, 0.1, 0.85);
        seg(0.1, 0.85, 0.9, 0.85);
        seg(0.9, 0.85, 0.9, 0.0);
        break;
    }
    x += w + rng.range(2.0, 4.0);
  }
  finish_scribble(word);
  return word;
}

void draw_scribble(PageCanvas& c, const ScribbleWord& word, int x0, int y0) {
  for (const auto& stroke : word.strokes) {
    for (const auto& p : stroke) {
      const double cx = x0 + p[0];
      const double cy = y0 + p[1];
      const double r = p[2];
      const int lo_y = static_cast<int>(std::floor(cy - r));
      const int hi_y = static_cast<int>(std::ceil(cy + r));
      const int lo_x = static_cast<int>(std::floor(cx - r));
      const int hi_x = static_cast<int>(std::ceil(cx + r));
      for (int y = lo_y; y <= hi_y; ++y) {
        for (int x = lo_x; x <= hi_x; ++x) {
          const double dx = x - cx;
          const double dy = y - cy;
          if (dx * dx + dy * dy <= r * r) c.plot(x, y, kHand);
        }
      }
    }
  }
}

void render_annotations(PageCanvas& c, const PageSpec& spec, Rng& rng,
                        std::vector<Rect>& reserved) {
  for (int a = 0; a < spec.annotations; ++a) {
    const int word_count = rng.range(2, 4);
    // One writer per note: a cluster is either cursive or block-lettered.
    const bool block = rng.chance(0.5);
    std::vector<ScribbleWord> words;
    std::vector<int> gaps;
    int total_width = 0;
    int cluster_height = 0;
    for (int wi = 0; wi < word_count; ++wi) {
      words.push_back(block ? plan_block_word(rng) : plan_scribble(rng));
      total_width += words.back().width;
      cluster_height = std::max(cluster_height, words.back().height);
      if (wi + 1 < word_count) {
        gaps.push_back(rng.range(12, 26));
        total_width += gaps.back();
      }
    }
    const int max_x = spec.width - kMargin - total_width;
    const int max_y = spec.height - kMargin - cluster_height;
    if (max_x < kMargin || max_y < kMargin) continue;  // cluster cannot fit

    bool placed = false;
    Rect rect{};
    for (int attempt = 0; attempt < 60 && !placed; ++attempt) {
      const int x = rng.range(kMargin, max_x);
      const int y = rng.range(kMargin, max_y);
      rect = {x, y, x + total_width - 1, y + cluster_height - 1};
      placed = clear_of_reserved(rect, reserved, 10);
    }
    if (!placed) continue;

    int x = rect.x0;
    for (std::size_t wi = 0; wi < words.size(); ++wi) {
      const int y = rect.y0 + (cluster_height - words[wi].height) / 2;
      draw_scribble(c, words[wi], x, y);
      x += words[wi].width;
      if (wi < gaps.size()) x += gaps[wi];
    }
    reserved.push_back(rect);
  }
}

// --- noise -------------------------------------------------------------------

bool region_ink_free(const BinaryImage& img, int x0, int y0, int x1, int y1) {
  for (int y = std::max(0, y0); y <= std::min(img.height() - 1, y1); ++y) {
    for (int x = std::max(0, x0); x <= std::min(img.width() - 1, x1); ++x) {
      if (img.get(x, y)) return false;
    }
  }
  return true;
}

// Pepper blobs: filled ellipses 3-8 px across. Too big for kfill to remove,
// so they reach segmentation and give the classifier its noise class.
void render_blobs(PageCanvas& c, const PageSpec& spec, Rng& rng) {
  if (spec.noise_density <= 0.0) return;
  for (int b = 0; b < spec.blob_count; ++b) {
    const int bw = rng.range(3, 8);
    const int bh = rng.range(3, 8);
    for (int attempt = 0; attempt < 40; ++attempt) {
      const int x = rng.range(8, spec.width - 9 - bw);
      const int y = rng.range(8, spec.height - 9 - bh);
      if (!region_ink_free(*c.img, x - 4, y - 4, x + bw + 3, y + bh + 3)) continue;
      const double cx = x + (bw - 1) / 2.0;
      const double cy = y + (bh - 1) / 2.0;
      const double rx = bw / 2.0;
      const double ry = bh / 2.0;
      for (int yy = y; yy < y + bh; ++yy) {
        for (int xx = x; xx < x + bw; ++xx) {
          const double nx = (xx - cx) / rx;
          const double ny = (yy - cy) / ry;
          if (nx * nx + ny * ny <= 1.0) c.plot(xx, yy, kNoise);
        }
      }
      break;
    }
  }
}

// Salt specks: 1x1 / 2x1 / 1x2 marks placed with one clear pixel around them
// so the kfill stage can remove every one of them.
void render_salt(PageCanvas& c, const PageSpec& spec, Rng& rng) {
  if (spec.noise_density <= 0.0) return;
  const long count = std::lround(spec.noise_density *
                                 static_cast<double>(spec.width) *
                                 static_cast<double>(spec.height) / 1000.0);
  for (long i = 0; i < count; ++i) {
    const int shape = static_cast<int>(rng.below(5));  // 0-2 dot, 3 wide, 4 tall
    const int sw = shape == 3 ? 2 : 1;
    const int sh = shape == 4 ? 2 : 1;
    const int x = rng.range(2, spec.width - 3 - sw);
    const int y = rng.range(2, spec.height - 3 - sh);
    if (!region_ink_free(*c.img, x - 1, y - 1, x + sw, y + sh)) continue;
    fill_rect(c, x, y, x + sw - 1, y + sh - 1, kNoise);
  }
}

// Dark border strips, applied after rotation (like scanner shadows on the
// final scan). Long and thin and touching the page edge, so the edge-removal
// rules can identify them.
void render_border_strips(PageCanvas& c, const PageSpec& spec, Rng& rng) {
  if (!spec.border_artifacts) return;
  const int w = spec.width;
  const int h = spec.height;
  const int strips = rng.range(1, 2);
  for (int i = 0; i < strips; ++i) {
    const int side = rng.range(0, 3);  // 0 top, 1 bottom, 2 left, 3 right
    const int thickness = rng.range(3, 8);
    if (side <= 1) {
      const int len = static_cast<int>(w * rng.range(0.55, 0.95));
      const int off = rng.range(0, w - len);
      const int y0 = side == 0 ? 0 : h - thickness;
      fill_rect(c, off, y0, off + len - 1, y0 + thickness - 1, kNoise);
    } else {
      const int len = static_cast<int>(h * rng.range(0.55, 0.95));
      const int off = rng.range(0, h - len);
      const int x0 = side == 2 ? 0 : w - thickness;
      fill_rect(c, x0, off, x0 + thickness - 1, off + len - 1, kNoise);
    }
  }
}

void validate_spec(const PageSpec& spec) {
  if (spec.width < 2 * kMargin + kCellWidth || spec.height < 2 * kMargin + kCellHeight) {
    throw ParamError("page too small: need at least " +
                     std::to_string(2 * kMargin + kCellWidth) + "x" +
                     std::to_string(2 * kMargin + kCellHeight));
  }
  if (spec.dpi <= 0) throw ParamError("dpi must be positive");
  if (spec.printed_lines < 0) throw ParamError("printed_lines must be non-negative");
  if (spec.annotations < 0) throw ParamError("annotations must be non-negative");
  if (spec.blob_count < 0) throw ParamError("blob_count must be non-negative");
  if (spec.noise_density < 0.0) throw ParamError("noise_density must be non-negative");
  if (!(std::abs(spec.skew_deg) <= 15.0)) {
    throw ParamError("skew_deg out of range (|skew| <= 15)");
  }
  if (spec.intra_word_gap_min < 1 || spec.intra_word_gap_max < spec.intra_word_gap_min) {
    throw ParamError("invalid intra-word gap range");
  }
  if (spec.inter_word_gap_max < spec.inter_word_gap_min) {
    throw ParamError("invalid inter-word gap range");
  }
  if (spec.intra_word_gap_max >= spec.inter_word_gap_min) {
    throw ParamError("gap ranges must be disjoint (intra max < inter min)");
  }
}

}  // namespace

const char* to_string(PageStructure structure) {
  switch (structure) {
    case PageStructure::Free: return "free";
    case PageStructure::Form: return "form";
    case PageStructure::Table: return "table";
  }
  throw ParamError("invalid page structure");
}

PageStructure page_structure_from_string(const std::string& text) {
  if (text == "free") return PageStructure::Free;
  if (text == "form") return PageStructure::Form;
  if (text == "table") return PageStructure::Table;
  throw ParamError("unknown page structure: " + text);
}

GeneratedPage generate_page(const PageSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);

  GeneratedPage page;
  page.image = BinaryImage(spec.width, spec.height, spec.dpi);
  page.truth = LabelRaster(spec.width, spec.height, 0);
  PageCanvas canvas{&page.image, &page.truth};
  std::vector<Rect> reserved;

  switch (spec.structure) {
    case PageStructure::Free: render_free(canvas, spec, rng, reserved); break;
    case PageStructure::Form: render_form(canvas, spec, rng, reserved); break;
    case PageStructure::Table: render_table(canvas, spec, rng, reserved); break;
  }
  render_annotations(canvas, spec, rng, reserved);
  render_blobs(canvas, spec, rng);
  render_salt(canvas, spec, rng);

  if (spec.skew_deg != 0.0) {
    page.image = rotate(page.image, spec.skew_deg);
    page.truth = rotate(page.truth, spec.skew_deg);
  }
  render_border_strips(canvas, spec, rng);
  return page;
}

PageSpec derive_page_spec(std::uint64_t master_seed, int page_index) {
  if (page_index < 0) throw ParamError("page index must be non-negative");
  Rng rng(Rng::derive(master_seed, static_cast<std::uint64_t>(page_index)));
  PageSpec spec;
  spec.seed = rng.next_u64();
  constexpr PageStructure kCycle[3] = {PageStructure::Free, PageStructure::Form,
                                       PageStructure::Table};
  spec.structure = kCycle[page_index % 3];
  spec.printed_lines = rng.range(8, 13);
  spec.annotations = rng.range(2, 4);
  spec.noise_density = rng.range(0.08, 0.35);
  spec.blob_count = rng.range(3, 8);
  spec.skew_deg = rng.range(-3.0, 3.0);
  spec.border_artifacts = rng.chance(0.5);
  return spec;
}

std::string spec_digest(const PageSpec& spec) {
  std::ostringstream out;
  out << "seed=" << spec.seed << ";structure=" << to_string(spec.structure)
      << ";dpi=" << spec.dpi << ";size=" << spec.width << "x" << spec.height
      << ";lines=" << spec.printed_lines << ";annotations=" << spec.annotations
      << ";noise=" << format_double(spec.noise_density)
      << ";blobs=" << spec.blob_count
      << ";skew=" << format_double(spec.skew_deg)
      << ";border=" << (spec.border_artifacts ? 1 : 0)
      << ";intra=" << spec.intra_word_gap_min << "-" << spec.intra_word_gap_max
      << ";inter=" << spec.inter_word_gap_min << "-" << spec.inter_word_gap_max;
  return out.str();
}

CorpusOutput generate_corpus(int n_train, int n_test, std::uint64_t master_seed,
                             const std::filesystem::path& out_dir) {
  if (n_train < 1 || n_test < 1) throw ParamError("corpus counts must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create corpus directory " + out_dir.string() + ": " +
                  ec.message());
  }

  CorpusOutput out;
  out.train.split = "train";
  out.test.split = "test";
  DatasetManifest train_rel{"train", {}};
  DatasetManifest test_rel{"test", {}};

  auto emit = [&](const char* prefix, int index, int global_index,
                  DatasetManifest& rel, DatasetManifest& abs) {
    const PageSpec spec = derive_page_spec(master_seed, global_index);
    const GeneratedPage page = generate_page(spec);
    char base[32];
    std::snprintf(base, sizeof(base), "%s_%04d", prefix, index);
    const std::string image_name = std::string(base) + ".pbm";
    const std::string truth_name = std::string(base) + ".pgm";
    write_pbm(page.image, out_dir / image_name);
    write_pgm(page.truth, out_dir / truth_name, 3);
    const std::string digest = spec_digest(spec);
    rel.entries.push_back({image_name, truth_name, digest});
    abs.entries.push_back({(out_dir / image_name).string(),
                           (out_dir / truth_name).string(), digest});
  };

  for (int i = 0; i < n_train; ++i) emit("train", i, i, train_rel, out.train);
  for (int i = 0; i < n_test; ++i) emit("test", i, n_train + i, test_rel, out.test);

  out.train_manifest = out_dir / "train.manifest";
  out.test_manifest = out_dir / "test.manifest";
  save_manifest(train_rel, out.train_manifest);
  save_manifest(test_rel, out.test_manifest);
  return out;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "# hpsep dataset manifest\n";
  out << "# split: " << manifest.split << "\n";
  out << "# columns: image\ttruth\tspec\n";
  for (const ManifestEntry& e : manifest.entries) {
    out << e.image_path << '\t' << e.truth_path << '\t' << e.digest << '\n';
  }
  write_file_atomic(path, out.str());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  DatasetManifest manifest;
  const std::filesystem::path dir = path.parent_path();
  std::size_t pos = 0;
  int line_number = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string split_tag = "# split:";
      if (line.compare(0, split_tag.size(), split_tag) == 0) {
        std::string value = line.substr(split_tag.size());
        const std::size_t first = value.find_first_not_of(" \t");
        manifest.split = first == std::string::npos ? "" : value.substr(first);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::size_t field_start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', field_start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(field_start));
        break;
      }
      fields.push_back(line.substr(field_start, tab - field_start));
      field_start = tab + 1;
    }
    if (fields.size() != 3) {
      throw FormatError("manifest " + path.string() + " line " +
                        std::to_string(line_number) +
                        ": expected 3 tab-separated fields, got " +
                        std::to_string(fields.size()));
    }
    auto resolve = [&](const std::string& p) {
      const std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : dir / fp;
    };
    const std::filesystem::path image_path = resolve(fields[0]);
    const std::filesystem::path truth_path = resolve(fields[1]);
    if (!std::filesystem::exists(image_path)) {
      throw IoError("manifest references missing file: " + image_path.string());
    }
    if (!std::filesystem::exists(truth_path)) {
      throw IoError("manifest references missing file: " + truth_path.string());
    }
    manifest.entries.push_back({image_path.string(), truth_path.string(), fields[2]});
  }
  return manifest;
}

}  // namespace hpsep
