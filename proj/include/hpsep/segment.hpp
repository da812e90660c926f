#pragma once

#include <vector>

#include "hpsep/raster.hpp"

namespace hpsep {

/// One smeared text row: the connected components it owns, in reading order.
struct PseudoLine {
  BoundingBox bbox;  // union of component bboxes
  std::vector<ConnectedComponent> components;  // ascending x_min
};

/// A group of consecutive components within a line, the basic block that is
/// classified and regrouped downstream.
struct PseudoWord {
  int id = 0;       // globally unique, deterministic
  int line_id = 0;
  BoundingBox bbox;
  std::vector<ConnectedComponent> components;
  std::int64_t pixel_count = 0;
};

/// Histogram of horizontal gaps between adjacent component bounding boxes in
/// a line. `paired_bins[b] = counts[2+2b] + counts[3+2b]`; gaps below 2 px do
/// not participate in threshold selection.
struct GapHistogram {
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> paired_bins;
};

/// Fills every maximal horizontal white run of length <= threshold that lies
/// strictly between two ink pixels of the same row.
BinaryImage rlsa_horizontal(const BinaryImage& img, int threshold);

/// Vertical analogue of rlsa_horizontal.
BinaryImage rlsa_vertical(const BinaryImage& img, int threshold);

/// Bitwise AND of the horizontal and vertical smears of the input.
BinaryImage classical_rlsa(const BinaryImage& img, int h_threshold, int v_threshold);

/// First-smear line threshold: 3x the median component height, clamped to
/// [10, 500] px at 300 dpi (clamp scales with image dpi).
int line_smear_threshold(const std::vector<ConnectedComponent>& comps, int dpi,
                         double factor = 3.0);

/// Extracts pseudo-lines: horizontal smear, then components of the smeared
/// image define the lines; original components are assigned to the smeared
/// region that contains them. Lines are ordered top-to-bottom.
std::vector<PseudoLine> extract_lines(const BinaryImage& img, double line_factor = 3.0);

/// Gap histogram of a line with >= 2 components (empty histogram otherwise).
GapHistogram gap_histogram(const PseudoLine& line);

/// Word-gap threshold d_hs from the paired-bin histogram: start at the bin
/// argmax, walk right until the first rise, d_hs = exit index + 2 px. If the
/// walk exhausts the bins, falls back to 2*argmax + 3 (upper edge of the peak
/// bin). Throws ParamError on an all-zero histogram.
int word_gap_threshold(const GapHistogram& h);

/// Horizontal gap between two bboxes in reading order: x_min(b) - x_max(a) - 1,
/// floored at 0 for overlapping or touching boxes.
int horizontal_gap(const BoundingBox& a, const BoundingBox& b);

/// Double-smearing segmentation: per line, merge consecutive components whose
/// gap is <= that line's d_hs. Single-component lines and degenerate
/// histograms yield one word per component.
std::vector<PseudoWord> segment_words(const BinaryImage& img, double line_factor = 3.0);
std::vector<PseudoWord> segment_words(const std::vector<PseudoLine>& lines);

}  // namespace hpsep
