#pragma once

#include <utility>
#include <vector>

#include "hpsep/raster.hpp"

namespace hpsep {

/// Rules for dropping scanner/photocopy border artifacts.
struct EdgeRuleSet {
  int border_margin_px = -1;      // negative -> 0.02 * min(width, height)
  double span_fraction = 0.8;     // bbox spans this much of a page dimension
  double elongation_ratio = 20.0; // long/short side ratio
  double elongation_span = 0.3;   // longer side vs the parallel page dimension

  int resolve_margin(int width, int height) const;
};

struct PreprocessConfig {
  int kfill_k = 3;              // odd, >= 3
  double skew_range = 15.0;     // degrees, search is [-range, +range]
  double skew_resolution = 0.1; // degrees, fine-grid step
  EdgeRuleSet edge_rules;
};

/// Erases every component whose bbox touches the border margin AND either
/// spans >= span_fraction of a page dimension or is elongated (aspect >=
/// elongation_ratio with the longer side >= elongation_span of the parallel
/// page dimension). Everything else is kept bit-for-bit.
BinaryImage remove_edges(const BinaryImage& img, const EdgeRuleSet& rules);

/// Salt-and-pepper filter: alternating fill/unfill passes over k x k windows.
/// Within a pass, a homogeneous (k-2)x(k-2) core flips to the filling color V
/// when the window perimeter has c <= 1 circular runs of V and either
/// n > 3k-4 perimeter pixels of V, or n = 3k-4 with exactly 2 window corners
/// of V. Decisions read the pre-pass image; pixels outside the image count as
/// white. Iterates fill+unfill to a fixpoint, capped at 5 iterations.
BinaryImage kfill(const BinaryImage& img, int k);

/// Correction angle in [-skew_range, +skew_range] maximizing the variance of
/// the horizontal projection profile of the rotated image; coarse 1 deg grid,
/// then skew_resolution refinement around the coarse optimum. Throws
/// ParamError("no content") on a blank image.
double estimate_skew(const BinaryImage& img, const PreprocessConfig& config);

/// The profile-variance objective at one angle, computed from forward-rotated
/// ink coordinates. Shared with estimate_skew so exhaustive-grid checks
/// compare like with like. Pixels leaving the canvas are dropped, matching
/// the cropping behavior of rotate().
double skew_profile_variance(const std::vector<std::pair<int, int>>& ink_pixels,
                             int width, int height, double angle_deg);

struct PreprocessResult {
  BinaryImage image;
  double skew_correction_deg = 0.0; // angle the page was rotated by
};

/// Full cleaning chain: remove_edges -> kfill -> deskew -> kfill. A page that
/// is blank after filtering skips the skew stage (correction 0).
PreprocessResult preprocess(const BinaryImage& img, const PreprocessConfig& config);

}  // namespace hpsep
