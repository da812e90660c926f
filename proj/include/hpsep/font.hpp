#pragma once

#include <array>
#include <string>

namespace hpsep {

/// Tiny embedded 5x7 bitmap face (uppercase letters and digits) used by the
/// synthetic-page generator; no runtime font dependency. Every glyph is a
/// single 8-connected component and touches both outer columns, so letter
/// bounding boxes are exactly glyph-cell wide and drawn gaps survive as
/// bounding-box gaps.
inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

using GlyphRows = std::array<const char*, kGlyphHeight>; // '#' = ink

bool glyph_supported(char c);

/// Rows of the glyph for c (A-Z, 0-9). Throws ParamError for others.
const GlyphRows& glyph_rows(char c);

/// Characters the face supports, in a fixed order (A..Z then 0..9).
const std::string& glyph_alphabet();

}  // namespace hpsep
