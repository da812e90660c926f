#include "hpsep/font.hpp"

#include <map>

#include "hpsep/errors.hpp"

namespace hpsep {

namespace {

// Every glyph is a single 8-connected component and has ink in column 0 and
// column 4; the generator and the segmentation tests rely on both properties.
const std::map<char, GlyphRows> kGlyphs = {
    {'A', {".###.",
           "#...#",
           "#...#",
           "#####",
           "#...#",
           "#...#",
           "#...#"}},
    {'B', {"####.",
           "#...#",
           "#...#",
           "####.",
           "#...#",
           "#...#",
           "####."}},
    {'C', {".###.",
           "#...#",
           "#....",
           "#....",
           "#....",
           "#...#",
           ".###."}},
    {'D', {"####.",
           "#...#",
           "#...#",
           "#...#",
           "#...#",
           "#...#",
           "####."}},
    {'E', {"#####",
           "#....",
           "#....",
           "####.",
           "#....",
           "#....",
           "#####"}},
    {'F', {"#####",
           "#....",
           "#....",
           "####.",
           "#....",
           "#....",
           "#...."}},
    {'G', {".###.",
           "#...#",
           "#....",
           "#.###",
           "#...#",
           "#...#",
           ".###."}},
    {'H', {"#...#",
           "#...#",
           "#...#",
           "#####",
           "#...#",
           "#...#",
           "#...#"}},
    {'I', {"#####",
           "..#..",
           "..#..",
           "..#..",
           "..#..",
           "..#..",
           "#####"}},
    {'J', {"#####",
           "...#.",
           "...#.",
           "...#.",
           "#..#.",
           "#..#.",
           ".##.."}},
    {'K', {"#...#",
           "#..#.",
           "#.#..",
           "##...",
           "#.#..",
           "#..#.",
           "#...#"}},
    {'L', {"#....",
           "#....",
           "#....",
           "#....",
           "#....",
           "#....",
           "#####"}},
    {'M', {"#...#",
           "##.##",
           "#.#.#",
           "#.#.#",
           "#...#",
           "#...#",
           "#...#"}},
    {'N', {"#...#",
           "##..#",
           "#.#.#",
           "#.#.#",
           "#..##",
           "#...#",
           "#...#"}},
    {'O', {".###.",
           "#...#",
           "#...#",
           "#...#",
           "#...#",
           "#...#",
           ".###."}},
    {'P', {"####.",
           "#...#",
           "#...#",
           "####.",
           "#....",
           "#....",
           "#...."}},
    {'Q', {".###.",
           "#...#",
           "#...#",
           "#...#",
           "#.#.#",
           "#..#.",
           ".##.#"}},
    {'R', {"####.",
           "#...#",
           "#...#",
           "####.",
           "#.#..",
           "#..#.",
           "#...#"}},
    {'S', {".####",
           "#....",
           "#....",
           ".###.",
           "....#",
           "....#",
           "####."}},
    {'T', {"#####",
           "..#..",
           "..#..",
           "..#..",
           "..#..",
           "..#..",
           "..#.."}},
    {'U', {"#...#",
           "#...#",
           "#...#",
           "#...#",
           "#...#",
           "#...#",
           ".###."}},
    {'V', {"#...#",
           "#...#",
           "#...#",
           ".#.#.",
           ".#.#.",
           "..#..",
           "..#.."}},
    {'W', {"#...#",
           "#...#",
           "#...#",
           "#.#.#",
           "#.#.#",
           "##.##",
           "#...#"}},
    {'X', {"#...#",
           ".#.#.",
           "..#..",
           "..#..",
           "..#..",
           ".#.#.",
           "#...#"}},
    {'Y', {"#...#",
           ".#.#.",
           "..#..",
           "..#..",
           "..#..",
           "..#..",
           "..#.."}},
    {'Z', {"#####",
           "....#",
           "...#.",
           "..#..",
           ".#...",
           "#....",
           "#####"}},
    {'0', {".###.",
           "#...#",
           "#..##",
           "#.#.#",
           "##..#",
           "#...#",
           ".###."}},
    {'1', {"..#..",
           ".##..",
           "..#..",
           "..#..",
           "..#..",
           "..#..",
           "#####"}},
    {'2', {".###.",
           "#...#",
           "....#",
           "...#.",
           "..#..",
           ".#...",
           "#####"}},
    {'3', {"####.",
           "....#",
           "....#",
           ".###.",
           "....#",
           "....#",
           "####."}},
    {'4', {"#..#.",
           "#..#.",
           "#..#.",
           "#####",
           "...#.",
           "...#.",
           "...#."}},
    {'5', {"#####",
           "#....",
           "#....",
           "####.",
           "....#",
           "....#",
           "####."}},
    {'6', {".###.",
           "#....",
           "#....",
           "####.",
           "#...#",
           "#...#",
           ".###."}},
    {'7', {"#####",
           "....#",
           "...#.",
           "..#..",
           ".#...",
           "#....",
           "#...."}},
    {'8', {".###.",
           "#...#",
           "#...#",
           ".###.",
           "#...#",
           "#...#",
           ".###."}},
    {'9', {".###.",
           "#...#",
           "#...#",
           ".####",
           "....#",
           "....#",
           ".###."}},
};

}  // namespace

bool glyph_supported(char c) { return kGlyphs.count(c) != 0; }

const GlyphRows& glyph_rows(char c) {
  auto it = kGlyphs.find(c);
  if (it == kGlyphs.end()) {
    throw ParamError(std::string("unsupported glyph: '") + c + "'");
  }
  return it->second;
}

const std::string& glyph_alphabet() {
  static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  return alphabet;
}

}  // namespace hpsep
