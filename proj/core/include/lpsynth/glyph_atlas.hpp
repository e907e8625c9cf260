#pragma once

#include "lpsynth/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lpsynth {

/// Bitmap mask of one character with its physical metrics.
struct Glyph {
  char symbol = 0;
  double width_mm = 0.0;
  double height_mm = 0.0;
  int cols = 0;
  int rows = 0;
  std::vector<std::uint8_t> mask;  // row-major, 1 = ink

  bool ink(int col, int row) const { return mask[static_cast<std::size_t>(row) * cols + col] != 0; }
  /// Fraction of mask cells that are ink.
  double coverage() const;
};

class MissingGlyph : public Error {
 public:
  explicit MissingGlyph(char c) : Error(std::string("glyph atlas has no glyph for '") + c + "'"), symbol(c) {}
  char symbol;
};

/// Container format (text):
///   LPSYNTH-GLYPHS 1
///   cap_height_mm <mm>
///   cells_per_mm <n>
///   glyph <char> <width_mm> <height_mm> <cols> <rows>
///   <rows lines of ceil(cols/4) hex digits, MSB = leftmost cell>
///   ... more glyphs ...
///   end
class GlyphAtlas {
 public:
  static GlyphAtlas parse(std::string_view text);
  static GlyphAtlas load(const std::filesystem::path& path);
  std::string serialize() const;

  void add(Glyph g);
  bool contains(char c) const { return glyphs_.count(c) != 0; }
  /// Throws MissingGlyph.
  const Glyph& at(char c) const;
  const std::map<char, Glyph>& glyphs() const { return glyphs_; }

  double cap_height_mm = 75.0;
  double cells_per_mm = 2.0;

 private:
  std::map<char, Glyph> glyphs_;
};

/// Location of the atlas shipped with the library: $LPSYNTH_ASSET_DIR if set,
/// else the install tree, else the source tree.
std::filesystem::path default_glyph_atlas_path();

}  // namespace lpsynth
