#include "lpsynth/glyph_atlas.hpp"

#include "detail/text.hpp"

#include <cstdlib>
#include <numeric>

#ifndef LPSYNTH_ASSET_DIR
#define LPSYNTH_ASSET_DIR ""
#endif
#ifndef LPSYNTH_INSTALL_ASSET_DIR
#define LPSYNTH_INSTALL_ASSET_DIR ""
#endif

namespace lpsynth {

double Glyph::coverage() const {
  if (mask.empty()) return 0.0;
  const auto ink = std::accumulate(mask.begin(), mask.end(), std::size_t{0},
                                   [](std::size_t a, std::uint8_t v) { return a + (v ? 1 : 0); });
  return static_cast<double>(ink) / static_cast<double>(mask.size());
}

void GlyphAtlas::add(Glyph g) {
  if (g.cols <= 0 || g.rows <= 0 || g.mask.size() != static_cast<std::size_t>(g.cols) * g.rows) {
    throw Error(std::string("glyph '") + g.symbol + "': mask size does not match dimensions");
  }
  const char c = g.symbol;
  glyphs_[c] = std::move(g);
}

const Glyph& GlyphAtlas::at(char c) const {
  const auto it = glyphs_.find(c);
  if (it == glyphs_.end()) throw MissingGlyph(c);
  return it->second;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

GlyphAtlas GlyphAtlas::parse(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t i = 0;
  auto next = [&]() -> std::string_view {
    while (i < lines.size()) {
      const auto l = detail::trim(lines[i++]);
      if (!l.empty() && l.front() != '#') return l;
    }
    throw Error("glyph atlas: unexpected end of file");
  };

  GlyphAtlas atlas;
  if (next() != "LPSYNTH-GLYPHS 1") throw Error("glyph atlas: bad header");
  for (;;) {
    const auto parts = detail::split_ws(next());
    if (parts.size() == 1 && parts[0] == "end") break;
    if (parts.size() == 2 && parts[0] == "cap_height_mm") {
      atlas.cap_height_mm = detail::parse_double(parts[1]);
    } else if (parts.size() == 2 && parts[0] == "cells_per_mm") {
      atlas.cells_per_mm = detail::parse_double(parts[1]);
    } else if (parts.size() == 6 && parts[0] == "glyph" && parts[1].size() == 1) {
      Glyph g;
      g.symbol = parts[1][0];
      g.width_mm = detail::parse_double(parts[2]);
      g.height_mm = detail::parse_double(parts[3]);
      g.cols = detail::parse_int<int>(parts[4]);
      g.rows = detail::parse_int<int>(parts[5]);
      if (g.cols <= 0 || g.rows <= 0) throw Error("glyph atlas: bad glyph dimensions");
      const std::size_t digits = static_cast<std::size_t>((g.cols + 3) / 4);
      g.mask.assign(static_cast<std::size_t>(g.cols) * g.rows, 0);
      for (int r = 0; r < g.rows; ++r) {
        const auto row = next();
        if (row.size() != digits) throw Error(std::string("glyph atlas: bad row width in glyph '") + g.symbol + "'");
        for (int c = 0; c < g.cols; ++c) {
          const int v = hex_value(row[static_cast<std::size_t>(c / 4)]);
          if (v < 0) throw Error("glyph atlas: non-hex row data");
          g.mask[static_cast<std::size_t>(r) * g.cols + c] = static_cast<std::uint8_t>((v >> (3 - c % 4)) & 1);
        }
      }
      atlas.add(std::move(g));
    } else {
      throw Error("glyph atlas: unexpected line");
    }
  }
  return atlas;
}

GlyphAtlas GlyphAtlas::load(const std::filesystem::path& path) {
  try {
    return parse(detail::read_text_file(path.string()));
  } catch (const MissingGlyph&) {
    throw;
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string GlyphAtlas::serialize() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "LPSYNTH-GLYPHS 1\n";
  out += "cap_height_mm " + detail::format_double(cap_height_mm) + "\n";
  out += "cells_per_mm " + detail::format_double(cells_per_mm) + "\n";
  for (const auto& [c, g] : glyphs_) {
    out += "glyph ";
    out += c;
    out += ' ' + detail::format_double(g.width_mm) + ' ' + detail::format_double(g.height_mm) + ' ' +
           std::to_string(g.cols) + ' ' + std::to_string(g.rows) + '\n';
    for (int r = 0; r < g.rows; ++r) {
      for (int c4 = 0; c4 < g.cols; c4 += 4) {
        int v = 0;
        for (int b = 0; b < 4; ++b) {
          v <<= 1;
          if (c4 + b < g.cols && g.ink(c4 + b, r)) v |= 1;
        }
        out += kHex[v];
      }
      out += '\n';
    }
  }
  out += "end\n";
  return out;
}

std::filesystem::path default_glyph_atlas_path() {
  // Environment override for installs moved away from their configured prefix.
  if (const char* env = std::getenv("LPSYNTH_ASSET_DIR"); env && *env) return std::filesystem::path(env) / "glyphs.lpg";
  const std::filesystem::path installed = std::filesystem::path(LPSYNTH_INSTALL_ASSET_DIR) / "glyphs.lpg";
  if (!std::string_view(LPSYNTH_INSTALL_ASSET_DIR).empty() && std::filesystem::exists(installed)) return installed;
  return std::filesystem::path(LPSYNTH_ASSET_DIR) / "glyphs.lpg";
}

}  // namespace lpsynth
