// Generates the glyph atlas shipped in core/assets/glyphs.lpg from a small
// stroke font. Letters are 47.5 mm wide, digits 44.5 mm, cap height 75 mm,
// stroke 10 mm, rasterised at 2 cells per mm.

#include "lpsynth/glyph_atlas.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <utility>
#include <vector>

namespace {

struct P {
  double x, y;
};
using Stroke = std::vector<P>;

Stroke arc(double cx, double cy, double rx, double ry, double deg0, double deg1, int steps = 32) {
  Stroke s;
  for (int i = 0; i <= steps; ++i) {
    const double a = (deg0 + (deg1 - deg0) * i / steps) * std::numbers::pi / 180.0;
    s.push_back({cx + rx * std::cos(a), cy - ry * std::sin(a)});
  }
  return s;
}

Stroke cat(Stroke a, const Stroke& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<Stroke> strokes_for(char c) {
  switch (c) {
    case 'A': return {{{0, 1}, {0.5, 0}, {1, 1}}, {{0.2, 0.62}, {0.8, 0.62}}};
    case 'B': return {{{0, 0}, {0, 1}},
                      {{0, 0}, {0.72, 0}, {0.94, 0.12}, {0.94, 0.36}, {0.72, 0.48}, {0, 0.48}},
                      {{0.72, 0.48}, {1, 0.6}, {1, 0.87}, {0.76, 1}, {0, 1}}};
    case 'C': return {arc(0.5, 0.5, 0.5, 0.5, 40, 320)};
    case 'D': return {{{0, 0}, {0, 1}}, cat(cat({{0, 0}}, arc(0.45, 0.5, 0.55, 0.5, 90, -90)), {{0, 1}})};
    case 'E': return {{{1, 0}, {0, 0}, {0, 1}, {1, 1}}, {{0, 0.5}, {0.8, 0.5}}};
    case 'F': return {{{1, 0}, {0, 0}, {0, 1}}, {{0, 0.5}, {0.8, 0.5}}};
    case 'G': return {arc(0.5, 0.5, 0.5, 0.5, 40, 320), {{1, 0.84}, {1, 0.56}, {0.55, 0.56}}};
    case 'H': return {{{0, 0}, {0, 1}}, {{1, 0}, {1, 1}}, {{0, 0.5}, {1, 0.5}}};
    case 'I': return {{{0.5, 0}, {0.5, 1}}, {{0.2, 0}, {0.8, 0}}, {{0.2, 1}, {0.8, 1}}};
    case 'J': return {cat({{1, 0}}, arc(0.5, 0.72, 0.5, 0.28, 0, -180))};
    case 'K': return {{{0, 0}, {0, 1}}, {{1, 0}, {0, 0.62}}, {{0.32, 0.42}, {1, 1}}};
    case 'L': return {{{0, 0}, {0, 1}, {1, 1}}};
    case 'M': return {{{0, 1}, {0, 0}, {0.5, 0.62}, {1, 0}, {1, 1}}};
    case 'N': return {{{0, 1}, {0, 0}, {1, 1}, {1, 0}}};
    case 'O': return {arc(0.5, 0.5, 0.5, 0.5, 0, 360, 48)};
    case 'P': return {{{0, 1}, {0, 0}, {0.72, 0}, {1, 0.15}, {1, 0.4}, {0.72, 0.55}, {0, 0.55}}};
    case 'Q': return {arc(0.5, 0.5, 0.5, 0.5, 0, 360, 48), {{0.6, 0.7}, {1, 1}}};
    case 'R': return {{{0, 1}, {0, 0}, {0.72, 0}, {1, 0.15}, {1, 0.4}, {0.72, 0.55}, {0, 0.55}}, {{0.5, 0.55}, {1, 1}}};
    case 'S': return {{{1, 0.1}, {0.8, 0}, {0.2, 0}, {0, 0.12}, {0, 0.38}, {0.2, 0.5}, {0.8, 0.5}, {1, 0.62},
                       {1, 0.88}, {0.8, 1}, {0.2, 1}, {0, 0.9}}};
    case 'T': return {{{0, 0}, {1, 0}}, {{0.5, 0}, {0.5, 1}}};
    case 'U': return {cat(cat({{0, 0}}, arc(0.5, 0.7, 0.5, 0.3, 180, 360)), {{1, 0}})};
    case 'V': return {{{0, 0}, {0.5, 1}, {1, 0}}};
    case 'W': return {{{0, 0}, {0.25, 1}, {0.5, 0.4}, {0.75, 1}, {1, 0}}};
    case 'X': return {{{0, 0}, {1, 1}}, {{1, 0}, {0, 1}}};
    case 'Y': return {{{0, 0}, {0.5, 0.5}, {1, 0}}, {{0.5, 0.5}, {0.5, 1}}};
    case 'Z': return {{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
    case '0': return {arc(0.5, 0.5, 0.5, 0.5, 0, 360, 48)};
    case '1': return {{{0.15, 0.22}, {0.6, 0}, {0.6, 1}}, {{0.15, 1}, {1, 1}}};
    case '2': return {{{0, 0.2}, {0.2, 0}, {0.8, 0}, {1, 0.2}, {1, 0.4}, {0, 1}, {1, 1}}};
    case '3': return {{{0, 0}, {1, 0}, {0.45, 0.42}, {0.8, 0.42}, {1, 0.6}, {1, 0.86}, {0.8, 1}, {0.2, 1}, {0, 0.88}}};
    case '4': return {{{0.75, 1}, {0.75, 0}, {0, 0.7}, {1, 0.7}}};
    case '5': return {{{1, 0}, {0, 0}, {0, 0.45}, {0.75, 0.45}, {1, 0.6}, {1, 0.86}, {0.8, 1}, {0.2, 1}, {0, 0.88}}};
    case '6': return {{{0.9, 0}, {0.3, 0}, {0, 0.35}, {0, 0.85}, {0.2, 1}, {0.8, 1}, {1, 0.85}, {1, 0.6}, {0.8, 0.45},
                       {0.2, 0.45}, {0, 0.6}}};
    case '7': return {{{0, 0}, {1, 0}, {0.35, 1}}};
    case '8': return {{{0.2, 0}, {0.8, 0}, {0.95, 0.12}, {0.95, 0.35}, {0.8, 0.47}, {0.2, 0.47}, {0.05, 0.35},
                       {0.05, 0.12}, {0.2, 0}},
                      {{0.2, 0.47}, {0.8, 0.47}, {1, 0.6}, {1, 0.87}, {0.8, 1}, {0.2, 1}, {0, 0.87}, {0, 0.6},
                       {0.2, 0.47}}};
    case '9': return {{{0.1, 1}, {0.7, 1}, {1, 0.65}, {1, 0.15}, {0.8, 0}, {0.2, 0}, {0, 0.15}, {0, 0.4}, {0.2, 0.55},
                       {0.8, 0.55}, {1, 0.4}}};
    default: return {};
  }
}

double segment_distance(P p, P a, P b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - p.x, ey = a.y + t * dy - p.y;
  return std::sqrt(ex * ex + ey * ey);
}

lpsynth::Glyph rasterize(char c, double width_mm, double height_mm, double stroke_mm, double cells_per_mm) {
  lpsynth::Glyph g;
  g.symbol = c;
  g.width_mm = width_mm;
  g.height_mm = height_mm;
  g.cols = static_cast<int>(std::lround(width_mm * cells_per_mm));
  g.rows = static_cast<int>(std::lround(height_mm * cells_per_mm));
  g.mask.assign(static_cast<std::size_t>(g.cols) * g.rows, 0);

  const double inset_x = stroke_mm / 2 + 2.0;
  const double inset_y = stroke_mm / 2;
  auto to_mm = [&](P p) {
    return P{inset_x + p.x * (width_mm - 2 * inset_x), inset_y + p.y * (height_mm - 2 * inset_y)};
  };
  std::vector<std::pair<P, P>> segments;
  for (const auto& s : strokes_for(c)) {
    for (std::size_t i = 1; i < s.size(); ++i) segments.emplace_back(to_mm(s[i - 1]), to_mm(s[i]));
  }
  for (int r = 0; r < g.rows; ++r) {
    for (int col = 0; col < g.cols; ++col) {
      const P center{(col + 0.5) / cells_per_mm, (r + 0.5) / cells_per_mm};
      for (const auto& [a, b] : segments) {
        if (segment_distance(center, a, b) <= stroke_mm / 2) {
          g.mask[static_cast<std::size_t>(r) * g.cols + col] = 1;
          break;
        }
      }
    }
  }
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the lpsynth glyph atlas"};
  std::string output = "glyphs.lpg";
  double cells_per_mm = 2.0;
  app.add_option("-o,--output", output, "Atlas file to write");
  app.add_option("--cells-per-mm", cells_per_mm, "Mask resolution");
  CLI11_PARSE(app, argc, argv);

  lpsynth::GlyphAtlas atlas;
  atlas.cap_height_mm = 75.0;
  atlas.cells_per_mm = cells_per_mm;
  for (char c = 'A'; c <= 'Z'; ++c) atlas.add(rasterize(c, 47.5, 75.0, 10.0, cells_per_mm));
  for (char c = '0'; c <= '9'; ++c) atlas.add(rasterize(c, 44.5, 75.0, 10.0, cells_per_mm));

  std::ofstream out(output, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << output << "\n";
    return 1;
  }
  out << atlas.serialize();
  return 0;
}
