#include "lpsynth/playback.hpp"

#include "detail/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace lpsynth {

namespace {

constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kWhite{255, 255, 255};

bool inside(const PixelRect& r, ImageSize canvas) {
  return r.x >= 0 && r.y >= 0 && r.x + r.w <= canvas.width && r.y + r.h <= canvas.height && !r.empty();
}

// Black text centred in `box`, glyph masks sampled nearest-neighbour.
void draw_text(Image& img, const PixelRect& box, const std::string& text, const GlyphAtlas& atlas) {
  const double cap_px = 0.6 * box.h;
  const double px_per_mm = cap_px / atlas.cap_height_mm;
  const double gap = 0.1 * cap_px;
  double total = 0.0;
  for (char c : text) total += (c == '-' ? 0.4 * cap_px : atlas.at(c).width_mm * px_per_mm) + gap;
  total -= gap;
  const double shrink = total > 0.9 * box.w ? 0.9 * box.w / total : 1.0;
  double x = box.x + 0.5 * (box.w - total * shrink);
  const double top = box.y + 0.5 * (box.h - cap_px);
  for (char c : text) {
    if (c == '-') {
      const double w = 0.4 * cap_px * shrink;
      fill_rect(img, {static_cast<int>(std::lround(x + 0.15 * w)), static_cast<int>(std::lround(top + 0.45 * cap_px)),
                      static_cast<int>(std::lround(0.7 * w)), static_cast<int>(std::lround(0.1 * cap_px))},
                kBlack);
      x += w + gap * shrink;
      continue;
    }
    const Glyph& g = atlas.at(c);
    const double w = g.width_mm * px_per_mm * shrink;
    const int x0 = static_cast<int>(std::floor(x)), x1 = static_cast<int>(std::ceil(x + w));
    const int y0 = static_cast<int>(std::floor(top)), y1 = static_cast<int>(std::ceil(top + cap_px));
    for (int py = std::max(y0, 0); py < std::min(y1, img.height); ++py) {
      const double v = (py + 0.5 - top) / cap_px;
      if (v < 0.0 || v >= 1.0) continue;
      const int row = std::min(g.rows - 1, static_cast<int>(v * g.rows));
      for (int px = std::max(x0, 0); px < std::min(x1, img.width); ++px) {
        const double u = (px + 0.5 - x) / w;
        if (u < 0.0 || u >= 1.0) continue;
        if (g.ink(std::min(g.cols - 1, static_cast<int>(u * g.cols)), row)) {
          std::uint8_t* p = img.pixel(px, py);
          p[0] = p[1] = p[2] = 0;
        }
      }
    }
    x += w + gap * shrink;
  }
}

PixelRect rect_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("layout: rectangle must be [x, y, w, h]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

nlohmann::json json_rect(const PixelRect& r) { return {r.x, r.y, r.w, r.h}; }

}  // namespace

PixelRect PlaybackLayout::fiducial_rect(int i) const {
  const Vec2& c = fiducial_centers.at(static_cast<std::size_t>(i));
  const int half = fiducial_size / 2;
  return {static_cast<int>(std::lround(c.x())) - half, static_cast<int>(std::lround(c.y())) - half, fiducial_size,
          fiducial_size};
}

void validate(const PlaybackLayout& l) {
  if (l.canvas.width <= 0 || l.canvas.height <= 0) throw Error("layout: canvas size must be positive");
  if (l.embed.w != 1920 || l.embed.h != 1080) throw Error("layout: embed rect must be 1920x1080");
  if (l.fiducial_size < 12 || l.fiducial_size % 6 != 0) throw Error("layout: fiducial size must be a multiple of 6");
  if (l.marker_strip.w < kMarkerCells) throw Error("layout: marker strip narrower than its cell count");
  if (!(l.bbox_scale > 0.0)) throw Error("layout: bbox scale must be positive");
  std::vector<std::pair<std::string, PixelRect>> parts{{"embed", l.embed},
                                                       {"index field", l.index_field},
                                                       {"label field", l.label_field},
                                                       {"marker strip", l.marker_strip}};
  for (int i = 0; i < 4; ++i) parts.emplace_back("fiducial " + std::to_string(i), l.fiducial_rect(i));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!inside(parts[i].second, l.canvas)) throw Error("layout: " + parts[i].first + " leaves the canvas");
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if (overlaps(parts[i].second, parts[j].second)) {
        throw Error("layout: " + parts[i].first + " overlaps " + parts[j].first);
      }
    }
  }
}

PlaybackLayout load_layout(const std::filesystem::path& path) {
  PlaybackLayout l;
  try {
    const auto j = nlohmann::json::parse(detail::read_text_file(path.string()));
    const auto canvas = j.at("canvas");
    l.canvas = {canvas.at(0).get<int>(), canvas.at(1).get<int>()};
    l.background = j.at("background").get<std::uint8_t>();
    l.embed = rect_json(j.at("embed"));
    l.index_field = rect_json(j.at("index_field"));
    l.label_field = rect_json(j.at("label_field"));
    l.marker_strip = rect_json(j.at("marker_strip"));
    const auto& fc = j.at("fiducial_centers");
    if (!fc.is_array() || fc.size() != 4) throw Error("layout: need four fiducial centres");
    for (std::size_t i = 0; i < 4; ++i) l.fiducial_centers[i] = {fc[i].at(0).get<double>(), fc[i].at(1).get<double>()};
    l.fiducial_size = j.at("fiducial_size").get<int>();
    l.bbox_scale = j.at("bbox_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("layout file " + path.string() + ": " + e.what());
  }
  validate(l);
  return l;
}

void save_layout(const std::filesystem::path& path, const PlaybackLayout& l) {
  validate(l);
  nlohmann::ordered_json j;
  j["canvas"] = {l.canvas.width, l.canvas.height};
  j["background"] = l.background;
  j["embed"] = json_rect(l.embed);
  j["index_field"] = json_rect(l.index_field);
  j["label_field"] = json_rect(l.label_field);
  j["marker_strip"] = json_rect(l.marker_strip);
  j["fiducial_centers"] = nlohmann::json::array();
  for (const Vec2& c : l.fiducial_centers) j["fiducial_centers"].push_back({c.x(), c.y()});
  j["fiducial_size"] = l.fiducial_size;
  j["bbox_scale"] = l.bbox_scale;
  detail::write_text_file_atomic(path.string(), j.dump(2) + "\n");
}

std::array<std::uint8_t, kMarkerCells> encode_marker_bits(int frame_index) {
  if (frame_index < 0 || frame_index > kMaxMarkerIndex) {
    throw Error("frame index " + std::to_string(frame_index) + " does not fit the marker strip");
  }
  std::array<std::uint8_t, kMarkerCells> bits{};
  bits[0] = 1;
  bits[1] = 0;
  for (int i = 0; i < kMarkerIndexBits; ++i) {
    bits[2 + i] = static_cast<std::uint8_t>((frame_index >> (kMarkerIndexBits - 1 - i)) & 1);
  }
  for (int k = 0; k < 4; ++k) {
    std::uint8_t p = 0;
    for (int i = 0; i < 6; ++i) p ^= bits[2 + 6 * k + i];
    bits[26 + k] = p;
  }
  bits[30] = 0;
  bits[31] = 1;
  return bits;
}

std::optional<int> decode_marker_bits(const std::array<std::uint8_t, kMarkerCells>& bits) {
  if (bits[0] != 1 || bits[1] != 0 || bits[30] != 0 || bits[31] != 1) return std::nullopt;
  for (int k = 0; k < 4; ++k) {
    std::uint8_t p = bits[26 + k];
    for (int i = 0; i < 6; ++i) p ^= bits[2 + 6 * k + i];
    if (p != 0) return std::nullopt;
  }
  int index = 0;
  for (int i = 0; i < kMarkerIndexBits; ++i) index = (index << 1) | bits[2 + i];
  return index;
}

Image compose_playback_frame(const Image& frame, int frame_index, const std::string& label,
                             const PlaybackLayout& layout, const GlyphAtlas& atlas) {
  if (frame.width != layout.embed.w || frame.height != layout.embed.h || frame.channels != 3) {
    throw Error("playback frame must be " + std::to_string(layout.embed.w) + "x" + std::to_string(layout.embed.h) +
                " RGB, got " + std::to_string(frame.width) + "x" + std::to_string(frame.height));
  }
  const auto bits = encode_marker_bits(frame_index);

  Image canvas(layout.canvas.width, layout.canvas.height, 3, layout.background);
  blit(canvas, frame, layout.embed.x, layout.embed.y);

  fill_rect(canvas, layout.index_field, kWhite);
  draw_text(canvas, layout.index_field, std::to_string(frame_index), atlas);
  fill_rect(canvas, layout.label_field, kWhite);
  draw_text(canvas, layout.label_field, label, atlas);

  const PixelRect& s = layout.marker_strip;
  for (int i = 0; i < kMarkerCells; ++i) {
    const int x0 = s.x + i * s.w / kMarkerCells;
    const int x1 = s.x + (i + 1) * s.w / kMarkerCells;
    fill_rect(canvas, {x0, s.y, x1 - x0, s.h}, bits[static_cast<std::size_t>(i)] ? kWhite : kBlack);
  }

  for (int i = 0; i < 4; ++i) {
    const PixelRect r = layout.fiducial_rect(i);
    const int step = layout.fiducial_size / 6;
    fill_rect(canvas, r, kBlack);
    fill_rect(canvas, {r.x + step, r.y + step, r.w - 2 * step, r.h - 2 * step}, kWhite);
    fill_rect(canvas, {r.x + 2 * step, r.y + 2 * step, r.w - 4 * step, r.h - 4 * step}, kBlack);
  }
  return canvas;
}

}  // namespace lpsynth
