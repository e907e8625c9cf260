#pragma once

#include "lpsynth/glyph_atlas.hpp"
#include "lpsynth/image.hpp"
#include "lpsynth/scene_config.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace lpsynth {

/// Screen canvas shown during re-capture. All rectangles are in canvas pixels.
struct PlaybackLayout {
  ImageSize canvas{3840, 2160};
  std::uint8_t background = 128;
  PixelRect embed{960, 540, 1920, 1080};
  PixelRect index_field{360, 960, 540, 240};   // left of the embedded frame
  PixelRect label_field{960, 1700, 1920, 240};  // below the embedded frame
  PixelRect marker_strip{960, 360, 1920, 120};  // above the embedded frame
  /// Nested squares (black, white, black) of side fiducial_size, 2/3 and 1/3
  /// of it, centred on these points. Order TL, TR, BR, BL.
  std::array<Vec2, 4> fiducial_centers{Vec2(200, 200), Vec2(3640, 200), Vec2(3640, 1960), Vec2(200, 1960)};
  int fiducial_size = 240;
  /// Rectified-canvas pixels per synthetic-frame pixel.
  double bbox_scale = 1.0;

  PixelRect fiducial_rect(int i) const;
  bool operator==(const PlaybackLayout&) const = default;
};

/// Throws Error unless the embed rect is 1920x1080 and all elements are
/// inside the canvas and pairwise disjoint.
void validate(const PlaybackLayout& layout);

PlaybackLayout load_layout(const std::filesystem::path& path);
void save_layout(const std::filesystem::path& path, const PlaybackLayout& layout);

// Marker strip: 32 equal cells, white = 1.
//   [1, 0, 24 index bits MSB first, 4 parity bits, 0, 1]
// Parity bit k makes index bits 6k..6k+5 (counted from the MSB) plus itself even.
inline constexpr int kMarkerCells = 32;
inline constexpr int kMarkerIndexBits = 24;
inline constexpr int kMaxMarkerIndex = (1 << kMarkerIndexBits) - 1;

std::array<std::uint8_t, kMarkerCells> encode_marker_bits(int frame_index);
/// nullopt on guard or parity failure.
std::optional<int> decode_marker_bits(const std::array<std::uint8_t, kMarkerCells>& bits);

/// Canvas with `frame` (1920x1080 RGB) embedded, the index and label drawn
/// as text, fiducials and the marker strip. Throws Error on a wrong size.
Image compose_playback_frame(const Image& frame, int frame_index, const std::string& label,
                             const PlaybackLayout& layout, const GlyphAtlas& atlas);

}  // namespace lpsynth
