#pragma once

#include "lpsynth/annotation.hpp"
#include "lpsynth/image.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lpsynth {

/// Rectangle of size (width, height) centred at `center`; its width axis
/// points along (cos angle, sin angle) in image coordinates, with angle in
/// [-pi/4, pi/4).
struct RotatedRect {
  Vec2 center = Vec2::Zero();
  Vec2 size = Vec2::Zero();
  double angle = 0.0;

  double area() const { return size.x() * size.y(); }
  /// Corners TL, TR, BR, BL in the rectangle's own frame.
  Quad corners() const;
};

/// Smallest-area enclosing rectangle by rotating calipers over the convex
/// hull. Throws Error when the points are (nearly) collinear.
RotatedRect min_area_rect(std::span<const Vec2> points);

/// Convex hull, counter-clockwise in a y-up frame, no collinear points.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

inline constexpr int kOcrHeight = 48;

/// Rotation-only deskew: the min-area rect of `corners` (clamped to the
/// image) is resampled upright in one bilinear warp at `out_height` rows and
/// round(out_height * w / h) columns. Shear and perspective are left intact.
Image deskew_crop(const Image& image, const Quad& corners, int out_height = kOcrHeight);

struct PreppedSample {
  std::string sample_id;
  Image image;
  std::string label;
  DataType provenance = DataType::synthetic;
  std::string sequence_id;
  int frame_index = 0;
};

/// "<sequence_id>_f<frame, 6 digits>"
std::string sample_id(const std::string& sequence_id, int frame_index);

/// Corners used for deskewing: the projected quad when present, else the
/// bbox outline (angle 0).
Quad deskew_corners(const FrameAnnotation& frame);

struct PrepOptions {
  int out_height = kOcrHeight;
  bool keep_occluded = false;
};

/// nullopt when the frame is occluded (unless kept) or its bbox is empty.
std::optional<PreppedSample> prep_frame(const Image& frame_image, const FrameAnnotation& frame,
                                        const SequenceAnnotation& seq, const PrepOptions& options = {});

struct ManifestEntry {
  std::string sample_id;
  std::string image_path;
  std::string label;
  DataType provenance = DataType::synthetic;
  std::string sequence_id;
  int frame_index = 0;

  bool operator==(const ManifestEntry&) const = default;
};

/// Tab-separated, one sample per line, with a leading '#' header line.
std::string format_manifest(std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> parse_manifest(std::string_view text);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace lpsynth
