#pragma once

#include "lpsynth/annotation.hpp"
#include "lpsynth/camera.hpp"
#include "lpsynth/glyph_atlas.hpp"
#include "lpsynth/image.hpp"
#include "lpsynth/plate_grammar.hpp"
#include "lpsynth/scene_config.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lpsynth {

inline constexpr double kPlateWidthM = 0.52;
inline constexpr double kPlateHeightM = 0.11;

/// Rectangle in plate-local millimetres, origin at the plate's top-left corner.
struct MmRect {
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
  bool contains(double px, double py) const { return px >= x && px < x + w && py >= y && py < y + h; }
};

struct GlyphBox {
  char symbol = 0;
  MmRect box;
};

struct PlateGeometry {
  double width_mm = 520.0;
  double height_mm = 110.0;
  double border_mm = 4.0;           // black edge of the plate
  MmRect band{4.0, 4.0, 40.0, 102.0};  // blue country band
  std::vector<GlyphBox> glyphs;
};

/// Throws Error unless every glyph box lies inside the plate and no two overlap.
void validate(const PlateGeometry& geometry);

/// Glyph placement for a plate: three blocks with a wide gap after the region
/// block, compressed horizontally when nine wide symbols would not fit.
PlateGeometry layout_plate(const PlateString& plate, const GlyphAtlas& atlas);

/// White plate, band, border; glyphs painted black from the atlas masks.
/// Size is round(plate_mm * texels_per_mm) per axis.
Image rasterize_plate_texture(const PlateGeometry& geometry, const GlyphAtlas& atlas, double texels_per_mm);

inline constexpr double kCarNoiseSigma = 8.0;

/// Per-channel white noise filtered by a separable Gaussian (sigma in texels),
/// then stretched per channel to mean 0.5 / std 0.18.
Image generate_car_rear_texture(std::uint64_t seed, int width, int height, double sigma = kCarNoiseSigma);

struct RenderOptions {
  double plate_texels_per_mm = 4.0;
  double ambient = 0.15;
  bool keep_plate_mask = false;
  bool depth_of_field = true;
};

struct RenderedFrame {
  Image pixels;
  FrameAnnotation annotation;
  /// One byte per pixel, 1 where the pixel centre sees the plate (pre-blur).
  std::vector<std::uint8_t> plate_mask;
  double blur_sigma = 0.0;
};

/// World-space plate corners TL, TR, BR, BL for a plate centred at `center`.
std::array<Vec3, 4> plate_corners(const Vec3& center);

/// Exact annotation of a plate quad: corners clipped against the near plane,
/// projected, hull taken, clamped and checked against the image bounds.
FrameAnnotation annotate_plate(const PinholeCamera& camera, const std::array<Vec3, 4>& corners, int frame_index,
                               const std::string& label);

/// Thin-lens circle of confusion, in pixels, for a plate at `depth_m` with the
/// lens focused at `focus_m`.
double circle_of_confusion_px(const CameraPreset& camera, ImageSize resolution, double focus_m, double depth_m);

inline constexpr const char* kRenderEngine = "lpsynth-raster 1.0";

/// Scanline-free per-pixel ray caster over the plate, its mounting frame and
/// the car rear. Textures are built once; render() is const and thread-safe.
class SceneRenderer {
 public:
  SceneRenderer(const SceneConfig& config, const GlyphAtlas& atlas, RenderOptions options = {});

  RenderedFrame render(int frame_index) const;

  const SceneConfig& config() const { return config_; }
  const TrajectorySpline& trajectory() const { return trajectory_; }
  double focus_distance() const { return focus_m_; }
  /// Annotation header (everything except frames).
  SequenceAnnotation sequence_header() const;

 private:
  SceneConfig config_;
  RenderOptions options_;
  PinholeCamera camera_;
  TrajectorySpline trajectory_;
  Image plate_texture_;
  Image car_texture_;
  double focus_m_ = 0.0;
  std::string label_;
};

RenderedFrame render_frame(const SceneConfig& config, int frame_index, const GlyphAtlas& atlas,
                           const RenderOptions& options = {});

struct RenderedSequence {
  std::vector<RenderedFrame> frames;
  SequenceAnnotation annotation;
};

RenderedSequence render_sequence(const SceneConfig& config, const GlyphAtlas& atlas,
                                 const RenderOptions& options = {}, int jobs = 1);

/// Frontal, flat-lit plate cropped to its bounds at `dpi`; write it with
/// PngInfo{dpi} so a print measures 520 mm x 110 mm.
Image render_print_master(const PlateString& plate, const GlyphAtlas& atlas, double dpi);

}  // namespace lpsynth
