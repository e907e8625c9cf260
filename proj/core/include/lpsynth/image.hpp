#pragma once

#include "lpsynth/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace lpsynth {

/// Interleaved 8-bit raster. Continuous coordinates put the centre of pixel
/// (i, j) at (i + 0.5, j + 0.5); the image covers [0, width) x [0, height).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c = 3, std::uint8_t fill = 0);

  bool empty() const { return width <= 0 || height <= 0; }
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * channels;
  }
  std::uint8_t* pixel(int x, int y) { return data.data() + index(x, y); }
  const std::uint8_t* pixel(int x, int y) const { return data.data() + index(x, y); }

  bool operator==(const Image&) const = default;
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

void fill_rect(Image& img, const PixelRect& rect, Rgb color);

/// Copies `src` into `dst` with its top-left corner at (x, y). Clipped.
void blit(Image& dst, const Image& src, int x, int y);

Image crop(const Image& src, const PixelRect& rect);

Image to_gray(const Image& src);

/// Bilinear sample at continuous coordinate (x, y), edge-clamped. Writes
/// `channels` doubles in [0, 255].
void sample_bilinear(const Image& img, double x, double y, double* out);

/// Separable Gaussian blur, kernel radius ceil(3 sigma), edge clamped.
/// sigma <= 0 returns the input unchanged.
Image gaussian_blur(const Image& src, double sigma);

/// PSNR over all channels; `mask` (one byte per pixel, nonzero = counted) is optional.
double psnr(const Image& a, const Image& b, const std::vector<std::uint8_t>* mask = nullptr);

struct PngInfo {
  /// Physical resolution written as a pHYs chunk when set.
  std::optional<double> dots_per_inch;
};

void write_png(const std::filesystem::path& path, const Image& img, const PngInfo& info = {});
Image read_png(const std::filesystem::path& path, PngInfo* info = nullptr);

}  // namespace lpsynth
