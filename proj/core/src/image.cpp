#include "lpsynth/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace lpsynth {

Image::Image(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0) * c, fill) {}

void fill_rect(Image& img, const PixelRect& rect, Rgb color) {
  const PixelRect r = intersect(rect, {0, 0, img.width, img.height});
  const std::uint8_t rgb[3] = {color.r, color.g, color.b};
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      if (img.channels == 1) {
        p[0] = color.r;
      } else {
        p[0] = rgb[0];
        p[1] = rgb[1];
        p[2] = rgb[2];
      }
    }
  }
}

void blit(Image& dst, const Image& src, int x, int y) {
  if (dst.channels != src.channels) throw Error("blit: channel count mismatch");
  const PixelRect r = intersect({x, y, src.width, src.height}, {0, 0, dst.width, dst.height});
  const std::size_t row_bytes = static_cast<std::size_t>(r.w) * src.channels;
  for (int row = r.y; row < r.y + r.h; ++row) {
    std::copy_n(src.pixel(r.x - x, row - y), row_bytes, dst.pixel(r.x, row));
  }
}

Image crop(const Image& src, const PixelRect& rect) {
  const PixelRect r = intersect(rect, {0, 0, src.width, src.height});
  Image out(r.w, r.h, src.channels);
  const std::size_t row_bytes = static_cast<std::size_t>(r.w) * src.channels;
  for (int row = 0; row < r.h; ++row) {
    std::copy_n(src.pixel(r.x, r.y + row), row_bytes, out.pixel(0, row));
  }
  return out;
}

Image to_gray(const Image& src) {
  if (src.channels == 1) return src;
  Image out(src.width, src.height, 1);
  const std::size_t n = static_cast<std::size_t>(src.width) * src.height;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = src.data.data() + i * src.channels;
    // Integer BT.601 luma, rounded.
    out.data[i] = static_cast<std::uint8_t>((299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000);
  }
  return out;
}

void sample_bilinear(const Image& img, double x, double y, double* out) {
  const double fx = x - 0.5;
  const double fy = y - 0.5;
  const double flx = std::floor(fx);
  const double fly = std::floor(fy);
  const double ax = fx - flx;
  const double ay = fy - fly;
  const int x0 = std::clamp(static_cast<int>(flx), 0, img.width - 1);
  const int y0 = std::clamp(static_cast<int>(fly), 0, img.height - 1);
  const int x1 = std::clamp(static_cast<int>(flx) + 1, 0, img.width - 1);
  const int y1 = std::clamp(static_cast<int>(fly) + 1, 0, img.height - 1);
  const std::uint8_t* p00 = img.pixel(x0, y0);
  const std::uint8_t* p10 = img.pixel(x1, y0);
  const std::uint8_t* p01 = img.pixel(x0, y1);
  const std::uint8_t* p11 = img.pixel(x1, y1);
  for (int c = 0; c < img.channels; ++c) {
    const double top = p00[c] + ax * (p10[c] - p00[c]);
    const double bottom = p01[c] + ax * (p11[c] - p01[c]);
    out[c] = top + ay * (bottom - top);
  }
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

Image gaussian_blur(const Image& src, double sigma) {
  if (sigma <= 0.0 || src.empty()) return src;
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = src.width;
  const int h = src.height;
  const int c = src.channels;

  std::vector<float> tmp(static_cast<std::size_t>(w) * h * c);
  std::vector<double> acc(c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int i = -radius; i <= radius; ++i) {
        const int sx = std::clamp(x + i, 0, w - 1);
        const std::uint8_t* p = src.pixel(sx, y);
        for (int ch = 0; ch < c; ++ch) acc[ch] += k[i + radius] * p[ch];
      }
      float* t = tmp.data() + src.index(x, y);
      for (int ch = 0; ch < c; ++ch) t[ch] = static_cast<float>(acc[ch]);
    }
  }

  Image out(w, h, c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int i = -radius; i <= radius; ++i) {
        const int sy = std::clamp(y + i, 0, h - 1);
        const float* t = tmp.data() + src.index(x, sy);
        for (int ch = 0; ch < c; ++ch) acc[ch] += k[i + radius] * t[ch];
      }
      std::uint8_t* o = out.pixel(x, y);
      for (int ch = 0; ch < c; ++ch) {
        o[ch] = static_cast<std::uint8_t>(std::clamp(std::lround(acc[ch]), 0L, 255L));
      }
    }
  }
  return out;
}

double psnr(const Image& a, const Image& b, const std::vector<std::uint8_t>* mask) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    throw Error("psnr: image shapes differ");
  }
  double sse = 0.0;
  std::size_t count = 0;
  const std::size_t n = static_cast<std::size_t>(a.width) * a.height;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask && !(*mask)[i]) continue;
    for (int ch = 0; ch < a.channels; ++ch) {
      const double d = double(a.data[i * a.channels + ch]) - double(b.data[i * b.channels + ch]);
      sse += d * d;
      ++count;
    }
  }
  if (count == 0) throw Error("psnr: empty comparison region");
  const double mse = sse / static_cast<double>(count);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

int png_color_type(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 3: return PNG_COLOR_TYPE_RGB;
    case 4: return PNG_COLOR_TYPE_RGBA;
    default: throw Error("png: unsupported channel count " + std::to_string(channels));
  }
}

}  // namespace

void write_png(const std::filesystem::path& path, const Image& img, const PngInfo& info) {
  const int color_type = png_color_type(img.channels);
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw Error("cannot open '" + path.string() + "' for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop pinfo = png ? png_create_info_struct(png) : nullptr;
  if (!png || !pinfo) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("png: allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &pinfo);
    throw Error("png: write failed for '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 3);
  png_set_IHDR(png, pinfo, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height),
               8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (info.dots_per_inch) {
    const auto ppm = static_cast<png_uint_32>(std::lround(*info.dots_per_inch / 0.0254));
    png_set_pHYs(png, pinfo, ppm, ppm, PNG_RESOLUTION_METER);
  }
  png_write_info(png, pinfo);
  for (int y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.pixel(0, y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &pinfo);
}

Image read_png(const std::filesystem::path& path, PngInfo* info) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw Error("cannot open '" + path.string() + "'");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop pinfo = png ? png_create_info_struct(png) : nullptr;
  if (!png || !pinfo) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("png: allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &pinfo, nullptr);
    throw Error("png: read failed for '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_read_info(png, pinfo);

  png_set_strip_16(png);
  png_set_packing(png);
  const int ct = png_get_color_type(png, pinfo);
  if (ct == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (ct == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, pinfo) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, pinfo, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, pinfo);

  const int w = static_cast<int>(png_get_image_width(png, pinfo));
  const int h = static_cast<int>(png_get_image_height(png, pinfo));
  const int channels = png_get_channels(png, pinfo);
  Image img(w, h, channels);
  for (int y = 0; y < h; ++y) png_read_row(png, img.pixel(0, y), nullptr);
  png_read_end(png, nullptr);

  if (info) {
    png_uint_32 rx = 0, ry = 0;
    int unit = 0;
    if (png_get_pHYs(png, pinfo, &rx, &ry, &unit) && unit == PNG_RESOLUTION_METER) {
      info->dots_per_inch = rx * 0.0254;
    } else {
      info->dots_per_inch.reset();
    }
  }
  png_destroy_read_struct(&png, &pinfo, nullptr);

  // Normalise gray+alpha / RGBA to the channel layouts the pipeline uses.
  if (channels == 2 || channels == 4) {
    const int keep = channels == 2 ? 1 : 3;
    Image out(w, h, keep);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
      for (int c = 0; c < keep; ++c) out.data[i * keep + c] = img.data[i * channels + c];
    }
    return out;
  }
  return img;
}

}  // namespace lpsynth
