#include "lpsynth/renderer.hpp"

#include "lpsynth/parallel.hpp"
#include "lpsynth/rng.hpp"

#include "detail/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lpsynth {

namespace {

constexpr Rgb kPlateWhite{255, 255, 255};
constexpr Rgb kInk{0, 0, 0};
constexpr Rgb kBandBlue{0, 51, 153};
constexpr double kTextGapRegionMm = 26.0;  // room for the registration seals
constexpr double kTextGapMiddleMm = 10.0;
constexpr double kGlyphSpacingMm = 1.5;

// Scene furniture around the plate, in metres relative to the plate centre.
constexpr double kMountMarginM = 0.015;
constexpr double kMountOffsetM = 0.005;
constexpr double kCarWidthM = 1.8;
constexpr double kCarHeightM = 0.9;
constexpr double kCarRaiseM = 0.15;
constexpr double kCarOffsetM = 0.02;
constexpr double kCarTexelsPerM = 200.0;
constexpr double kNearPlaneM = 1e-3;

const double kBackground[3] = {0.22, 0.24, 0.27};
const double kMountAlbedo[3] = {0.03, 0.03, 0.03};

}  // namespace

void validate(const PlateGeometry& g) {
  const MmRect plate{0.0, 0.0, g.width_mm, g.height_mm};
  for (std::size_t i = 0; i < g.glyphs.size(); ++i) {
    const MmRect& a = g.glyphs[i].box;
    if (a.x < plate.x || a.y < plate.y || a.x + a.w > plate.w || a.y + a.h > plate.h) {
      throw Error(std::string("glyph box '") + g.glyphs[i].symbol + "' leaves the plate");
    }
    for (std::size_t j = i + 1; j < g.glyphs.size(); ++j) {
      const MmRect& b = g.glyphs[j].box;
      if (a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h) {
        throw Error("glyph boxes overlap");
      }
    }
  }
}

PlateGeometry layout_plate(const PlateString& plate, const GlyphAtlas& atlas) {
  PlateGeometry g;
  const double x0 = g.band.x + g.band.w + 4.0;
  const double x1 = g.width_mm - g.border_mm - 4.0;
  const double available = x1 - x0;
  const double cap = std::min(atlas.cap_height_mm, g.height_mm - 2.0 * g.border_mm - 8.0);
  const double top = 0.5 * (g.height_mm - cap);

  struct Item {
    char c;
    double width;
    double gap_before;
  };
  std::vector<Item> items;
  auto add_block = [&](const std::string& s, double gap) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      items.push_back({s[i], atlas.at(s[i]).width_mm, i == 0 ? gap : kGlyphSpacingMm});
    }
  };
  add_block(plate.region, 0.0);
  add_block(plate.middle, kTextGapRegionMm);
  add_block(plate.digits, kTextGapMiddleMm);

  double natural = 0.0;
  for (const auto& it : items) natural += it.gap_before + it.width;
  const double scale = natural > available ? available / natural : 1.0;
  double x = x0 + 0.5 * (available - natural * scale);
  for (const auto& it : items) {
    x += it.gap_before * scale;
    g.glyphs.push_back({it.c, {x, top, it.width * scale, cap}});
    x += it.width * scale;
  }
  return g;
}

Image rasterize_plate_texture(const PlateGeometry& g, const GlyphAtlas& atlas, double texels_per_mm) {
  if (!(texels_per_mm > 0.0)) throw Error("texel density must be positive");
  validate(g);
  for (const auto& gb : g.glyphs) atlas.at(gb.symbol);

  const int w = static_cast<int>(std::lround(g.width_mm * texels_per_mm));
  const int h = static_cast<int>(std::lround(g.height_mm * texels_per_mm));
  Image tex(w, h, 3);

  // Country code inside the band, white on blue.
  const Glyph* band_letter = atlas.contains('D') ? &atlas.at('D') : nullptr;
  const MmRect band_letter_box{g.band.x + 0.2 * g.band.w, g.band.y + 0.55 * g.band.h, 0.6 * g.band.w,
                               0.35 * g.band.h};

  auto glyph_ink = [](const Glyph& glyph, const MmRect& box, double x, double y) {
    const int col = std::min(glyph.cols - 1, static_cast<int>((x - box.x) / box.w * glyph.cols));
    const int row = std::min(glyph.rows - 1, static_cast<int>((y - box.y) / box.h * glyph.rows));
    return glyph.ink(col, row);
  };

  for (int j = 0; j < h; ++j) {
    const double y = (j + 0.5) / texels_per_mm;
    for (int i = 0; i < w; ++i) {
      const double x = (i + 0.5) / texels_per_mm;
      Rgb c = kPlateWhite;
      if (x < g.border_mm || x >= g.width_mm - g.border_mm || y < g.border_mm || y >= g.height_mm - g.border_mm) {
        c = kInk;
      } else if (g.band.contains(x, y)) {
        c = kBandBlue;
        if (band_letter && band_letter_box.contains(x, y) && glyph_ink(*band_letter, band_letter_box, x, y)) {
          c = kPlateWhite;
        }
      } else {
        for (const auto& gb : g.glyphs) {
          if (gb.box.contains(x, y)) {
            if (glyph_ink(atlas.at(gb.symbol), gb.box, x, y)) c = kInk;
            break;
          }
        }
      }
      std::uint8_t* p = tex.pixel(i, j);
      p[0] = c.r;
      p[1] = c.g;
      p[2] = c.b;
    }
  }
  return tex;
}

Image generate_car_rear_texture(std::uint64_t seed, int width, int height, double sigma) {
  if (width <= 0 || height <= 0) throw Error("car texture size must be positive");
  SplitMix64 rng(seed);
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<double> noise(n * 3);
  for (double& v : noise) v = rng.uniform01();

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double ksum = 0.0;
  for (int i = -radius; i <= radius; ++i) ksum += k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : k) v /= ksum;

  // Periodic boundary keeps the filtered field stationary across the texture.
  auto wrap = [](int v, int m) { return ((v % m) + m) % m; };
  std::vector<double> tmp(n * 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * noise[(static_cast<std::size_t>(y) * width + wrap(x + i, width)) * 3 + c];
        tmp[(static_cast<std::size_t>(y) * width + x) * 3 + c] = acc;
      }
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp[(static_cast<std::size_t>(wrap(y + i, height)) * width + x) * 3 + c];
        noise[(static_cast<std::size_t>(y) * width + x) * 3 + c] = acc;
      }
    }
  }

  Image out(width, height, 3);
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += noise[i * 3 + c];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) var += (noise[i * 3 + c] - mean) * (noise[i * 3 + c] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    const double gain = sd > 0.0 ? 0.18 / sd : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::clamp(0.5 + (noise[i * 3 + c] - mean) * gain, 0.0, 1.0);
      out.data[i * 3 + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  return out;
}

std::array<Vec3, 4> plate_corners(const Vec3& center) {
  const double hw = 0.5 * kPlateWidthM;
  const double hh = 0.5 * kPlateHeightM;
  return {center + Vec3(-hw, -hh, 0.0), center + Vec3(hw, -hh, 0.0), center + Vec3(hw, hh, 0.0),
          center + Vec3(-hw, hh, 0.0)};
}

FrameAnnotation annotate_plate(const PinholeCamera& camera, const std::array<Vec3, 4>& corners, int frame_index,
                               const std::string& label) {
  FrameAnnotation a;
  a.frame_index = frame_index;
  a.label = label;

  std::array<Vec3, 4> cam;
  bool all_front = true;
  for (int i = 0; i < 4; ++i) {
    cam[i] = camera.to_camera(corners[i]);
    if (!(cam[i].z() >= kNearPlaneM)) all_front = false;
  }

  // Sutherland-Hodgman against z >= near.
  std::vector<Vec3> poly;
  for (int i = 0; i < 4; ++i) {
    const Vec3& p = cam[i];
    const Vec3& q = cam[(i + 1) % 4];
    const bool pin = p.z() >= kNearPlaneM;
    const bool qin = q.z() >= kNearPlaneM;
    if (pin) poly.push_back(p);
    if (pin != qin) {
      const double t = (kNearPlaneM - p.z()) / (q.z() - p.z());
      poly.push_back(p + t * (q - p));
    }
  }
  const ImageSize size = camera.resolution();
  if (poly.empty()) {
    a.occluded = true;
    a.sides = {true, true, true, true};
    a.bbox = {0, 0, 0, 0};
    return a;
  }

  double minx = std::numeric_limits<double>::infinity(), miny = minx;
  double maxx = -minx, maxy = -minx;
  for (const Vec3& p : poly) {
    const double u = camera.fx() * p.x() / p.z() + camera.cx();
    const double v = camera.fy() * p.y() / p.z() + camera.cy();
    minx = std::min(minx, u);
    maxx = std::max(maxx, u);
    miny = std::min(miny, v);
    maxy = std::max(maxy, v);
  }
  if (all_front) {
    Quad q;
    for (int i = 0; i < 4; ++i) {
      q[i] = {camera.fx() * cam[i].x() / cam[i].z() + camera.cx(), camera.fy() * cam[i].y() / cam[i].z() + camera.cy()};
    }
    a.corners = q;
  }

  a.sides.left = minx < 0.0;
  a.sides.top = miny < 0.0;
  a.sides.right = maxx > size.width;
  a.sides.bottom = maxy > size.height;
  a.occluded = a.sides.any();

  auto clampd = [](double v, double hi) { return std::clamp(v, 0.0, hi); };
  const int x0 = static_cast<int>(std::floor(clampd(minx, size.width)));
  const int x1 = static_cast<int>(std::ceil(clampd(maxx, size.width)));
  const int y0 = static_cast<int>(std::floor(clampd(miny, size.height)));
  const int y1 = static_cast<int>(std::ceil(clampd(maxy, size.height)));
  a.bbox = {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
  if (a.bbox.empty()) a.bbox = {std::min(x0, size.width), std::min(y0, size.height), 0, 0};
  return a;
}

double circle_of_confusion_px(const CameraPreset& camera, ImageSize resolution, double focus_m, double depth_m) {
  const double f = camera.focal_length_mm;
  const double s = focus_m * 1000.0;
  const double d = depth_m * 1000.0;
  if (!(s > f) || !(d > 0.0)) return 0.0;
  const double coc_mm = f * f / (camera.f_number * (s - f)) * std::abs(d - s) / d;
  const double pitch_mm = camera.sensor_size_mm.x() / resolution.width;
  return coc_mm / pitch_mm;
}

SceneRenderer::SceneRenderer(const SceneConfig& config, const GlyphAtlas& atlas, RenderOptions options)
    : config_(config),
      options_(options),
      camera_(config.camera, config.resolution),
      trajectory_(trajectory_of(config)),
      plate_texture_(rasterize_plate_texture(layout_plate(config.plate, atlas), atlas, options.plate_texels_per_mm)),
      car_texture_(generate_car_rear_texture(derive_seed(config.trajectory_seed, kStreamCarTexture),
                                             static_cast<int>(std::lround(kCarWidthM * kCarTexelsPerM)),
                                             static_cast<int>(std::lround(kCarHeightM * kCarTexelsPerM)))),
      label_(format_label(config.plate)) {
  const PlatePose start = evaluate_trajectory(trajectory_, 0, config.scene_length);
  focus_m_ = camera_.to_camera(start.position).z();
}

SequenceAnnotation SceneRenderer::sequence_header() const {
  SequenceAnnotation seq;
  seq.sequence_id = config_.sequence_id;
  seq.data_type = DataType::synthetic;
  seq.render_engine = kRenderEngine;
  seq.resolution = config_.resolution;
  seq.camera = config_.camera;
  seq.light = config_.light;
  using detail::format_double;
  seq.parameters = {
      {"master_seed", std::to_string(config_.master_seed)},
      {"trajectory_seed", std::to_string(config_.trajectory_seed)},
      {"scene_length", std::to_string(config_.scene_length)},
      {"depth_range_m", format_double(config_.depth.min_m) + " " + format_double(config_.depth.max_m)},
      {"trajectory_curvature", format_double(config_.trajectory_curvature)},
      {"focus_distance_m", format_double(focus_m_)},
      {"plate_texels_per_mm", format_double(options_.plate_texels_per_mm)},
      {"ambient", format_double(options_.ambient)},
      {"depth_of_field", options_.depth_of_field ? "on" : "off"},
  };
  return seq;
}

RenderedFrame SceneRenderer::render(int frame_index) const {
  const PlatePose pose = evaluate_trajectory(trajectory_, frame_index, config_.scene_length);
  const Vec3& pc = pose.position;
  const ImageSize size = config_.resolution;
  const Vec3 normal(0.0, 0.0, -1.0);
  const LightPreset& light = config_.light;
  const double half_beam = 0.5 * light.beamwidth;

  auto shade = [&](const Vec3& x) {
    double diffuse = 0.0;
    switch (light.kind) {
      case LightKind::sun:
        diffuse = light.intensity * std::max(0.0, normal.dot(-light.direction));
        break;
      case LightKind::spot:
      case LightKind::area: {
        const Vec3 to_light = light.position - x;
        const double dist2 = to_light.squaredNorm();
        if (dist2 <= 0.0) break;
        const Vec3 l = to_light / std::sqrt(dist2);
        double cone = 1.0;
        if (light.kind == LightKind::spot) {
          const double angle = std::acos(std::clamp(light.direction.dot(-l), -1.0, 1.0));
          const double inner = 0.75 * half_beam;
          const double t = std::clamp((angle - inner) / (half_beam - inner), 0.0, 1.0);
          cone = 1.0 - t * t * (3.0 - 2.0 * t);
        } else {
          cone = std::max(0.0, light.direction.dot(-l));
        }
        diffuse = light.intensity * std::max(0.0, normal.dot(l)) * cone / dist2;
        break;
      }
    }
    return options_.ambient + diffuse;
  };

  RenderedFrame out;
  out.pixels = Image(size.width, size.height, 3);
  if (options_.keep_plate_mask) out.plate_mask.assign(static_cast<std::size_t>(size.width) * size.height, 0);

  const Vec3 c = camera_.center();
  const double plate_z = pc.z();
  const double mount_z = plate_z + kMountOffsetM;
  const double car_z = plate_z + kCarOffsetM;
  const double ptx = 1000.0 * options_.plate_texels_per_mm;  // plate texels per metre
  const double hw = 0.5 * kPlateWidthM, hh = 0.5 * kPlateHeightM;
  const double car_cy = pc.y() - kCarRaiseM;

  double rgb[3];
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const Vec3 d = camera_.ray({x + 0.5, y + 0.5});
      double albedo[3] = {kBackground[0], kBackground[1], kBackground[2]};
      double light_factor = 1.0;
      if (d.z() > 0.0) {
        const double tp = (plate_z - c.z()) / d.z();
        bool hit = false;
        if (tp > 0.0) {
          const double px = c.x() + tp * d.x() - pc.x();
          const double py = c.y() + tp * d.y() - pc.y();
          if (px >= -hw && px < hw && py >= -hh && py < hh) {
            sample_bilinear(plate_texture_, (px + hw) * ptx, (py + hh) * ptx, rgb);
            for (int k = 0; k < 3; ++k) albedo[k] = rgb[k] / 255.0;
            light_factor = shade(c + tp * d);
            if (options_.keep_plate_mask) out.plate_mask[static_cast<std::size_t>(y) * size.width + x] = 1;
            hit = true;
          }
        }
        const double tm = (mount_z - c.z()) / d.z();
        if (!hit && tm > 0.0) {
          const double px = c.x() + tm * d.x() - pc.x();
          const double py = c.y() + tm * d.y() - pc.y();
          if (std::abs(px) < hw + kMountMarginM && std::abs(py) < hh + kMountMarginM) {
            for (int k = 0; k < 3; ++k) albedo[k] = kMountAlbedo[k];
            light_factor = shade(c + tm * d);
            hit = true;
          }
        }
        const double tc = (car_z - c.z()) / d.z();
        if (!hit && tc > 0.0) {
          const double px = c.x() + tc * d.x() - pc.x();
          const double py = c.y() + tc * d.y() - car_cy;
          if (std::abs(px) < 0.5 * kCarWidthM && std::abs(py) < 0.5 * kCarHeightM) {
            sample_bilinear(car_texture_, (px + 0.5 * kCarWidthM) * kCarTexelsPerM,
                            (py + 0.5 * kCarHeightM) * kCarTexelsPerM, rgb);
            for (int k = 0; k < 3; ++k) albedo[k] = rgb[k] / 255.0;
            light_factor = shade(c + tc * d);
          }
        }
      }
      std::uint8_t* p = out.pixels.pixel(x, y);
      for (int k = 0; k < 3; ++k) {
        p[k] = static_cast<std::uint8_t>(std::lround(std::clamp(albedo[k] * light_factor, 0.0, 1.0) * 255.0));
      }
    }
  }

  out.annotation = annotate_plate(camera_, plate_corners(pc), frame_index, label_);

  if (options_.depth_of_field) {
    const Vec3 pcam = camera_.to_camera(pc);
    if (pcam.z() > 0.0) {
      out.blur_sigma = 0.5 * circle_of_confusion_px(config_.camera, size, focus_m_, pcam.z());
      out.pixels = gaussian_blur(out.pixels, out.blur_sigma);
    }
  }
  return out;
}

RenderedFrame render_frame(const SceneConfig& config, int frame_index, const GlyphAtlas& atlas,
                           const RenderOptions& options) {
  return SceneRenderer(config, atlas, options).render(frame_index);
}

RenderedSequence render_sequence(const SceneConfig& config, const GlyphAtlas& atlas, const RenderOptions& options,
                                 int jobs) {
  const SceneRenderer renderer(config, atlas, options);
  RenderedSequence seq;
  seq.frames.resize(static_cast<std::size_t>(config.scene_length));
  parallel_for(seq.frames.size(), jobs, [&](std::size_t i) { seq.frames[i] = renderer.render(static_cast<int>(i)); });
  seq.annotation = renderer.sequence_header();
  for (const auto& f : seq.frames) seq.annotation.frames.push_back(f.annotation);
  return seq;
}

Image render_print_master(const PlateString& plate, const GlyphAtlas& atlas, double dpi) {
  if (!(dpi > 0.0)) throw Error("print master: dpi must be positive");
  return rasterize_plate_texture(layout_plate(plate, atlas), atlas, dpi / 25.4);
}

}  // namespace lpsynth
