// Independent reference implementations used as test oracles. None of these
// call into the library code they check.
#pragma once

#include "lpsynth/image.hpp"
#include "lpsynth/types.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace oracle {

using lpsynth::Vec2;

// Edit distances from `source` to every string over `alphabet` of length at
// most `max_len`, by breadth-first search over single edits. An optimal edit
// script never needs an intermediate longer than both endpoints (delete,
// substitute, then insert), so the bounded graph gives exact distances.
inline std::unordered_map<std::string, int> edit_distances_from(const std::string& source,
                                                                const std::string& alphabet, std::size_t max_len) {
  std::unordered_map<std::string, int> dist{{source, 0}};
  std::deque<std::string> queue{source};
  auto visit = [&](std::string s, int d) {
    if (s.size() > max_len) return;
    if (dist.emplace(s, d).second) queue.push_back(std::move(s));
  };
  while (!queue.empty()) {
    const std::string s = queue.front();
    queue.pop_front();
    const int d = dist[s] + 1;
    for (std::size_t i = 0; i < s.size(); ++i) {
      visit(s.substr(0, i) + s.substr(i + 1), d);
      for (char c : alphabet) {
        if (c == s[i]) continue;
        std::string t = s;
        t[i] = c;
        visit(std::move(t), d);
      }
    }
    for (std::size_t i = 0; i <= s.size(); ++i) {
      for (char c : alphabet) visit(s.substr(0, i) + c + s.substr(i), d);
    }
  }
  return dist;
}

// Every string over `alphabet` with length in [0, max_len].
inline std::vector<std::string> all_strings(const std::string& alphabet, std::size_t max_len) {
  std::vector<std::string> out{""};
  for (std::size_t begin = 0, len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (char c : alphabet) out.push_back(out[i] + c);
    }
    begin = end;
  }
  return out;
}

// Area of the tightest rectangle with edge direction theta around `pts`.
inline double rect_area_at(std::span<const Vec2> pts, double theta) {
  const Vec2 u(std::cos(theta), std::sin(theta));
  const Vec2 v(-u.y(), u.x());
  double a0 = std::numeric_limits<double>::infinity(), a1 = -a0, b0 = a0, b1 = -a0;
  for (const Vec2& p : pts) {
    a0 = std::min(a0, p.dot(u));
    a1 = std::max(a1, p.dot(u));
    b0 = std::min(b0, p.dot(v));
    b1 = std::max(b1, p.dot(v));
  }
  return (a1 - a0) * (b1 - b0);
}

// Minimum enclosing-rectangle area by a 360-angle sweep over one quarter
// turn, each of the best candidates polished by golden-section search
// within its sampling interval.
inline double min_rect_area_sweep(std::span<const Vec2> pts) {
  constexpr int kAngles = 360;
  const double step = 0.5 * std::numbers::pi / kAngles;
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < kAngles; ++i) samples.emplace_back(rect_area_at(pts, i * step), i * step);
  std::sort(samples.begin(), samples.end());
  double best = samples.front().first;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int k = 0; k < 8; ++k) {
    double lo = samples[static_cast<std::size_t>(k)].second - step;
    double hi = samples[static_cast<std::size_t>(k)].second + step;
    for (int it = 0; it < 200; ++it) {
      const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
      if (rect_area_at(pts, m1) < rect_area_at(pts, m2)) hi = m2;
      else lo = m1;
    }
    best = std::min(best, rect_area_at(pts, 0.5 * (lo + hi)));
  }
  return best;
}

// Orientation of the principal axis of the dark pixels (gray < threshold),
// from second-order central moments. Radians, in (-pi/2, pi/2].
inline double principal_axis(const lpsynth::Image& gray, int threshold) {
  double n = 0, sx = 0, sy = 0;
  for (int y = 0; y < gray.height; ++y) {
    for (int x = 0; x < gray.width; ++x) {
      if (*gray.pixel(x, y) < threshold) {
        n += 1;
        sx += x;
        sy += y;
      }
    }
  }
  const double mx = sx / n, my = sy / n;
  double mxx = 0, myy = 0, mxy = 0;
  for (int y = 0; y < gray.height; ++y) {
    for (int x = 0; x < gray.width; ++x) {
      if (*gray.pixel(x, y) < threshold) {
        mxx += (x - mx) * (x - mx);
        myy += (y - my) * (y - my);
        mxy += (x - mx) * (y - my);
      }
    }
  }
  return 0.5 * std::atan2(2.0 * mxy, mxx - myy);
}

// Downscale by an integer factor, averaging each k x k block.
inline lpsynth::Image box_downscale(const lpsynth::Image& src, int k) {
  lpsynth::Image out(src.width / k, src.height / k, src.channels);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      for (int c = 0; c < src.channels; ++c) {
        int sum = 0;
        for (int dy = 0; dy < k; ++dy) {
          for (int dx = 0; dx < k; ++dx) sum += src.pixel(x * k + dx, y * k + dy)[c];
        }
        out.pixel(x, y)[c] = static_cast<std::uint8_t>((sum + k * k / 2) / (k * k));
      }
    }
  }
  return out;
}

// 2-D DFT power spectrum of one channel; returns the fraction of non-DC
// energy at frequencies above half Nyquist in either axis.
inline double high_frequency_energy_fraction(const lpsynth::Image& img, int channel) {
  const int w = img.width, h = img.height;
  double mean = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) mean += img.pixel(x, y)[channel];
  }
  mean /= static_cast<double>(w) * h;
  // Row transforms, then column transforms (direct O(n^2) sums).
  std::vector<std::complex<double>> rows(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int k = 0; k < w; ++k) {
      std::complex<double> s = 0;
      for (int x = 0; x < w; ++x) {
        s += (img.pixel(x, y)[channel] - mean) * std::polar(1.0, -2.0 * std::numbers::pi * k * x / w);
      }
      rows[static_cast<std::size_t>(y) * w + k] = s;
    }
  }
  double total = 0, high = 0;
  for (int k = 0; k < w; ++k) {
    for (int l = 0; l < h; ++l) {
      std::complex<double> s = 0;
      for (int y = 0; y < h; ++y) {
        s += rows[static_cast<std::size_t>(y) * w + k] * std::polar(1.0, -2.0 * std::numbers::pi * l * y / h);
      }
      const double e = std::norm(s);
      const int fk = std::min(k, w - k), fl = std::min(l, h - l);
      total += e;
      if (fk > w / 4 || fl > h / 4) high += e;
    }
  }
  return total > 0 ? high / total : 0.0;
}

// Bounding box of the set entries of a row-major mask.
inline lpsynth::PixelRect mask_bbox(const std::vector<std::uint8_t>& mask, int width, int height) {
  int x0 = width, y0 = height, x1 = -1, y1 = -1;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (mask[static_cast<std::size_t>(y) * width + x]) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < 0) return {};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

inline double rect_iou(const lpsynth::PixelRect& a, const lpsynth::PixelRect& b) {
  const int x0 = std::max(a.x, b.x), y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.w, b.x + b.w), y1 = std::min(a.y + a.h, b.y + b.h);
  const double inter = (x1 > x0 && y1 > y0) ? double(x1 - x0) * (y1 - y0) : 0.0;
  const double uni = double(a.w) * a.h + double(b.w) * b.h - inter;
  return uni > 0 ? inter / uni : 0.0;
}

// Per-side frustum exit test in camera coordinates. A side is crossed when
// some corner lies strictly outside that side's bounding half-space; the
// planes pass through the optical centre and the image border.
struct SideFlags {
  bool left = false, right = false, top = false, bottom = false;
};
inline SideFlags frustum_exit(std::span<const lpsynth::Vec3> camera_points, double fx, double fy, double cx,
                              double cy, int width, int height) {
  SideFlags f;
  for (const auto& p : camera_points) {
    // u = fx*x/z + cx < 0  <=>  fx*x + cx*z < 0 for z > 0.
    if (fx * p.x() + cx * p.z() < 0) f.left = true;
    if (fx * p.x() + (cx - width) * p.z() > 0) f.right = true;
    if (fy * p.y() + cy * p.z() < 0) f.top = true;
    if (fy * p.y() + (cy - height) * p.z() > 0) f.bottom = true;
  }
  return f;
}

}  // namespace oracle
