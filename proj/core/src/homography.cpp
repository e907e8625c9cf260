#include "lpsynth/homography.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

namespace lpsynth {

namespace {

// Similarity taking the points to centroid 0 and mean distance sqrt(2).
Mat3 normalizer(std::span<const Vec2> pts) {
  Vec2 c = Vec2::Zero();
  for (const Vec2& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean = 0.0;
  for (const Vec2& p : pts) mean += (p - c).norm();
  mean /= static_cast<double>(pts.size());
  const double s = mean > 0.0 ? std::sqrt(2.0) / mean : 1.0;
  Mat3 t;
  t << s, 0.0, -s * c.x(), 0.0, s, -s * c.y(), 0.0, 0.0, 1.0;
  return t;
}

Vec2 apply(const Mat3& t, const Vec2& p) { return {t(0, 0) * p.x() + t(0, 2), t(1, 1) * p.y() + t(1, 2)}; }

bool has_collinear_triple(std::span<const Vec2> pts) {
  constexpr double kTol = 1e-9;  // twice the triangle area, in normalized units
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec2 a = pts[j] - pts[i];
        const Vec2 b = pts[k] - pts[i];
        if (std::abs(a.x() * b.y() - a.y() * b.x()) <= kTol) return true;
      }
    }
  }
  return false;
}

}  // namespace

Homography Homography::inverse() const {
  Homography inv{h.inverse()};
  if (inv.h(2, 2) != 0.0) inv.h /= inv.h(2, 2);
  return inv;
}

std::optional<Homography> estimate_homography(std::span<const Vec2> src, std::span<const Vec2> dst) {
  const std::size_t n = src.size();
  if (n < 4 || dst.size() != n) return std::nullopt;

  const Mat3 ts = normalizer(src);
  const Mat3 td = normalizer(dst);
  std::vector<Vec2> ns(n), nd(n);
  for (std::size_t i = 0; i < n; ++i) {
    ns[i] = apply(ts, src[i]);
    nd[i] = apply(td, dst[i]);
  }
  if (has_collinear_triple(ns)) return std::nullopt;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * n), 9);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ns[i].x(), y = ns[i].y(), u = nd[i].x(), v = nd[i].y();
    const auto r = static_cast<Eigen::Index>(2 * i);
    a.row(r) << -x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u;
    a.row(r + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd v = svd.matrixV().col(8);
  Mat3 hn;
  hn << v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8);

  Homography out{td.inverse() * hn * ts};
  if (std::abs(out.h(2, 2)) > 1e-15 * out.h.norm()) {
    out.h /= out.h(2, 2);
  } else {
    out.h /= out.h.norm();
  }
  if (!out.h.allFinite() || !(std::abs(out.h.determinant()) > kMinHomographyDet)) return std::nullopt;
  return out;
}

Image rectify_region(const Image& src, const Homography& canvas_to_src, const PixelRect& region) {
  Image out(region.w, region.h, src.channels);
  const Mat3& h = canvas_to_src.h;
  double px[4];
  for (int y = 0; y < region.h; ++y) {
    const double cy = region.y + y + 0.5;
    for (int x = 0; x < region.w; ++x) {
      const double cx = region.x + x + 0.5;
      const double w = h(2, 0) * cx + h(2, 1) * cy + h(2, 2);
      if (!(w > 0.0)) continue;
      const double sx = (h(0, 0) * cx + h(0, 1) * cy + h(0, 2)) / w;
      const double sy = (h(1, 0) * cx + h(1, 1) * cy + h(1, 2)) / w;
      if (!(sx >= 0.0 && sx < src.width && sy >= 0.0 && sy < src.height)) continue;
      sample_bilinear(src, sx, sy, px);
      std::uint8_t* o = out.pixel(x, y);
      for (int c = 0; c < src.channels; ++c) o[c] = static_cast<std::uint8_t>(std::lround(px[c]));
    }
  }
  return out;
}

Image rectify(const Image& src, const Homography& canvas_to_src, ImageSize out_size) {
  return rectify_region(src, canvas_to_src, {0, 0, out_size.width, out_size.height});
}

Image warp(const Image& src, const Homography& src_to_out, ImageSize out_size) {
  return rectify(src, src_to_out.inverse(), out_size);
}

}  // namespace lpsynth
