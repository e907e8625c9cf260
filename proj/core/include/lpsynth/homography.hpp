#pragma once

#include "lpsynth/image.hpp"
#include "lpsynth/scene_config.hpp"
#include "lpsynth/types.hpp"

#include <optional>
#include <span>

namespace lpsynth {

/// Planar projective map, scaled so h(2,2) = 1 whenever that entry is nonzero.
struct Homography {
  Mat3 h = Mat3::Identity();

  Vec2 apply(const Vec2& p) const {
    const Eigen::Vector3d q = h * Eigen::Vector3d(p.x(), p.y(), 1.0);
    return {q.x() / q.z(), q.y() / q.z()};
  }
  Homography inverse() const;
};

inline constexpr double kMinHomographyDet = 1e-12;

/// Normalized DLT over n >= 4 correspondences. Returns nullopt when fewer than
/// four points are given, any three source points are collinear, or the
/// result is singular.
std::optional<Homography> estimate_homography(std::span<const Vec2> src, std::span<const Vec2> dst);

/// Inverse warp: output pixel (x, y) samples `src` at canvas_to_src(x+0.5, y+0.5)
/// bilinearly. Samples landing outside `src` are black.
Image rectify(const Image& src, const Homography& canvas_to_src, ImageSize out_size);

/// Same as rectify() restricted to `region` of the output frame; the result
/// is region.w x region.h with pixel (0, 0) at output (region.x, region.y).
Image rectify_region(const Image& src, const Homography& canvas_to_src, const PixelRect& region);

/// Forward warp by `src_to_out`, i.e. rectify() with the inverse map.
Image warp(const Image& src, const Homography& src_to_out, ImageSize out_size);

}  // namespace lpsynth
