#pragma once

#include "lpsynth/scene_config.hpp"

#include <optional>

namespace lpsynth {

struct Projection {
  Vec2 pixel;    // continuous image coordinates
  double depth;  // distance along the optical axis, metres
};

/// Pinhole model of a CameraPreset rendered at a given output resolution.
/// The sensor maps onto the full output image, so the pixel pitch is
/// sensor_size / resolution; the principal point is the image centre.
class PinholeCamera {
 public:
  PinholeCamera(const CameraPreset& preset, ImageSize resolution);

  std::optional<Projection> project(const Vec3& world) const;
  /// World-space point at `depth` along the optical axis behind `pixel`.
  Vec3 unproject(const Vec2& pixel, double depth) const;
  /// Unnormalised world-space ray direction through `pixel` (camera z = 1).
  Vec3 ray(const Vec2& pixel) const;
  /// Camera-space coordinates of a world point.
  Vec3 to_camera(const Vec3& world) const;

  const Vec3& center() const { return center_; }
  const Mat3& rotation() const { return rotation_; }  // camera -> world
  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  ImageSize resolution() const { return size_; }
  /// Sensor pixel pitch in millimetres along x.
  double pixel_pitch_mm() const { return pitch_mm_; }

 private:
  Mat3 rotation_;
  Vec3 center_;
  double fx_, fy_, cx_, cy_;
  double pitch_mm_;
  ImageSize size_;
};

/// Camera-to-world rotation for (pitch, yaw, roll).
Mat3 camera_rotation(const Vec3& tilt);

std::optional<Projection> project_point(const CameraPreset& camera, ImageSize resolution, const Vec3& world);

}  // namespace lpsynth
