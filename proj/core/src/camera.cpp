#include "lpsynth/camera.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace lpsynth {

Mat3 camera_rotation(const Vec3& tilt) {
  const double pitch = tilt.x();
  const double yaw = tilt.y();
  const double roll = tilt.z();
  // Y points down, so a downward pitch is a negative rotation about X.
  const Eigen::AngleAxisd rx(-pitch, Vec3::UnitX());
  const Eigen::AngleAxisd ry(yaw, Vec3::UnitY());
  const Eigen::AngleAxisd rz(roll, Vec3::UnitZ());
  return (ry * rx * rz).toRotationMatrix();
}

PinholeCamera::PinholeCamera(const CameraPreset& preset, ImageSize resolution)
    : rotation_(camera_rotation(preset.tilt)),
      center_(preset.position),
      fx_(preset.focal_length_mm / preset.sensor_size_mm.x() * resolution.width),
      fy_(preset.focal_length_mm / preset.sensor_size_mm.y() * resolution.height),
      cx_(0.5 * resolution.width),
      cy_(0.5 * resolution.height),
      pitch_mm_(preset.sensor_size_mm.x() / resolution.width),
      size_(resolution) {
  if (resolution.width <= 0 || resolution.height <= 0) throw Error("camera: resolution must be positive");
}

Vec3 PinholeCamera::to_camera(const Vec3& world) const {
  return rotation_.transpose() * (world - center_);
}

std::optional<Projection> PinholeCamera::project(const Vec3& world) const {
  const Vec3 c = to_camera(world);
  if (!(c.z() > 0.0)) return std::nullopt;
  return Projection{{fx_ * c.x() / c.z() + cx_, fy_ * c.y() / c.z() + cy_}, c.z()};
}

Vec3 PinholeCamera::ray(const Vec2& pixel) const {
  return rotation_ * Vec3((pixel.x() - cx_) / fx_, (pixel.y() - cy_) / fy_, 1.0);
}

Vec3 PinholeCamera::unproject(const Vec2& pixel, double depth) const {
  return center_ + depth * ray(pixel);
}

std::optional<Projection> project_point(const CameraPreset& camera, ImageSize resolution,
                                        const Vec3& world) {
  return PinholeCamera(camera, resolution).project(world);
}

}  // namespace lpsynth
