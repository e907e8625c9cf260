#include "lpsynth/camera.hpp"
#include "lpsynth/renderer.hpp"

#include <gtest/gtest.h>

using namespace lpsynth;

namespace {

CameraPreset tilted() {
  CameraPreset c;
  c.id = "test";
  c.position = {0.3, -0.4, 0.1};
  c.tilt = {0.07, -0.05, 0.02};
  c.sensor_size_mm = {6.4, 3.6};
  c.focal_length_mm = 6.0;
  return c;
}

}  // namespace

TEST(Camera, OpticalAxisHitsPrincipalPoint) {
  const CameraPreset c = tilted();
  const PinholeCamera cam(c, {1280, 720});
  const Vec3 on_axis = c.position + cam.rotation() * Vec3(0, 0, 8.0);
  const auto p = cam.project(on_axis);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->pixel.x(), 640.0, 1e-9);
  EXPECT_NEAR(p->pixel.y(), 360.0, 1e-9);
  EXPECT_NEAR(p->depth, 8.0, 1e-12);
}

TEST(Camera, DoublingFocalLengthDoublesOffset) {
  CameraPreset c = tilted();
  const ImageSize size{1280, 720};
  const PinholeCamera cam(c, size);
  const Vec3 pt = c.position + cam.rotation() * Vec3(0.4, -0.2, 6.0);
  const Vec2 off1 = project_point(c, size, pt)->pixel - Vec2(640, 360);
  c.focal_length_mm *= 2.0;
  const Vec2 off2 = project_point(c, size, pt)->pixel - Vec2(640, 360);
  EXPECT_NEAR(off2.x(), 2.0 * off1.x(), 1e-9);
  EXPECT_NEAR(off2.y(), 2.0 * off1.y(), 1e-9);
}

TEST(Camera, BehindCameraHasNoProjection) {
  const CameraPreset c = tilted();
  const PinholeCamera cam(c, {640, 360});
  EXPECT_FALSE(cam.project(c.position + cam.rotation() * Vec3(0, 0, -1.0)));
  EXPECT_FALSE(cam.project(c.position));
}

TEST(Camera, UnprojectInvertsProject) {
  const CameraPreset c = tilted();
  const PinholeCamera cam(c, {640, 360});
  const Vec3 w = cam.unproject({100.25, 300.5}, 7.5);
  const auto p = cam.project(w);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->pixel.x(), 100.25, 1e-9);
  EXPECT_NEAR(p->pixel.y(), 300.5, 1e-9);
  EXPECT_NEAR(p->depth, 7.5, 1e-9);
}

TEST(Camera, PlateWidthClosedForm) {
  // Frontal plate at depth d spans f * 0.52 m / d on the sensor.
  CameraPreset c;
  c.id = "frontal";
  c.sensor_size_mm = {36.0, 24.0};
  c.focal_length_mm = 50.0;
  const ImageSize size{1920, 1080};
  const PinholeCamera cam(c, size);
  const double pitch_mm = 36.0 / 1920.0;
  double last = 1e300;
  for (double d : {3.0, 4.5, 7.0, 10.0, 15.0}) {
    const auto corners = plate_corners({0.2, -0.1, d});
    const double px = cam.project(corners[1])->pixel.x() - cam.project(corners[0])->pixel.x();
    const double expect = 50.0 * 520.0 / (d * 1000.0) / pitch_mm;
    EXPECT_NEAR(px, expect, 0.5) << d;
    EXPECT_LT(px, last);
    last = px;
  }
}
