#include "lpsynth/camera.hpp"
#include "lpsynth/scene_config.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace lpsynth;

TEST(SceneConfig, DeterministicSerialization) {
  const PresetBank bank = default_preset_bank();
  EXPECT_EQ(serialize_config(generate_config(17, bank)), serialize_config(generate_config(17, bank)));
  EXPECT_NE(serialize_config(generate_config(17, bank)), serialize_config(generate_config(18, bank)));
}

TEST(SceneConfig, ForcedPresetChoice) {
  const PresetBank full = default_preset_bank();
  PresetBank one;
  one.cameras = {full.cameras[2]};
  one.lights = {full.lights[3]};
  for (std::uint64_t s = 0; s < 50; ++s) {
    const SceneConfig c = generate_config(s, one);
    EXPECT_EQ(c.camera.id, full.cameras[2].id);
    EXPECT_EQ(c.light.id, full.lights[3].id);
  }
}

TEST(SceneConfig, EmptyBankIsAnError) {
  PresetBank bank = default_preset_bank();
  bank.lights.clear();
  EXPECT_THROW(generate_config(1, bank), Error);
}

TEST(SceneConfig, BankSize) {
  const PresetBank bank = default_preset_bank();
  EXPECT_GE(bank.cameras.size(), 6u);
  EXPECT_GE(bank.lights.size(), 6u);
  for (const auto& c : bank.cameras) EXPECT_NO_THROW(validate(c));
  for (const auto& l : bank.lights) EXPECT_NO_THROW(validate(l));
}

TEST(SceneConfig, SweepValidAndResolvable) {
  const PresetBank bank = default_preset_bank();
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const SceneConfig c = generate_config(s, bank);
    ASSERT_TRUE(validate_plate(c.plate).valid);
    ASSERT_EQ(bank.camera(c.camera.id), c.camera);
    ASSERT_EQ(bank.light(c.light.id), c.light);
  }
}

TEST(SceneConfig, RoundTrip) {
  const PresetBank bank = default_preset_bank();
  for (std::uint64_t s = 0; s < 200; ++s) {
    const SceneConfig c = generate_config(s * 7919, bank);
    const std::string text = serialize_config(c);
    EXPECT_EQ(parse_config(text), c);
    EXPECT_EQ(serialize_config(parse_config(text)), text);
  }
}

TEST(SceneConfig, RejectsBadHeader) {
  std::string text = serialize_config(generate_config(1, default_preset_bank()));
  text.replace(0, kConfigHeader.size(), "not-a-config 1");
  EXPECT_THROW(parse_config(text), Error);
}

TEST(SceneConfig, PresetBankFileRoundTrip) {
  const auto dir = std::filesystem::path(LPSYNTH_TEST_DIR);
  std::filesystem::create_directories(dir);
  const PresetBank bank = default_preset_bank();
  save_preset_bank(dir / "bank.json", bank);
  const PresetBank back = load_preset_bank(dir / "bank.json");
  EXPECT_EQ(back.cameras, bank.cameras);
  EXPECT_EQ(back.lights, bank.lights);
}

TEST(Trajectory, ConstantWhenEndpointsEqual) {
  TrajectorySpline s;
  s.control.fill(Vec3(0.1, -0.2, 7.0));
  for (double t = 0; t <= 1.0; t += 0.05) EXPECT_EQ(s.evaluate(t), s.control[0]);
}

TEST(Trajectory, StraightLineMidpoint) {
  TrajectorySpline s;
  const Vec3 a(-1, 0.5, 4), b(2, -0.5, 10);
  for (int k = 0; k < 4; ++k) s.control[k] = a + (k / 3.0) * (b - a);
  EXPECT_LT((s.evaluate(0.5) - 0.5 * (a + b)).norm(), 1e-12);
}

TEST(Trajectory, EndpointsInFrustumAndExact) {
  const PresetBank bank = default_preset_bank();
  const ImageSize size{640, 360};
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const CameraPreset& cam = bank.cameras[seed % bank.cameras.size()];
    const TrajectorySpline s = sample_trajectory(seed, cam, size, {3.0, 15.0});
    EXPECT_LT((s.evaluate(0.0) - s.start()).norm(), 1e-9);
    EXPECT_LT((s.evaluate(1.0) - s.end()).norm(), 1e-9);
    for (const Vec3& p : {s.start(), s.end()}) {
      const auto proj = project_point(cam, size, p);
      ASSERT_TRUE(proj);
      EXPECT_GE(proj->pixel.x(), 0.0);
      EXPECT_LE(proj->pixel.x(), size.width);
      EXPECT_GE(proj->pixel.y(), 0.0);
      EXPECT_LE(proj->pixel.y(), size.height);
    }
  }
}

TEST(Trajectory, FramesFollowSplineOrder) {
  const SceneConfig c = generate_config(3, default_preset_bank());
  const TrajectorySpline s = trajectory_of(c);
  EXPECT_EQ(evaluate_trajectory(s, 0, c.scene_length).position, s.evaluate(0.0));
  EXPECT_LT((evaluate_trajectory(s, c.scene_length - 1, c.scene_length).position - s.end()).norm(), 1e-9);
  // Dense oracle: each frame's position is nearest to the dense sample at
  // its own parameter, so frames visit the curve in order.
  constexpr int kDense = 4000;
  double last = -1.0;
  for (int f = 0; f < c.scene_length; ++f) {
    const Vec3 p = evaluate_trajectory(s, f, c.scene_length).position;
    int best = 0;
    double best_d = 1e300;
    for (int i = 0; i <= kDense; ++i) {
      const double d = (s.evaluate(double(i) / kDense) - p).norm();
      if (d < best_d) best_d = d, best = i;
    }
    const double t = double(best) / kDense;
    EXPECT_NEAR(t, double(f) / (c.scene_length - 1), 1.0 / kDense + 1e-12);
    EXPECT_GT(t, last);
    last = t;
  }
  EXPECT_EQ(evaluate_trajectory(s, 0, 1).position, s.start());
  EXPECT_THROW(evaluate_trajectory(s, c.scene_length, c.scene_length), Error);
  EXPECT_THROW(evaluate_trajectory(s, -1, c.scene_length), Error);
}
