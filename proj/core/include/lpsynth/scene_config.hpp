#pragma once

#include "lpsynth/plate_grammar.hpp"
#include "lpsynth/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lpsynth {

// World frame: X right, Y down, Z forward (away from the default camera).
// Lengths in metres unless a field name says otherwise.

struct CameraPreset {
  std::string id;
  Vec3 position = Vec3::Zero();
  /// (pitch, yaw, roll) in radians. Positive pitch tilts the optical axis
  /// down, positive yaw turns it to the right.
  Vec3 tilt = Vec3::Zero();
  Vec2 sensor_size_mm{36.0, 24.0};
  double focal_length_mm = 50.0;
  double f_number = 4.0;
  int native_width = 1920;
  int native_height = 1080;

  bool operator==(const CameraPreset&) const = default;
};

enum class LightKind { spot, area, sun };

std::string_view to_string(LightKind k);
LightKind parse_light_kind(std::string_view s);

struct LightPreset {
  std::string id;
  LightKind kind = LightKind::sun;
  Vec3 position = Vec3::Zero();  // unused for sun
  Vec3 direction{0.0, 0.0, 1.0};  // direction the light travels
  double intensity = 1.0;
  double beamwidth = 0.0;  // full cone angle, spot only

  bool operator==(const LightPreset&) const = default;
};

/// Throws Error when a preset breaks its invariants.
void validate(const CameraPreset& c);
void validate(const LightPreset& l);

struct PresetBank {
  std::vector<CameraPreset> cameras;
  std::vector<LightPreset> lights;

  const CameraPreset& camera(std::string_view id) const;
  const LightPreset& light(std::string_view id) const;
};

/// Built-in bank: dash cams, phones, security cameras and full-frame bodies;
/// spot, area and sun lights.
PresetBank default_preset_bank();

PresetBank load_preset_bank(const std::filesystem::path& path);
void save_preset_bank(const std::filesystem::path& path, const PresetBank& bank);

struct DepthRange {
  double min_m = 3.0;
  double max_m = 15.0;
};

/// Catmull-Rom curve through four control points (start, two interior
/// auxiliaries, end), parameterised on t in [0, 1] with a third of the range
/// per segment. The outer tangents reflect the neighbouring control point.
struct TrajectorySpline {
  std::array<Vec3, 4> control;

  const Vec3& start() const { return control[0]; }
  const Vec3& end() const { return control[3]; }
  Vec3 evaluate(double t) const;
};

/// Resolution and projection data the trajectory sampler needs.
struct ImageSize {
  int width = 0;
  int height = 0;
  bool operator==(const ImageSize&) const = default;
};

/// Draws both endpoints uniformly over the image at a uniform depth, so they
/// project inside the image for `camera`. `curvature` scales the random
/// offset of the two auxiliary points relative to the endpoint distance;
/// zero gives a straight line.
TrajectorySpline sample_trajectory(std::uint64_t seed, const CameraPreset& camera, ImageSize resolution,
                                   DepthRange depth, double curvature = 0.1);

struct PlatePose {
  Vec3 position = Vec3::Zero();
  // Orientation is fixed: plate normal (0, 0, -1), plate x along world X.
};

/// t = frame_index / (scene_length - 1), or 0 for single-frame scenes.
PlatePose evaluate_trajectory(const TrajectorySpline& spline, int frame_index, int scene_length);

struct SceneConfig {
  std::string sequence_id;
  std::uint64_t master_seed = 0;
  PlateString plate;
  CameraPreset camera;  // snapshot of the bank entry
  LightPreset light;    // snapshot of the bank entry
  std::uint64_t trajectory_seed = 0;
  ImageSize resolution{640, 360};
  int scene_length = 50;
  DepthRange depth;
  double trajectory_curvature = 0.1;

  bool operator==(const SceneConfig& o) const;
};

struct ConfigOptions {
  ImageSize resolution{640, 360};
  int scene_length = 50;
  DepthRange depth;
  double trajectory_curvature = 0.1;
};

SceneConfig generate_config(std::uint64_t master_seed, const PresetBank& bank,
                            const ConfigOptions& options = {});

TrajectorySpline trajectory_of(const SceneConfig& config);

inline constexpr std::string_view kConfigHeader = "lpsynth-scene-config 1";

std::string serialize_config(const SceneConfig& config);
/// Throws Error on malformed text, an unknown version or invalid values.
SceneConfig parse_config(std::string_view text);

SceneConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const SceneConfig& config);

}  // namespace lpsynth
