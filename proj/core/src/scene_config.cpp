#include "lpsynth/scene_config.hpp"

#include "detail/text.hpp"
#include "lpsynth/camera.hpp"
#include "lpsynth/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>

namespace lpsynth {

using detail::format_double;
using detail::parse_double;

std::string_view to_string(LightKind k) {
  switch (k) {
    case LightKind::spot: return "spot";
    case LightKind::area: return "area";
    case LightKind::sun: return "sun";
  }
  return "sun";
}

LightKind parse_light_kind(std::string_view s) {
  if (s == "spot") return LightKind::spot;
  if (s == "area") return LightKind::area;
  if (s == "sun") return LightKind::sun;
  throw Error("unknown light kind '" + std::string(s) + "'");
}

void validate(const CameraPreset& c) {
  if (c.id.empty()) throw Error("camera preset without id");
  if (!(c.focal_length_mm > 0.0)) throw Error("camera '" + c.id + "': focal length must be > 0");
  if (!(c.sensor_size_mm.x() > 0.0 && c.sensor_size_mm.y() > 0.0)) {
    throw Error("camera '" + c.id + "': sensor size must be > 0");
  }
  if (!(c.f_number > 0.0)) throw Error("camera '" + c.id + "': f-number must be > 0");
  if (c.native_width <= 0 || c.native_height <= 0) {
    throw Error("camera '" + c.id + "': native resolution must be positive");
  }
}

void validate(const LightPreset& l) {
  if (l.id.empty()) throw Error("light preset without id");
  if (std::abs(l.direction.norm() - 1.0) > 1e-6) throw Error("light '" + l.id + "': direction not normalized");
  if (!(l.intensity >= 0.0)) throw Error("light '" + l.id + "': intensity must be >= 0");
  if (l.kind == LightKind::spot && !(l.beamwidth > 0.0 && l.beamwidth <= std::numbers::pi)) {
    throw Error("light '" + l.id + "': spot beamwidth must lie in (0, pi]");
  }
}

const CameraPreset& PresetBank::camera(std::string_view id) const {
  for (const auto& c : cameras) {
    if (c.id == id) return c;
  }
  throw Error("unknown camera preset '" + std::string(id) + "'");
}

const LightPreset& PresetBank::light(std::string_view id) const {
  for (const auto& l : lights) {
    if (l.id == id) return l;
  }
  throw Error("unknown light preset '" + std::string(id) + "'");
}

PresetBank default_preset_bank() {
  PresetBank bank;
  auto cam = [&](std::string id, Vec3 pos, Vec3 tilt, Vec2 sensor, double f, double n, int w, int h) {
    bank.cameras.push_back({std::move(id), pos, tilt, sensor, f, n, w, h});
  };
  cam("dashcam_lowcost", {0.0, 0.0, 0.0}, {0.02, 0.0, 0.0}, {5.6, 3.15}, 3.0, 2.0, 1920, 1080);
  cam("dashcam_mid", {0.1, 0.0, 0.0}, {0.03, 0.01, 0.0}, {5.76, 3.24}, 3.6, 1.8, 2560, 1440);
  cam("phone_budget", {-0.3, -0.5, 0.0}, {0.08, 0.05, 0.02}, {4.8, 2.7}, 3.5, 2.2, 1920, 1080);
  cam("phone_flagship", {0.4, -0.4, 0.0}, {0.05, -0.06, -0.01}, {7.0, 3.9375}, 4.4, 1.7, 3840, 2160);
  cam("security_cam", {0.0, -3.0, 0.0}, {0.25, 0.0, 0.0}, {5.12, 2.88}, 6.0, 1.6, 1920, 1080);
  cam("action_cam", {-0.2, -0.8, 0.0}, {0.06, 0.1, 0.03}, {6.17, 3.470625}, 2.9, 2.8, 2704, 1520);
  cam("fullframe_70mm", {0.0, -1.0, 0.0}, {0.04, 0.0, 0.0}, {36.0, 20.25}, 70.0, 4.0, 6000, 3375);

  auto light = [&](std::string id, LightKind kind, Vec3 pos, Vec3 dir, double intensity, double beam) {
    bank.lights.push_back({std::move(id), kind, pos, dir.normalized(), intensity, beam});
  };
  light("sun_noon", LightKind::sun, Vec3::Zero(), {0.1, 0.9, 0.4}, 0.9, 0.0);
  light("sun_low", LightKind::sun, Vec3::Zero(), {0.6, 0.3, 0.75}, 0.8, 0.0);
  light("sun_frontal", LightKind::sun, Vec3::Zero(), {0.0, 0.0, 1.0}, 0.85, 0.0);
  light("spot_street", LightKind::spot, {2.0, -5.0, 2.0}, {-2.0, 5.0, 8.0}, 90.0, 1.2);
  light("spot_headlight", LightKind::spot, {-1.0, 0.2, 0.0}, {0.05, -0.02, 1.0}, 60.0, 0.9);
  light("spot_dim_night", LightKind::spot, {3.0, -4.0, 0.0}, {-0.25, 0.35, 1.0}, 25.0, 1.0);
  light("area_softbox", LightKind::area, {0.0, -3.0, 1.0}, {0.0, 0.3, 1.0}, 80.0, 0.0);
  light("area_panel_left", LightKind::area, {-4.0, -2.0, 3.0}, {0.5, 0.2, 0.8}, 70.0, 0.0);
  return bank;
}

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <int N>
Eigen::Matrix<double, N, 1> json_vec(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != N) throw Error("expected array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = j.at(i).get<double>();
  return v;
}

}  // namespace

PresetBank load_preset_bank(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_text_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw Error("preset bank '" + path.string() + "': " + e.what());
  }
  PresetBank bank;
  try {
    for (const auto& c : j.at("cameras")) {
      CameraPreset p;
      p.id = c.at("id").get<std::string>();
      p.position = json_vec<3>(c.at("position"));
      p.tilt = json_vec<3>(c.at("tilt"));
      p.sensor_size_mm = json_vec<2>(c.at("sensor_size_mm"));
      p.focal_length_mm = c.at("focal_length_mm").get<double>();
      p.f_number = c.at("f_number").get<double>();
      p.native_width = c.at("native_resolution").at(0).get<int>();
      p.native_height = c.at("native_resolution").at(1).get<int>();
      validate(p);
      bank.cameras.push_back(std::move(p));
    }
    for (const auto& l : j.at("lights")) {
      LightPreset p;
      p.id = l.at("id").get<std::string>();
      p.kind = parse_light_kind(l.at("kind").get<std::string>());
      p.position = json_vec<3>(l.at("position"));
      p.direction = json_vec<3>(l.at("direction"));
      p.intensity = l.at("intensity").get<double>();
      p.beamwidth = l.value("beamwidth", 0.0);
      validate(p);
      bank.lights.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("preset bank '" + path.string() + "': " + e.what());
  }
  return bank;
}

void save_preset_bank(const std::filesystem::path& path, const PresetBank& bank) {
  nlohmann::json j;
  j["cameras"] = nlohmann::json::array();
  for (const auto& c : bank.cameras) {
    j["cameras"].push_back({{"id", c.id},
                            {"position", vec_json(c.position)},
                            {"tilt", vec_json(c.tilt)},
                            {"sensor_size_mm", vec_json(c.sensor_size_mm)},
                            {"focal_length_mm", c.focal_length_mm},
                            {"f_number", c.f_number},
                            {"native_resolution", {c.native_width, c.native_height}}});
  }
  j["lights"] = nlohmann::json::array();
  for (const auto& l : bank.lights) {
    j["lights"].push_back({{"id", l.id},
                           {"kind", std::string(to_string(l.kind))},
                           {"position", vec_json(l.position)},
                           {"direction", vec_json(l.direction)},
                           {"intensity", l.intensity},
                           {"beamwidth", l.beamwidth}});
  }
  detail::write_text_file_atomic(path.string(), j.dump(2) + "\n");
}

Vec3 TrajectorySpline::evaluate(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  const double s = 3.0 * t;
  const int seg = std::min(static_cast<int>(s), 2);
  const double u = s - seg;

  const Vec3& p1 = control[seg];
  const Vec3& p2 = control[seg + 1];
  const Vec3 p0 = seg == 0 ? Vec3(2.0 * control[0] - control[1]) : control[seg - 1];
  const Vec3 p3 = seg == 2 ? Vec3(2.0 * control[3] - control[2]) : control[seg + 2];

  // Cubic Hermite with Catmull-Rom tangents, written relative to p1 so a
  // constant control polygon evaluates to exactly that constant.
  const Vec3 m1 = 0.5 * (p2 - p0);
  const Vec3 m2 = 0.5 * (p3 - p1);
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h11 = u3 - u2;
  return p1 + h01 * (p2 - p1) + h10 * m1 + h11 * m2;
}

TrajectorySpline sample_trajectory(std::uint64_t seed, const CameraPreset& camera, ImageSize resolution,
                                   DepthRange depth, double curvature) {
  if (!(depth.min_m > 0.0) || !(depth.max_m >= depth.min_m)) {
    throw Error("trajectory depth range must be positive and nonempty");
  }
  const PinholeCamera cam(camera, resolution);
  SplitMix64 rng(seed);

  constexpr int kMaxAttempts = 64;
  auto draw_endpoint = [&]() -> Vec3 {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const Vec2 px(rng.uniform(0.0, resolution.width), rng.uniform(0.0, resolution.height));
      const double d = rng.uniform(depth.min_m, depth.max_m);
      const Vec3 p = cam.unproject(px, d);
      const auto proj = cam.project(p);
      if (proj && proj->pixel.x() >= 0.0 && proj->pixel.x() <= resolution.width &&
          proj->pixel.y() >= 0.0 && proj->pixel.y() <= resolution.height) {
        return p;
      }
    }
    throw Error("trajectory: no in-frustum endpoint after bounded retries");
  };

  TrajectorySpline spline;
  spline.control[0] = draw_endpoint();
  spline.control[3] = draw_endpoint();
  const Vec3 delta = spline.control[3] - spline.control[0];
  const double amplitude = curvature * delta.norm();
  for (int k = 1; k <= 2; ++k) {
    Vec3 jitter(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    spline.control[k] = spline.control[0] + (k / 3.0) * delta + amplitude * jitter;
  }
  return spline;
}

PlatePose evaluate_trajectory(const TrajectorySpline& spline, int frame_index, int scene_length) {
  if (scene_length < 1 || frame_index < 0 || frame_index >= scene_length) {
    throw Error("frame index " + std::to_string(frame_index) + " outside scene of length " +
                std::to_string(scene_length));
  }
  const double t = scene_length == 1 ? 0.0 : static_cast<double>(frame_index) / (scene_length - 1);
  return {spline.evaluate(t)};
}

bool SceneConfig::operator==(const SceneConfig& o) const {
  return sequence_id == o.sequence_id && master_seed == o.master_seed && plate == o.plate &&
         camera == o.camera && light == o.light && trajectory_seed == o.trajectory_seed &&
         resolution == o.resolution && scene_length == o.scene_length && depth.min_m == o.depth.min_m &&
         depth.max_m == o.depth.max_m && trajectory_curvature == o.trajectory_curvature;
}

SceneConfig generate_config(std::uint64_t master_seed, const PresetBank& bank, const ConfigOptions& options) {
  if (bank.cameras.empty() || bank.lights.empty()) {
    throw Error("generate_config: preset bank needs at least one camera and one light");
  }
  SceneConfig c;
  char id[32];
  std::snprintf(id, sizeof id, "seq_%016llx", static_cast<unsigned long long>(master_seed));
  c.sequence_id = id;
  c.master_seed = master_seed;

  SplitMix64 plate_rng(derive_seed(master_seed, kStreamPlate));
  c.plate = generate_plate(plate_rng);

  SplitMix64 preset_rng(derive_seed(master_seed, kStreamPresets));
  c.camera = bank.cameras[preset_rng.uniform_below(bank.cameras.size())];
  c.light = bank.lights[preset_rng.uniform_below(bank.lights.size())];

  c.trajectory_seed = derive_seed(master_seed, kStreamTrajectory);
  c.resolution = options.resolution;
  c.scene_length = options.scene_length;
  c.depth = options.depth;
  c.trajectory_curvature = options.trajectory_curvature;
  return c;
}

TrajectorySpline trajectory_of(const SceneConfig& config) {
  return sample_trajectory(config.trajectory_seed, config.camera, config.resolution, config.depth,
                           config.trajectory_curvature);
}

namespace {

std::string vec_text(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

template <int N>
Eigen::Matrix<double, N, 1> parse_vec(std::string_view text) {
  const auto parts = detail::split_ws(text);
  if (parts.size() != N) throw Error("expected " + std::to_string(N) + " numbers, got '" + std::string(text) + "'");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = parse_double(parts[i]);
  return v;
}

std::pair<int, int> parse_pair(std::string_view text) {
  const auto parts = detail::split_ws(text);
  if (parts.size() != 2) throw Error("expected two integers, got '" + std::string(text) + "'");
  return {detail::parse_int<int>(parts[0]), detail::parse_int<int>(parts[1])};
}

}  // namespace

std::string serialize_config(const SceneConfig& c) {
  std::string out;
  auto kv = [&](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  out += kConfigHeader;
  out += '\n';
  kv("sequence_id", c.sequence_id);
  kv("master_seed", std::to_string(c.master_seed));
  kv("plate.region", c.plate.region);
  kv("plate.middle", c.plate.middle);
  kv("plate.digits", c.plate.digits);
  kv("camera.id", c.camera.id);
  kv("camera.position", vec_text(c.camera.position));
  kv("camera.tilt", vec_text(c.camera.tilt));
  kv("camera.sensor_size_mm", vec_text(c.camera.sensor_size_mm));
  kv("camera.focal_length_mm", format_double(c.camera.focal_length_mm));
  kv("camera.f_number", format_double(c.camera.f_number));
  kv("camera.native_resolution", std::to_string(c.camera.native_width) + " " + std::to_string(c.camera.native_height));
  kv("light.id", c.light.id);
  kv("light.kind", std::string(to_string(c.light.kind)));
  kv("light.position", vec_text(c.light.position));
  kv("light.direction", vec_text(c.light.direction));
  kv("light.intensity", format_double(c.light.intensity));
  kv("light.beamwidth", format_double(c.light.beamwidth));
  kv("trajectory.seed", std::to_string(c.trajectory_seed));
  kv("trajectory.curvature", format_double(c.trajectory_curvature));
  kv("trajectory.depth_range", format_double(c.depth.min_m) + " " + format_double(c.depth.max_m));
  kv("resolution", std::to_string(c.resolution.width) + " " + std::to_string(c.resolution.height));
  kv("scene_length", std::to_string(c.scene_length));
  return out;
}

SceneConfig parse_config(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines[0]) != kConfigHeader) {
    throw Error("scene config: missing or unsupported header (expected '" + std::string(kConfigHeader) + "')");
  }
  std::map<std::string, std::string, std::less<>> kv;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = detail::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error("scene config line " + std::to_string(i + 1) + ": expected key = value");
    std::string key(detail::trim(line.substr(0, eq)));
    std::string value(detail::trim(line.substr(eq + 1)));
    if (!kv.emplace(key, std::move(value)).second) throw Error("scene config: duplicate key '" + key + "'");
  }
  auto take = [&](std::string_view key) -> std::string {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error("scene config: missing key '" + std::string(key) + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  SceneConfig c;
  c.sequence_id = take("sequence_id");
  c.master_seed = detail::parse_int<std::uint64_t>(take("master_seed"));
  c.plate = {take("plate.region"), take("plate.middle"), take("plate.digits")};
  c.camera.id = take("camera.id");
  c.camera.position = parse_vec<3>(take("camera.position"));
  c.camera.tilt = parse_vec<3>(take("camera.tilt"));
  c.camera.sensor_size_mm = parse_vec<2>(take("camera.sensor_size_mm"));
  c.camera.focal_length_mm = parse_double(take("camera.focal_length_mm"));
  c.camera.f_number = parse_double(take("camera.f_number"));
  std::tie(c.camera.native_width, c.camera.native_height) = parse_pair(take("camera.native_resolution"));
  c.light.id = take("light.id");
  c.light.kind = parse_light_kind(take("light.kind"));
  c.light.position = parse_vec<3>(take("light.position"));
  c.light.direction = parse_vec<3>(take("light.direction"));
  c.light.intensity = parse_double(take("light.intensity"));
  c.light.beamwidth = parse_double(take("light.beamwidth"));
  c.trajectory_seed = detail::parse_int<std::uint64_t>(take("trajectory.seed"));
  c.trajectory_curvature = parse_double(take("trajectory.curvature"));
  const Vec2 depth = parse_vec<2>(take("trajectory.depth_range"));
  c.depth = {depth.x(), depth.y()};
  std::tie(c.resolution.width, c.resolution.height) = parse_pair(take("resolution"));
  c.scene_length = detail::parse_int<int>(take("scene_length"));
  if (!kv.empty()) throw Error("scene config: unknown key '" + kv.begin()->first + "'");

  const auto verdict = validate_plate(c.plate);
  if (!verdict.valid) throw Error("scene config: invalid plate (" + std::string(to_string(verdict.violations.front())) + ")");
  validate(c.camera);
  validate(c.light);
  if (c.resolution.width <= 0 || c.resolution.height <= 0) throw Error("scene config: resolution must be positive");
  if (c.scene_length < 1) throw Error("scene config: scene_length must be >= 1");
  if (!(c.depth.min_m > 0.0) || !(c.depth.max_m >= c.depth.min_m)) throw Error("scene config: bad depth range");
  if (!(c.trajectory_curvature >= 0.0)) throw Error("scene config: curvature must be >= 0");
  return c;
}

SceneConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(detail::read_text_file(path.string()));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void save_config(const std::filesystem::path& path, const SceneConfig& config) {
  detail::write_text_file_atomic(path.string(), serialize_config(config));
}

}  // namespace lpsynth
