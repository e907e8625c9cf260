#include "lpsynth/ocr_prep.hpp"

#include "detail/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace lpsynth {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

Quad RotatedRect::corners() const {
  const Vec2 u(std::cos(angle), std::sin(angle));
  const Vec2 v(-u.y(), u.x());
  const Vec2 hu = 0.5 * size.x() * u, hv = 0.5 * size.y() * v;
  return {center - hu - hv, center + hu - hv, center + hu + hv, center - hu + hv};
}

std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> p(points.begin(), points.end());
  std::sort(p.begin(), p.end(), [](const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  std::vector<Vec2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0.0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0.0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

RotatedRect min_area_rect(std::span<const Vec2> points) {
  const auto hull = convex_hull(points);
  double extent = 0.0;
  for (const Vec2& p : hull) extent = std::max(extent, (p - hull.front()).norm());
  double twice_area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) twice_area += cross(Vec2::Zero(), hull[i], hull[(i + 1) % hull.size()]);
  if (hull.size() < 3 || !(std::abs(twice_area) > 1e-12 * extent * extent)) {
    throw Error("min_area_rect: points are collinear");
  }

  // The optimal rectangle has a side collinear with a hull edge.
  RotatedRect best;
  double best_area = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 e = hull[(i + 1) % hull.size()] - hull[i];
    const Vec2 u = e / e.norm();
    const Vec2 v(-u.y(), u.x());
    double umin = std::numeric_limits<double>::infinity(), umax = -umin, vmin = umin, vmax = -umin;
    for (const Vec2& p : hull) {
      const double a = p.dot(u), b = p.dot(v);
      umin = std::min(umin, a);
      umax = std::max(umax, a);
      vmin = std::min(vmin, b);
      vmax = std::max(vmax, b);
    }
    const double area = (umax - umin) * (vmax - vmin);
    if (area < best_area) {
      best_area = area;
      best.center = 0.5 * (umin + umax) * u + 0.5 * (vmin + vmax) * v;
      best.size = {umax - umin, vmax - vmin};
      best.angle = std::atan2(u.y(), u.x());
    }
  }
  // Quarter turns swap the sides; bring the angle into [-pi/4, pi/4).
  constexpr double kQuarter = 0.5 * std::numbers::pi;
  const double turns = std::floor((best.angle + 0.5 * kQuarter) / kQuarter);
  best.angle -= turns * kQuarter;
  if (best.angle >= 0.5 * kQuarter) best.angle -= kQuarter, best.size = {best.size.y(), best.size.x()};
  if (static_cast<long long>(turns) % 2 != 0) best.size = {best.size.y(), best.size.x()};
  return best;
}

Image deskew_crop(const Image& image, const Quad& corners, int out_height) {
  if (out_height <= 0) throw Error("deskew: output height must be positive");
  if (image.empty()) throw Error("deskew: empty image");
  Quad q = corners;
  for (Vec2& p : q) p = {std::clamp(p.x(), 0.0, double(image.width)), std::clamp(p.y(), 0.0, double(image.height))};
  const RotatedRect r = min_area_rect(q);
  if (!(r.size.x() > 0.0 && r.size.y() > 0.0)) throw Error("deskew: degenerate rectangle");

  const int out_w = std::max(1, static_cast<int>(std::lround(out_height * r.size.x() / r.size.y())));
  Image out(out_w, out_height, image.channels);
  const Vec2 u(std::cos(r.angle), std::sin(r.angle));
  const Vec2 v(-u.y(), u.x());
  const double sx = r.size.x() / out_w, sy = r.size.y() / out_height;
  const Vec2 origin = r.center - 0.5 * r.size.x() * u - 0.5 * r.size.y() * v;
  double px[4];
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const Vec2 s = origin + (x + 0.5) * sx * u + (y + 0.5) * sy * v;
      sample_bilinear(image, s.x(), s.y(), px);
      std::uint8_t* o = out.pixel(x, y);
      for (int c = 0; c < image.channels; ++c) o[c] = static_cast<std::uint8_t>(std::lround(px[c]));
    }
  }
  return out;
}

std::string sample_id(const std::string& sequence_id, int frame_index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_f%06d", frame_index);
  return sequence_id + buf;
}

Quad deskew_corners(const FrameAnnotation& f) {
  if (f.corners) return *f.corners;
  const PixelRect& b = f.bbox;
  return {Vec2(b.x, b.y), Vec2(b.x + b.w, b.y), Vec2(b.x + b.w, b.y + b.h), Vec2(b.x, b.y + b.h)};
}

std::optional<PreppedSample> prep_frame(const Image& img, const FrameAnnotation& f, const SequenceAnnotation& seq,
                                        const PrepOptions& options) {
  if (f.bbox.empty() || (f.occluded && !options.keep_occluded)) return std::nullopt;
  if (f.label.empty()) throw Error("prep: frame " + std::to_string(f.frame_index) + " has no label");
  PreppedSample s;
  s.sample_id = sample_id(seq.sequence_id, f.frame_index);
  s.image = deskew_crop(img, deskew_corners(f), options.out_height);
  s.label = f.label;
  s.provenance = seq.data_type;
  s.sequence_id = seq.sequence_id;
  s.frame_index = f.frame_index;
  return s;
}

std::string format_manifest(std::span<const ManifestEntry> entries) {
  std::string out = "#sample_id\timage\tlabel\tprovenance\tsequence\tframe\n";
  for (const auto& e : entries) {
    for (const std::string* field : {&e.sample_id, &e.image_path, &e.label, &e.sequence_id}) {
      if (field->find_first_of("\t\n") != std::string::npos) throw Error("manifest field contains a tab or newline");
    }
    out += e.sample_id + '\t' + e.image_path + '\t' + e.label + '\t' + std::string(to_string(e.provenance)) + '\t' +
           e.sequence_id + '\t' + std::to_string(e.frame_index) + '\n';
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> out;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> f;
    std::size_t b = 0;
    for (std::size_t e; (e = line.find('\t', b)) != std::string_view::npos; b = e + 1) f.push_back(line.substr(b, e - b));
    f.push_back(line.substr(b));
    if (f.size() != 6) throw Error("manifest line " + std::to_string(i + 1) + ": expected 6 fields");
    out.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2]), parse_data_type(f[3]), std::string(f[4]),
                   detail::parse_int<int>(f[5])});
  }
  return out;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_text_file(path.string()));
}

}  // namespace lpsynth
