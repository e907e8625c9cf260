#include "lpsynth/rectifier.hpp"

#include "lpsynth/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace lpsynth {

namespace {

constexpr int kMinContrast = 40;

struct Blob {
  long long area = 0;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive bounds
  double sx = 0.0, sy = 0.0;

  double cx() const { return sx / static_cast<double>(area) + 0.5; }
  double cy() const { return sy / static_cast<double>(area) + 0.5; }
  int w() const { return x1 - x0 + 1; }
  int h() const { return y1 - y0 + 1; }
  bool squarish() const { return w() <= 2 * h() && h() <= 2 * w(); }
  bool encloses(const Blob& o) const { return x0 < o.x0 && y0 < o.y0 && x1 > o.x1 && y1 > o.y1; }
};

// 4-connected components of mask, with their pixel lists when `pixels` is set.
std::vector<Blob> label_blobs(const std::vector<std::uint8_t>& mask, int w, int h,
                              std::vector<std::vector<int>>* pixels = nullptr) {
  std::vector<int> label(mask.size(), -1);
  std::vector<Blob> blobs;
  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (!mask[static_cast<std::size_t>(start)] || label[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(blobs.size());
    Blob b;
    b.x0 = b.x1 = start % w;
    b.y0 = b.y1 = start / w;
    if (pixels) pixels->emplace_back();
    stack.assign(1, start);
    label[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int x = p % w, y = p / w;
      ++b.area;
      b.sx += x;
      b.sy += y;
      b.x0 = std::min(b.x0, x);
      b.x1 = std::max(b.x1, x);
      b.y0 = std::min(b.y0, y);
      b.y1 = std::max(b.y1, y);
      if (pixels) pixels->back().push_back(p);
      auto visit = [&](int q) {
        if (mask[static_cast<std::size_t>(q)] && label[static_cast<std::size_t>(q)] < 0) {
          label[static_cast<std::size_t>(q)] = id;
          stack.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    blobs.push_back(b);
  }
  return blobs;
}

std::pair<int, int> percentiles(const Image& gray) {
  std::array<std::size_t, 256> hist{};
  for (std::uint8_t v : gray.data) ++hist[v];
  const std::size_t n = gray.data.size();
  auto at = [&](double q) {
    const auto target = static_cast<std::size_t>(q * static_cast<double>(n));
    std::size_t acc = 0;
    for (int v = 0; v < 256; ++v) {
      acc += hist[static_cast<std::size_t>(v)];
      if (acc > target) return v;
    }
    return 255;
  };
  return {at(0.01), at(0.99)};
}

bool convex(const Quad& q) {
  double sign = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec2 a = q[(i + 1) % 4] - q[i];
    const Vec2 b = q[(i + 2) % 4] - q[(i + 1) % 4];
    const double cross = a.x() * b.y() - a.y() * b.x();
    if (cross == 0.0 || (sign != 0.0 && (cross > 0.0) != (sign > 0.0))) return false;
    sign = cross;
  }
  return true;
}

// TL = min(x+y), TR = max(x-y), BR = max(x+y), BL = max(y-x).
std::optional<Quad> order_corners(const std::vector<Vec2>& pts) {
  Quad q;
  auto pick = [&](auto score) {
    return *std::max_element(pts.begin(), pts.end(), [&](const Vec2& a, const Vec2& b) { return score(a) < score(b); });
  };
  q[0] = pick([](const Vec2& p) { return -(p.x() + p.y()); });
  q[1] = pick([](const Vec2& p) { return p.x() - p.y(); });
  q[2] = pick([](const Vec2& p) { return p.x() + p.y(); });
  q[3] = pick([](const Vec2& p) { return p.y() - p.x(); });
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (q[i] == q[j]) return std::nullopt;
    }
  }
  if (!convex(q)) return std::nullopt;
  return q;
}

Vec2 weighted_centroid(const Image& gray, const Blob& inner, double level) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (int y = std::max(0, inner.y0 - 2); y <= std::min(gray.height - 1, inner.y1 + 2); ++y) {
    for (int x = std::max(0, inner.x0 - 2); x <= std::min(gray.width - 1, inner.x1 + 2); ++x) {
      const double wgt = std::max(0.0, level - gray.data[static_cast<std::size_t>(y) * gray.width + x]);
      sw += wgt;
      sx += wgt * (x + 0.5);
      sy += wgt * (y + 0.5);
    }
  }
  return sw > 0.0 ? Vec2(sx / sw, sy / sw) : Vec2(inner.cx(), inner.cy());
}

std::optional<Quad> find_fiducials(const Image& gray, int lo, int hi) {
  const int w = gray.width, h = gray.height;
  const double dark_t = lo + (hi - lo) / 3.0;
  const double bright_t = lo + 2.0 * (hi - lo) / 3.0;
  std::vector<std::uint8_t> dark(gray.data.size()), bright(gray.data.size());
  for (std::size_t i = 0; i < gray.data.size(); ++i) {
    dark[i] = gray.data[i] < dark_t;
    bright[i] = gray.data[i] > bright_t;
  }
  const auto dark_blobs = label_blobs(dark, w, h);
  const auto bright_blobs = label_blobs(bright, w, h);

  struct Candidate {
    double score;
    Vec2 center;
  };
  std::vector<Candidate> found;
  for (const Blob& in : dark_blobs) {
    if (in.area < 9 || !in.squarish()) continue;
    for (const Blob& ring : bright_blobs) {
      if (!ring.encloses(in) || !ring.squarish()) continue;
      const double r1 = static_cast<double>(ring.area) / static_cast<double>(in.area);
      if (r1 < 1.5 || r1 > 6.0) continue;
      for (const Blob& out : dark_blobs) {
        if (!out.encloses(ring)) continue;
        const double r2 = static_cast<double>(out.area) / static_cast<double>(in.area);
        if (r2 < 2.5 || r2 > 10.0) continue;
        const double tol = 0.1 * std::sqrt(static_cast<double>(out.area + ring.area + in.area));
        if ((Vec2(out.cx(), out.cy()) - Vec2(in.cx(), in.cy())).norm() > tol) continue;
        if ((Vec2(ring.cx(), ring.cy()) - Vec2(in.cx(), in.cy())).norm() > tol) continue;
        const double score = std::abs(std::log(r1 / 3.0)) + std::abs(std::log(r2 / 5.0));
        found.push_back({score, weighted_centroid(gray, in, 0.5 * (lo + hi))});
      }
    }
  }
  if (found.size() < 4) return std::nullopt;
  std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < 4; ++i) pts.push_back(found[i].center);
  return order_corners(pts);
}

std::optional<Quad> find_outline(const Image& gray, int lo, int hi) {
  const int w = gray.width, h = gray.height;
  const double t = lo + (hi - lo) / 4.0;
  std::vector<std::uint8_t> mask(gray.data.size());
  for (std::size_t i = 0; i < gray.data.size(); ++i) mask[i] = gray.data[i] > t;
  std::vector<std::vector<int>> pixels;
  const auto blobs = label_blobs(mask, w, h, &pixels);
  if (blobs.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < blobs.size(); ++i) {
    if (blobs[i].area > blobs[best].area) best = i;
  }
  if (blobs[best].area * 20 < static_cast<long long>(w) * h) return std::nullopt;
  // Extreme pixels along the diagonals, pushed out to their outer pixel corner.
  Quad q;
  double s[4] = {1e300, -1e300, -1e300, -1e300};
  for (int p : pixels[best]) {
    const double x = p % w, y = p / w;
    if (x + y < s[0]) s[0] = x + y, q[0] = {x, y};
    if (x - y > s[1]) s[1] = x - y, q[1] = {x + 1.0, y};
    if (x + y > s[2]) s[2] = x + y, q[2] = {x + 1.0, y + 1.0};
    if (y - x > s[3]) s[3] = y - x, q[3] = {x, y + 1.0};
  }
  if (!convex(q)) return std::nullopt;
  return q;
}

}  // namespace

std::string_view to_string(RectifyStatus s) {
  switch (s) {
    case RectifyStatus::ok: return "ok";
    case RectifyStatus::quad_not_found: return "quad_not_found";
    case RectifyStatus::index_undecodable: return "index_undecodable";
    case RectifyStatus::degenerate_homography: return "degenerate_homography";
  }
  return "unknown";
}

std::optional<DetectedQuad> detect_display_quad(const Image& recording, const PlaybackLayout& layout) {
  if (recording.empty()) return std::nullopt;
  const Image gray = recording.channels == 1 ? recording : to_gray(recording);
  const auto [lo, hi] = percentiles(gray);
  if (hi - lo < kMinContrast) return std::nullopt;

  if (auto q = find_fiducials(gray, lo, hi)) return DetectedQuad{*q, layout.fiducial_centers, true};
  if (auto q = find_outline(gray, lo, hi)) {
    const double cw = layout.canvas.width, ch = layout.canvas.height;
    return DetectedQuad{*q, Quad{Vec2(0, 0), Vec2(cw, 0), Vec2(cw, ch), Vec2(0, ch)}, false};
  }
  return std::nullopt;
}

std::optional<int> decode_frame_index(const Image& canvas, const PlaybackLayout& layout) {
  const PixelRect& s = layout.marker_strip;
  if (canvas.width < s.x + s.w || canvas.height < s.y + s.h) return std::nullopt;
  std::array<double, kMarkerCells> level{};
  for (int i = 0; i < kMarkerCells; ++i) {
    const int x0 = s.x + i * s.w / kMarkerCells;
    const int x1 = s.x + (i + 1) * s.w / kMarkerCells;
    const int cw = x1 - x0;
    // Central half of the cell in both directions.
    double sum = 0.0;
    int n = 0;
    for (int y = s.y + s.h / 4; y < s.y + s.h - s.h / 4; ++y) {
      for (int x = x0 + cw / 4; x < x1 - cw / 4; ++x) {
        const std::uint8_t* p = canvas.pixel(x, y);
        sum += canvas.channels >= 3 ? (299.0 * p[0] + 587.0 * p[1] + 114.0 * p[2]) / 1000.0 : p[0];
        ++n;
      }
    }
    level[static_cast<std::size_t>(i)] = n ? sum / n : 0.0;
  }
  const double white = 0.5 * (level[0] + level[31]);
  const double black = 0.5 * (level[1] + level[30]);
  if (white - black <= kMinContrast) return std::nullopt;
  const double t = 0.5 * (white + black);
  std::array<std::uint8_t, kMarkerCells> bits{};
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = level[i] > t;
  return decode_marker_bits(bits);
}

PixelRect transfer_bbox(const PixelRect& b, const PlaybackLayout& layout) {
  const double s = layout.bbox_scale;
  if (s == 1.0) return {b.x + layout.embed.x, b.y + layout.embed.y, b.w, b.h};
  const int x0 = static_cast<int>(std::floor(b.x * s)), y0 = static_cast<int>(std::floor(b.y * s));
  const int x1 = static_cast<int>(std::ceil((b.x + b.w) * s)), y1 = static_cast<int>(std::ceil((b.y + b.h) * s));
  return {layout.embed.x + x0, layout.embed.y + y0, x1 - x0, y1 - y0};
}

Quad transfer_corners(const Quad& c, const PlaybackLayout& layout) {
  Quad out;
  const Vec2 offset(layout.embed.x, layout.embed.y);
  for (int i = 0; i < 4; ++i) out[i] = offset + layout.bbox_scale * c[i];
  return out;
}

RectifyOutcome rectify_recorded_frame(const Image& recording, const SequenceAnnotation& source,
                                      const PlaybackLayout& layout, const RectifyOptions& options) {
  RectifyOutcome out;
  const auto quad = detect_display_quad(recording, layout);
  if (!quad) {
    out.status = RectifyStatus::quad_not_found;
    return out;
  }
  const auto h = estimate_homography(quad->canvas_points, quad->image_points);
  if (!h) {
    out.status = RectifyStatus::degenerate_homography;
    return out;
  }
  out.canvas_to_recording = h;

  // Only the strip is needed to decode; place it at its canvas position.
  const PixelRect& s = layout.marker_strip;
  Image strip_canvas(s.x + s.w, s.y + s.h, recording.channels);
  blit(strip_canvas, rectify_region(recording, *h, s), s.x, s.y);
  const auto index = decode_frame_index(strip_canvas, layout);
  const FrameAnnotation* src = index ? source.find_frame(*index) : nullptr;
  if (!src) {
    out.status = RectifyStatus::index_undecodable;
    return out;
  }
  out.status = RectifyStatus::ok;
  out.frame_index = index;
  out.bbox = transfer_bbox(src->bbox, layout);
  if (options.keep_image) out.rectified = rectify(recording, *h, layout.canvas);
  return out;
}

int ProcessedSequence::ok_count() const {
  return static_cast<int>(std::count_if(log.begin(), log.end(), [](const FrameLogEntry& e) { return e.status == RectifyStatus::ok; }));
}

std::string ProcessedSequence::skip_log() const {
  std::string out;
  for (const auto& e : log) {
    if (e.status == RectifyStatus::ok) continue;
    out += std::to_string(e.recorded_index) + "\t" + std::string(to_string(e.status)) + "\n";
  }
  return out;
}

ProcessedSequence process_recorded_sequence(int frame_count, const FrameLoader& load, const SequenceAnnotation& source,
                                            const PlaybackLayout& layout, const RectifiedSink& sink,
                                            const ProcessOptions& options) {
  if (frame_count < 0) throw Error("negative frame count");
  ProcessedSequence result;
  SequenceAnnotation& seq = result.annotation;
  seq.sequence_id = options.sequence_id.empty() ? source.sequence_id + "_pr" : options.sequence_id;
  seq.data_type = DataType::partly_real;
  seq.render_engine = source.render_engine;
  seq.resolution = layout.canvas;
  seq.camera = source.camera;
  seq.light = source.light;
  seq.parameters = source.parameters;
  seq.parameters.emplace_back("source_sequence", source.sequence_id);

  std::vector<std::optional<FrameAnnotation>> frames(static_cast<std::size_t>(frame_count));
  result.log.resize(static_cast<std::size_t>(frame_count));
  const bool keep = options.keep_images && static_cast<bool>(sink);
  parallel_for(static_cast<std::size_t>(frame_count), options.jobs, [&](std::size_t i) {
    const int rec = static_cast<int>(i);
    RectifyOutcome o = rectify_recorded_frame(load(rec), source, layout, {keep});
    result.log[i] = {rec, o.status, o.frame_index};
    if (o.status != RectifyStatus::ok) return;
    const FrameAnnotation& src = *source.find_frame(*o.frame_index);
    FrameAnnotation f;
    f.frame_index = rec;
    f.label = src.label;
    f.bbox = *o.bbox;
    if (src.corners) f.corners = transfer_corners(*src.corners, layout);
    f.occluded = src.occluded;
    f.sides = src.sides;
    f.source_frame = o.frame_index;
    frames[i] = std::move(f);
    if (keep) sink(rec, *o.rectified);
  });
  for (auto& f : frames) {
    if (f) seq.frames.push_back(std::move(*f));
  }
  check_invariants(seq);
  return result;
}

}  // namespace lpsynth
