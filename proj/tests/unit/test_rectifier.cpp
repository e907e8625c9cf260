#include "lpsynth/homography.hpp"
#include "lpsynth/playback.hpp"
#include "lpsynth/rectifier.hpp"
#include "lpsynth/renderer.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lpsynth;

namespace {

const GlyphAtlas& atlas() {
  static const GlyphAtlas a = GlyphAtlas::load(default_glyph_atlas_path());
  return a;
}

struct Source {
  SequenceAnnotation annotation;
  std::vector<Image> frames;
};

const Source& source() {
  static const Source s = [] {
    ConfigOptions opt;
    opt.resolution = {1920, 1080};
    opt.scene_length = 4;
    const auto seq = render_sequence(generate_config(404, default_preset_bank(), opt), atlas());
    Source out;
    out.annotation = seq.annotation;
    for (const auto& f : seq.frames) out.frames.push_back(f.pixels);
    return out;
  }();
  return s;
}

Image canvas_for(int i, const PlaybackLayout& l = {}) {
  return compose_playback_frame(source().frames[static_cast<std::size_t>(i)], i, source().annotation.label(), l,
                                atlas());
}

// Mild perspective view of the canvas in a 1920x1080 recording.
Homography mild_view(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> j(-40.0, 40.0);
  const std::vector<Vec2> canvas{{0, 0}, {3840, 0}, {3840, 2160}, {0, 2160}};
  const std::vector<Vec2> view{{150 + j(gen), 90 + j(gen)},
                               {1770 + j(gen), 90 + j(gen)},
                               {1770 + j(gen), 990 + j(gen)},
                               {150 + j(gen), 990 + j(gen)}};
  return *estimate_homography(canvas, view);
}

}  // namespace

TEST(Rectifier, AxisAlignedPasteFindsFiducialCentres) {
  const PlaybackLayout l;
  const Image canvas = canvas_for(0);
  Image big(3840 + 300, 2160 + 200, 3, 40);
  blit(big, canvas, 170, 90);
  const auto q = detect_display_quad(big, l);
  ASSERT_TRUE(q);
  EXPECT_TRUE(q->from_fiducials);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(q->image_points[i].x(), l.fiducial_centers[i].x() + 170, 0.5);
    EXPECT_NEAR(q->image_points[i].y(), l.fiducial_centers[i].y() + 90, 0.5);
  }
}

TEST(Rectifier, PerspectiveWarpFindsWarpedCorners) {
  const PlaybackLayout l;
  std::mt19937_64 gen(3);
  const Homography h = mild_view(gen);
  const auto q = detect_display_quad(warp(canvas_for(1), h, {1920, 1080}), l);
  ASSERT_TRUE(q);
  for (int i = 0; i < 4; ++i) {
    const Vec2 truth = h.apply(l.fiducial_centers[i]);
    EXPECT_LT((q->image_points[i] - truth).norm(), 1.0) << i;
  }
}

TEST(Rectifier, BlankImageHasNoQuad) {
  const Image gray(1920, 1080, 3, 128);
  EXPECT_FALSE(detect_display_quad(gray, PlaybackLayout{}));
  EXPECT_EQ(rectify_recorded_frame(gray, source().annotation, PlaybackLayout{}).status, RectifyStatus::quad_not_found);
}

TEST(Rectifier, CleanCanvasDecodesIndex) {
  EXPECT_EQ(decode_frame_index(canvas_for(0), PlaybackLayout{}), 0);
}

TEST(Rectifier, ZeroedStripIsUndecodable) {
  const PlaybackLayout l;
  Image c = canvas_for(2);
  fill_rect(c, l.marker_strip, {0, 0, 0});
  EXPECT_FALSE(decode_frame_index(c, l));
  EXPECT_EQ(rectify_recorded_frame(c, source().annotation, l).status, RectifyStatus::index_undecodable);
}

TEST(Rectifier, WarpedSweepDecodesEveryIndex) {
  const PlaybackLayout l;
  std::mt19937_64 gen(11);
  SequenceAnnotation long_source = source().annotation;
  long_source.frames.clear();
  for (int i = 0; i < 50; ++i) {
    FrameAnnotation f = source().annotation.frames[0];
    f.frame_index = i;
    long_source.frames.push_back(f);
  }
  for (int i = 0; i < 50; ++i) {
    const Image c = compose_playback_frame(source().frames[0], i, long_source.label(), l, atlas());
    const RectifyOutcome o = rectify_recorded_frame(warp(c, mild_view(gen), {1920, 1080}), long_source, l, {false});
    ASSERT_EQ(o.status, RectifyStatus::ok) << i;
    EXPECT_EQ(o.frame_index, i);
  }
}

TEST(Rectifier, TransferBbox) {
  const PlaybackLayout l;
  EXPECT_EQ(transfer_bbox({0, 0, 10, 10}, l), (PixelRect{960, 540, 10, 10}));
  EXPECT_EQ(transfer_bbox({0, 0, 1920, 1080}, l), l.embed);
  const Quad q{Vec2(1, 2), Vec2(3, 2), Vec2(3, 4), Vec2(1, 4)};
  const Quad t = transfer_corners(q, l);
  EXPECT_EQ(t[0], Vec2(961, 542));
  EXPECT_EQ(t[2], Vec2(963, 544));
}

TEST(Rectifier, IdentityPipelineShiftsAnnotations) {
  const PlaybackLayout l;
  const SequenceAnnotation& src = source().annotation;
  int sunk = 0;
  const ProcessedSequence p = process_recorded_sequence(
      4, [&](int i) { return canvas_for(i); }, src, l,
      [&](int i, const Image& img) {
        ++sunk;
        EXPECT_EQ(crop(img, l.embed), source().frames[static_cast<std::size_t>(i)]);
      });
  EXPECT_EQ(p.ok_count(), 4);
  EXPECT_EQ(sunk, 4);
  EXPECT_EQ(p.skip_log(), "");
  EXPECT_EQ(p.annotation.data_type, DataType::partly_real);
  EXPECT_EQ(p.annotation.resolution, l.canvas);
  EXPECT_EQ(p.annotation.sequence_id, src.sequence_id + "_pr");
  ASSERT_EQ(p.annotation.frames.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    const FrameAnnotation& a = p.annotation.frames[static_cast<std::size_t>(i)];
    const FrameAnnotation& s = src.frames[static_cast<std::size_t>(i)];
    EXPECT_EQ(a.bbox, (PixelRect{s.bbox.x + 960, s.bbox.y + 540, s.bbox.w, s.bbox.h}));
    EXPECT_EQ(a.label, s.label);
    EXPECT_EQ(a.sides, s.sides);
    EXPECT_EQ(a.source_frame, i);
  }
}

TEST(Rectifier, GrayFrameIsSkipped) {
  const PlaybackLayout l;
  const ProcessedSequence p = process_recorded_sequence(
      4, [&](int i) { return i == 2 ? Image(3840, 2160, 3, 128) : canvas_for(i); }, source().annotation, l, {},
      {"", false, 1});
  EXPECT_EQ(p.ok_count(), 3);
  EXPECT_EQ(p.skip_log(), "2\tquad_not_found\n");
  ASSERT_EQ(p.annotation.frames.size(), 3u);
  EXPECT_EQ(p.annotation.frames[2].frame_index, 3);
  EXPECT_EQ(p.annotation.frames[2].source_frame, 3);
}
