#include "lpsynth/homography.hpp"
#include "lpsynth/ocr_prep.hpp"
#include "lpsynth/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace lpsynth;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double fold90(double a) {
  while (a >= 0.25 * std::numbers::pi) a -= 0.5 * std::numbers::pi;
  while (a < -0.25 * std::numbers::pi) a += 0.5 * std::numbers::pi;
  return a;
}

Quad rotated_rect(Vec2 c, double w, double h, double a) {
  const Vec2 u(std::cos(a), std::sin(a)), v(-u.y(), u.x());
  return {c - 0.5 * w * u - 0.5 * h * v, c + 0.5 * w * u - 0.5 * h * v, c + 0.5 * w * u + 0.5 * h * v,
          c - 0.5 * w * u + 0.5 * h * v};
}

// White card with a dark bar, rotated by `a` about the canvas centre.
Image rotated_bar(double a, Quad* card_corners) {
  Image card(240, 60, 3, 255);
  fill_rect(card, {20, 15, 200, 30}, {0, 0, 0});
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  const Vec2 off = Vec2(200, 200) - m.topLeftCorner<2, 2>() * Vec2(120, 30);
  m(0, 2) = off.x();
  m(1, 2) = off.y();
  const Homography h{m};
  Image out = warp(card, h, {400, 400});
  const Homography inv = h.inverse();
  for (int y = 0; y < 400; ++y) {
    for (int x = 0; x < 400; ++x) {
      const Vec2 s = inv.apply({x + 0.5, y + 0.5});
      if (s.x() < 0 || s.y() < 0 || s.x() >= 240 || s.y() >= 60) std::fill_n(out.pixel(x, y), 3, std::uint8_t{255});
    }
  }
  const Quad tc{Vec2(0, 0), Vec2(240, 0), Vec2(240, 60), Vec2(0, 60)};
  for (int i = 0; i < 4; ++i) (*card_corners)[i] = h.apply(tc[i]);
  return out;
}

}  // namespace

TEST(MinAreaRect, AxisAlignedSquare) {
  const std::vector<Vec2> sq{{2, 3}, {12, 3}, {12, 13}, {2, 13}};
  const RotatedRect r = min_area_rect(sq);
  EXPECT_NEAR(fold90(r.angle), 0.0, 1e-12);
  EXPECT_NEAR(r.size.x(), 10.0, 1e-9);
  EXPECT_NEAR(r.size.y(), 10.0, 1e-9);
  EXPECT_NEAR(r.center.x(), 7.0, 1e-9);
  EXPECT_NEAR(r.center.y(), 8.0, 1e-9);
}

TEST(MinAreaRect, RotatedSquare) {
  const Quad q = rotated_rect({50, 40}, 20, 20, 30 * kDeg);
  const RotatedRect r = min_area_rect(std::vector<Vec2>(q.begin(), q.end()));
  EXPECT_NEAR(fold90(r.angle), 30 * kDeg, 1e-9);
  EXPECT_NEAR(r.size.x(), 20.0, 1e-9);
  EXPECT_NEAR(r.size.y(), 20.0, 1e-9);
}

TEST(MinAreaRect, MatchesAngleSweep) {
  SplitMix64 rng(9);
  for (int t = 0; t < 100; ++t) {
    std::vector<Vec2> pts;
    const int n = 4 + static_cast<int>(rng.uniform_below(10));
    for (int i = 0; i < n; ++i) pts.emplace_back(rng.uniform(-50, 50), rng.uniform(-30, 30));
    const RotatedRect r = min_area_rect(pts);
    const double sweep = oracle::min_rect_area_sweep(pts);
    EXPECT_LE(r.area(), sweep * (1 + 1e-9));
    EXPECT_NEAR(r.area(), sweep, 1e-6 * sweep);
    EXPECT_GE(r.angle, -0.25 * std::numbers::pi);
    EXPECT_LT(r.angle, 0.25 * std::numbers::pi);
  }
}

TEST(MinAreaRect, CornersMatchCentreSizeAngle) {
  const RotatedRect r{{10, 20}, {8, 4}, 0.3};
  const Quad q = r.corners();
  const Quad expect = rotated_rect({10, 20}, 8, 4, 0.3);
  for (int i = 0; i < 4; ++i) EXPECT_LT((q[i] - expect[i]).norm(), 1e-12);
}

TEST(MinAreaRect, CollinearThrows) {
  const std::vector<Vec2> line{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_THROW(min_area_rect(line), Error);
}

TEST(ConvexHull, DropsInteriorPoints) {
  const std::vector<Vec2> pts{{0, 0}, {4, 0}, {4, 4}, {0, 4}, {2, 2}, {1, 3}, {2, 0}};
  EXPECT_EQ(convex_hull(pts).size(), 4u);
}

TEST(Deskew, AxisAlignedIsCropOnly) {
  Image img(100, 60, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<std::uint8_t>(i * 13);
  const PixelRect r{10, 12, 64, 24};
  const Quad q{Vec2(10, 12), Vec2(74, 12), Vec2(74, 36), Vec2(10, 36)};
  EXPECT_EQ(deskew_crop(img, q, 24), crop(img, r));
}

TEST(Deskew, RemovesRotation) {
  Quad corners;
  const Image img = rotated_bar(15 * kDeg, &corners);
  EXPECT_NEAR(oracle::principal_axis(to_gray(img), 128), 15 * kDeg, 1 * kDeg);
  const Image out = deskew_crop(img, corners, 60);
  EXPECT_NEAR(oracle::principal_axis(to_gray(out), 128), 0.0, 1 * kDeg);
  EXPECT_EQ(out.height, 60);
  EXPECT_NEAR(out.width, 240, 1);
}

TEST(Deskew, Idempotent) {
  Quad corners;
  const Image once = deskew_crop(rotated_bar(-22 * kDeg, &corners), corners, 60);
  const Quad full{Vec2(0, 0), Vec2(once.width, 0), Vec2(once.width, once.height), Vec2(0, once.height)};
  const Image twice = deskew_crop(once, full, 60);
  EXPECT_EQ(twice, once);
  EXPECT_NEAR(oracle::principal_axis(to_gray(twice), 128), oracle::principal_axis(to_gray(once), 128), 0.5 * kDeg);
}

TEST(Deskew, ShearIsPreserved) {
  // Horizontal parallelogram: long edges level, sides leaning 20 px over 40.
  Image img(300, 100, 3, 255);
  for (int y = 30; y < 70; ++y) {
    const int x0 = 40 + (y - 30) / 2;
    for (int x = x0; x < x0 + 180; ++x) std::fill_n(img.pixel(x, y), 3, std::uint8_t{0});
  }
  const Quad q{Vec2(40, 30), Vec2(220, 30), Vec2(240, 70), Vec2(60, 70)};
  const Image out = deskew_crop(img, q, 40);
  const Image g = to_gray(out);
  auto first_dark = [&](int y) {
    for (int x = 0; x < g.width; ++x) {
      if (*g.pixel(x, y) < 128) return x;
    }
    return -1;
  };
  // The crop keeps a 1:1 scale here, so the left edge still moves 0.5 px per row.
  const double slope = double(first_dark(36) - first_dark(4)) / 32.0;
  EXPECT_NEAR(slope, 0.5, 0.05);
}

TEST(OcrPrep, SampleIdAndManifestRoundTrip) {
  EXPECT_EQ(sample_id("seq_ab", 7), "seq_ab_f000007");
  std::vector<ManifestEntry> entries{{"a_f000000", "images/a_f000000.png", "ER-K1234", DataType::synthetic, "a", 0},
                                     {"b_pr_f000003", "images/b.png", "M-A1", DataType::partly_real, "b_pr", 3}};
  EXPECT_EQ(parse_manifest(format_manifest(entries)), entries);
  EXPECT_THROW(parse_manifest("a\tb\tc\n"), Error);
  entries[0].label = "bad\tlabel";
  EXPECT_THROW(format_manifest(entries), Error);
}

TEST(OcrPrep, SkipsOccludedUnlessAsked) {
  SequenceAnnotation seq;
  seq.sequence_id = "s";
  FrameAnnotation f;
  f.label = "M-A1";
  f.bbox = {10, 10, 40, 10};
  f.occluded = true;
  f.sides.left = true;
  const Image img(100, 40, 3, 200);
  EXPECT_FALSE(prep_frame(img, f, seq));
  PrepOptions keep;
  keep.keep_occluded = true;
  const auto s = prep_frame(img, f, seq, keep);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->image.height, kOcrHeight);
  EXPECT_EQ(s->image.width, 4 * kOcrHeight);
  EXPECT_EQ(s->sample_id, "s_f000000");
  f.bbox = {};
  EXPECT_FALSE(prep_frame(img, f, seq, keep));
}
