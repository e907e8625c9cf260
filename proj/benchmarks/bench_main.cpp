// Micro benchmarks for the per-frame hot paths.

#include "lpsynth/eval.hpp"
#include "lpsynth/homography.hpp"
#include "lpsynth/ocr_prep.hpp"
#include "lpsynth/playback.hpp"
#include "lpsynth/rectifier.hpp"
#include "lpsynth/renderer.hpp"

#include <benchmark/benchmark.h>

using namespace lpsynth;

namespace {

const GlyphAtlas& atlas() {
  static const GlyphAtlas a = GlyphAtlas::load(default_glyph_atlas_path());
  return a;
}

SceneConfig config(int w, int h) {
  ConfigOptions opt;
  opt.resolution = {w, h};
  opt.scene_length = 10;
  return generate_config(1, default_preset_bank(), opt);
}

const Image& canvas() {
  static const Image c = [] {
    const SceneConfig cfg = config(1920, 1080);
    return compose_playback_frame(render_frame(cfg, 5, atlas()).pixels, 5, format_label(cfg.plate), PlaybackLayout{},
                                  atlas());
  }();
  return c;
}

Homography view() {
  const std::vector<Vec2> src{{0, 0}, {3840, 0}, {3840, 2160}, {0, 2160}};
  const std::vector<Vec2> dst{{170, 120}, {1750, 80}, {1790, 1000}, {130, 960}};
  return *estimate_homography(src, dst);
}

void BM_RenderFrame(benchmark::State& state) {
  const SceneConfig cfg = config(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const SceneRenderer r(cfg, atlas());
  for (auto _ : state) benchmark::DoNotOptimize(r.render(5));
}
BENCHMARK(BM_RenderFrame)->Args({640, 360})->Args({1920, 1080})->Unit(benchmark::kMillisecond);

void BM_ComposePlayback(benchmark::State& state) {
  const SceneConfig cfg = config(1920, 1080);
  const Image frame = render_frame(cfg, 5, atlas()).pixels;
  for (auto _ : state) benchmark::DoNotOptimize(compose_playback_frame(frame, 5, "ER-K1234", PlaybackLayout{}, atlas()));
}
BENCHMARK(BM_ComposePlayback)->Unit(benchmark::kMillisecond);

void BM_DetectQuad(benchmark::State& state) {
  const Image rec = warp(canvas(), view(), {1920, 1080});
  for (auto _ : state) benchmark::DoNotOptimize(detect_display_quad(rec, PlaybackLayout{}));
}
BENCHMARK(BM_DetectQuad)->Unit(benchmark::kMillisecond);

void BM_RectifyRecordedFrame(benchmark::State& state) {
  const Image rec = warp(canvas(), view(), {1920, 1080});
  SequenceAnnotation src;
  src.sequence_id = "bench";
  FrameAnnotation f;
  f.label = "ER-K1234";
  for (int i = 0; i < 10; ++i) {
    f.frame_index = i;
    src.frames.push_back(f);
  }
  const RectifyOptions opt{state.range(0) != 0};
  for (auto _ : state) benchmark::DoNotOptimize(rectify_recorded_frame(rec, src, PlaybackLayout{}, opt));
}
BENCHMARK(BM_RectifyRecordedFrame)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EstimateHomography(benchmark::State& state) {
  const Homography h = view();
  std::vector<Vec2> src, dst;
  for (int i = 0; i < state.range(0); ++i) {
    src.emplace_back((977 * i) % 3840 + 11.0, (131 * i * i + 7 * i) % 2160 + 13.0);
    dst.push_back(h.apply(src.back()));
  }
  if (!estimate_homography(src, dst)) state.SkipWithError("degenerate points");
  for (auto _ : state) benchmark::DoNotOptimize(estimate_homography(src, dst));
}
BENCHMARK(BM_EstimateHomography)->Arg(4)->Arg(20);

void BM_Levenshtein(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(levenshtein("ABC-XY1234", "ABG-XV1284"));
}
BENCHMARK(BM_Levenshtein);

void BM_MinAreaRect(benchmark::State& state) {
  std::vector<Vec2> pts;
  for (int i = 0; i < state.range(0); ++i) pts.emplace_back(std::cos(i * 0.7) * 50 + i % 7, std::sin(i * 1.3) * 20);
  for (auto _ : state) benchmark::DoNotOptimize(min_area_rect(pts));
}
BENCHMARK(BM_MinAreaRect)->Arg(4)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
