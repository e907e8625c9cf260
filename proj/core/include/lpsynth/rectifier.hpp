#pragma once

#include "lpsynth/annotation.hpp"
#include "lpsynth/homography.hpp"
#include "lpsynth/image.hpp"
#include "lpsynth/playback.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lpsynth {

enum class RectifyStatus { ok, quad_not_found, index_undecodable, degenerate_homography };

std::string_view to_string(RectifyStatus s);

/// Four matched points: where they are in the recording and which canvas
/// points they correspond to (fiducial centres, or the canvas corners when
/// the outline fallback was used). Both ordered TL, TR, BR, BL.
struct DetectedQuad {
  Quad image_points;
  Quad canvas_points;
  bool from_fiducials = true;
};

/// Finds the displayed canvas in a recorded frame. Fiducials are concentric
/// dark/bright/dark blobs with the layout's 1:3:5 area ratios, localised by an
/// intensity-weighted centroid of the inner square. Without four of them the
/// largest non-dark blob's extreme points stand in for the canvas corners.
std::optional<DetectedQuad> detect_display_quad(const Image& recording, const PlaybackLayout& layout);

/// Reads the marker strip of a canvas-aligned image.
std::optional<int> decode_frame_index(const Image& rectified_canvas, const PlaybackLayout& layout);

/// Shift by the embed offset and scale by layout.bbox_scale.
PixelRect transfer_bbox(const PixelRect& synthetic_bbox, const PlaybackLayout& layout);
Quad transfer_corners(const Quad& synthetic_corners, const PlaybackLayout& layout);

struct RectifyOutcome {
  RectifyStatus status = RectifyStatus::quad_not_found;
  std::optional<Image> rectified;  // canvas-sized
  std::optional<int> frame_index;  // decoded source frame
  std::optional<PixelRect> bbox;   // in canvas pixels
  std::optional<Homography> canvas_to_recording;
};

struct RectifyOptions {
  /// Rectify the whole canvas. Off, only the marker strip is resampled and
  /// `rectified` stays empty even for ok frames.
  bool keep_image = true;
};

/// One recorded frame against its source annotation. An index that decodes
/// but is absent from `source` counts as undecodable.
RectifyOutcome rectify_recorded_frame(const Image& recording, const SequenceAnnotation& source,
                                      const PlaybackLayout& layout, const RectifyOptions& options = {});

struct FrameLogEntry {
  int recorded_index = 0;
  RectifyStatus status = RectifyStatus::ok;
  std::optional<int> source_frame;
};

struct ProcessedSequence {
  SequenceAnnotation annotation;  // partly-real, canvas resolution
  std::vector<FrameLogEntry> log;

  int ok_count() const;
  /// One line per skipped frame: "<recorded_index>\t<status>".
  std::string skip_log() const;
};

struct ProcessOptions {
  /// Partly-real sequence id; defaults to "<source id>_pr".
  std::string sequence_id;
  bool keep_images = true;
  int jobs = 1;
};

using FrameLoader = std::function<Image(int recorded_index)>;
using RectifiedSink = std::function<void(int recorded_index, const Image& rectified)>;

/// Rectifies frames 0..frame_count-1. Failed frames are logged and skipped.
/// With jobs > 1 the loader and sink are called from several threads.
ProcessedSequence process_recorded_sequence(int frame_count, const FrameLoader& load,
                                            const SequenceAnnotation& source, const PlaybackLayout& layout,
                                            const RectifiedSink& sink = {}, const ProcessOptions& options = {});

}  // namespace lpsynth
