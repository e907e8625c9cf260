#pragma once

#include "lpsynth/scene_config.hpp"
#include "lpsynth/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lpsynth {

struct OcclusionSides {
  bool left = false;
  bool right = false;
  bool top = false;
  bool bottom = false;

  bool any() const { return left || right || top || bottom; }
  bool operator==(const OcclusionSides&) const = default;
};

/// Per-frame label. `bbox` is the axis-aligned hull of the projected plate,
/// clamped to the image; `occluded` is set when the unclamped hull leaves it.
struct FrameAnnotation {
  int frame_index = 0;
  std::string label;
  PixelRect bbox;
  /// Projected plate corners TL, TR, BR, BL; absent for manual labels and for
  /// plates reaching behind the camera.
  std::optional<Quad> corners;
  bool occluded = false;
  OcclusionSides sides;
  /// Partly-real frames: index of the synthetic frame decoded from the screen.
  std::optional<int> source_frame;

  bool operator==(const FrameAnnotation&) const = default;
};

struct SequenceAnnotation {
  int schema_version = 1;
  std::string sequence_id;
  DataType data_type = DataType::synthetic;
  std::string render_engine;
  ImageSize resolution;
  std::optional<CameraPreset> camera;
  std::optional<LightPreset> light;
  /// Render hyperparameters in insertion order (name, value).
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<FrameAnnotation> frames;

  /// Label shared by all frames, empty for a sequence without frames.
  std::string label() const { return frames.empty() ? std::string() : frames.front().label; }
  const FrameAnnotation* find_frame(int frame_index) const;
  bool operator==(const SequenceAnnotation&) const = default;
};

class AnnotationError : public Error {
 public:
  using Error::Error;
};

/// Throws AnnotationError naming the first violated invariant: frames sorted
/// by index without duplicates, contiguous from 0 for synthetic data, one
/// label per sequence, occluded iff sides nonempty.
void check_invariants(const SequenceAnnotation& seq);

}  // namespace lpsynth
