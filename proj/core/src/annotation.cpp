#include "lpsynth/annotation.hpp"

#include <algorithm>

namespace lpsynth {

const FrameAnnotation* SequenceAnnotation::find_frame(int frame_index) const {
  const auto it = std::lower_bound(frames.begin(), frames.end(), frame_index,
                                   [](const FrameAnnotation& f, int i) { return f.frame_index < i; });
  return it != frames.end() && it->frame_index == frame_index ? &*it : nullptr;
}

void check_invariants(const SequenceAnnotation& seq) {
  const std::string where = "sequence '" + seq.sequence_id + "': ";
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const FrameAnnotation& f = seq.frames[i];
    const std::string at = where + "frame " + std::to_string(f.frame_index) + ": ";
    if (f.frame_index < 0) throw AnnotationError(at + "negative frame index");
    if (i > 0 && f.frame_index <= seq.frames[i - 1].frame_index) {
      throw AnnotationError(at + "frames not sorted by index or duplicated");
    }
    if (seq.data_type == DataType::synthetic && f.frame_index != static_cast<int>(i)) {
      throw AnnotationError(at + "synthetic frames must be contiguous from 0");
    }
    if (f.label != seq.frames.front().label) throw AnnotationError(at + "label differs within sequence");
    if (f.label.empty()) throw AnnotationError(at + "empty label");
    if (f.occluded != f.sides.any()) throw AnnotationError(at + "occluded flag disagrees with occlusion sides");
    if (f.bbox.w < 0 || f.bbox.h < 0) throw AnnotationError(at + "negative bbox size");
  }
}

}  // namespace lpsynth
