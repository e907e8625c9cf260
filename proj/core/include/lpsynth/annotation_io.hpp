#pragma once

#include "lpsynth/annotation.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace lpsynth {

inline constexpr int kAnnotationSchemaVersion = 1;

/// XML document for one sequence. Checks invariants first.
std::string annotation_to_xml(const SequenceAnnotation& seq);

/// Strict parse: unknown or missing elements, a foreign schema version and
/// invariant violations all throw AnnotationError.
SequenceAnnotation annotation_from_xml(std::string_view xml);

/// JSON mirror of the XML document (derived; the XML is authoritative).
std::string annotation_to_json(const SequenceAnnotation& seq);

/// Writes `<dir>/<sequence_id>.xml` and its `.json` mirror, returns the XML path.
std::filesystem::path write_annotation(const std::filesystem::path& dir, const SequenceAnnotation& seq);
SequenceAnnotation read_annotation(const std::filesystem::path& xml_path);

}  // namespace lpsynth
