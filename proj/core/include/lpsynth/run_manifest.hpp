#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lpsynth {

std::string_view library_version();

/// Record of one CLI invocation, stored as run_manifest.json in its output
/// directory. The two timestamps are the only fields that differ between
/// otherwise identical runs.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;  // config, layout, annotation paths
  std::vector<std::uint64_t> seeds;
  std::string output_dir;
  std::string tool_version{library_version()};
  std::string started_at;
  std::string finished_at;
  /// Command-specific results in insertion order (counts, skip totals).
  std::vector<std::pair<std::string, std::string>> summary;
};

inline constexpr std::string_view kRunManifestName = "run_manifest.json";

/// ISO 8601 UTC with seconds, e.g. 2024-05-01T12:00:00Z.
std::string utc_timestamp(std::chrono::system_clock::time_point t);

std::string format_run_manifest(const RunManifest& m);

/// Atomically replaces `<dir>/run_manifest.json`.
void write_run_manifest(const std::filesystem::path& dir, const RunManifest& m);

}  // namespace lpsynth
