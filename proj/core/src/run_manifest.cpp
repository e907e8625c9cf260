#include "lpsynth/run_manifest.hpp"

#include "detail/text.hpp"

#include <nlohmann/json.hpp>

#include <ctime>

namespace lpsynth {

std::string_view library_version() { return LPSYNTH_VERSION; }

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_run_manifest(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["inputs"] = m.inputs;
  j["seeds"] = m.seeds;
  j["output_dir"] = m.output_dir;
  j["tool_version"] = m.tool_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.summary) summary[k] = v;
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

void write_run_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  std::filesystem::create_directories(dir);
  detail::write_text_file_atomic((dir / kRunManifestName).string(), format_run_manifest(m));
}

}  // namespace lpsynth
