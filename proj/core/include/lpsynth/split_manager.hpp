#pragma once

#include "lpsynth/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lpsynth {

struct SampleRecord {
  std::string id;
  std::string label;
};

struct DatasetSplit {
  DataType data_type = DataType::synthetic;
  std::optional<int> subset_id;  // 0/25/50/75/100, none for real data
  std::uint64_t seed = 0;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;

  bool operator==(const DatasetSplit&) const = default;
};

struct SplitFractions {
  double validation = 0.1;
  double test = 0.1;
};

/// Full split. Whole label groups go to test (in seeded order) until it holds
/// at least fractions.test of the samples, so test labels never reach the
/// other splits; the rest is shuffled and cut into train and validation.
DatasetSplit build_split(std::span<const SampleRecord> samples, DataType type, const SplitFractions& fractions,
                         std::uint64_t seed);

/// round-half-to-even(n * percent / 100), exact in integers.
std::size_t subset_size(std::size_t n, int percent);

struct SubsetSpec {
  std::vector<int> fractions{25, 50, 75};
  std::size_t pinned_train_0 = 9040;
  std::optional<std::size_t> pinned_validation_0;
};

/// Subsets 0, the given fractions and 100 (in that order). One seeded
/// permutation per split; every subset takes a prefix, so the subsets nest.
/// Test is shared unchanged. Throws Error when a pinned size exceeds the full
/// split or a fraction is outside (0, 100).
std::vector<DatasetSplit> build_subsets(const DatasetSplit& full, const SubsetSpec& spec, std::uint64_t seed);

struct SplitVerdict {
  bool valid = true;
  std::vector<std::string> violations;
};

/// Disjointness by id, no duplicate ids, every id labelled, no test label in
/// train or validation.
SplitVerdict verify_split(const DatasetSplit& split, std::span<const SampleRecord> annotations);

/// Each subset's train and validation contained in the next larger one's.
SplitVerdict verify_nesting(std::span<const DatasetSplit> subsets);

/// Percentage with `decimals` places, "0.6%" style.
std::string format_ratio(std::size_t part, std::size_t whole, int decimals = 1);

/// Rows "type subset train validation test total" in the published layout.
std::string format_split_table(std::span<const DatasetSplit> subsets);

/// Header "# seed=<s> type=<t> subset=<k|none> train=<n> validation=<n> test=<n>",
/// then [train], [validation], [test] sections with one id per line.
std::string format_membership(const DatasetSplit& split);
DatasetSplit parse_membership(std::string_view text);
void write_membership(const std::filesystem::path& path, const DatasetSplit& split);
DatasetSplit read_membership(const std::filesystem::path& path);

}  // namespace lpsynth
