#pragma once

#include "lpsynth/split_manager.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lpsynth {

/// Code points of a UTF-8 string; each malformed byte decodes to U+FFFD.
std::u32string decode_utf8(std::string_view s);

/// Unit-cost edit distance over code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

/// levenshtein(prediction, label) / code points in label. The label is the
/// formatted one, so the dash counts as a character. Throws on an empty label.
double cer(std::string_view prediction, std::string_view label);

struct SampleScore {
  std::string id;
  std::string prediction;
  std::string label;
  std::size_t distance = 0;
  std::size_t label_chars = 0;

  bool correct() const { return distance == 0; }
};

SampleScore score_sample(std::string id, std::string prediction, std::string label);

/// N_F / (N_T + N_F). Throws on an empty input.
double miss_rate(std::span<const SampleScore> samples);

struct EvalReport {
  double corpus_cer = 0.0;  // total distance / total label characters
  double macro_cer = 0.0;   // mean of per-sample CER
  double mr = 0.0;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
  std::size_t total_distance = 0;
  std::size_t total_chars = 0;
  std::vector<SampleScore> per_sample;
};

EvalReport summarize(std::vector<SampleScore> samples);

/// Predictions file: "<sample_id>\t<prediction>" per line. Duplicate ids and
/// lines without a tab are errors.
std::vector<std::pair<std::string, std::string>> parse_predictions(std::string_view text);
std::string format_predictions(std::span<const std::pair<std::string, std::string>> predictions);

/// Scores every test id of `split` in split order. Missing predictions score
/// as empty strings; a prediction for an id outside the test split throws.
EvalReport evaluate_run(std::span<const std::pair<std::string, std::string>> predictions,
                        const std::map<std::string, std::string, std::less<>>& labels, const DatasetSplit& split);

struct ReportCell {
  std::string row;  // training data, e.g. "Synthetic"
  std::string subset;  // column group, e.g. "25"
  EvalReport report;
};

/// Rows by training data, column pairs (CER [%], MR [%]) by subset, "--" for
/// missing cells. Subset columns appear in the order given.
std::string format_report_table(std::span<const ReportCell> cells, std::span<const std::string> subset_columns);

/// JSON mirror with aggregates and per-sample records for every cell.
std::string format_report_json(std::span<const ReportCell> cells);

/// Percent with two decimals, "73.74".
std::string format_percent(double fraction);

}  // namespace lpsynth
