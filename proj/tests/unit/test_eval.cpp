#include "lpsynth/eval.hpp"
#include "lpsynth/plate_grammar.hpp"
#include "lpsynth/split_manager.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace lpsynth;

namespace {

// Textbook Wagner-Fischer table, kept separate from the library version.
std::size_t dp_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    }
  }
  return d[a.size()][b.size()];
}

}  // namespace

TEST(Levenshtein, Basics) {
  EXPECT_EQ(levenshtein("", ""), 0u);
  EXPECT_EQ(levenshtein("", "ABC"), 3u);
  EXPECT_EQ(levenshtein("ABC", ""), 3u);
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(dp_distance("kitten", "sitting"), 3u);
}

TEST(Levenshtein, MatchesExhaustiveSearch) {
  const auto strings = oracle::all_strings("ab", 5);
  for (const auto& a : strings) {
    const auto dist = oracle::edit_distances_from(a, "ab", 5);
    for (const auto& b : strings) ASSERT_EQ(static_cast<int>(levenshtein(a, b)), dist.at(b)) << a << " " << b;
  }
}

TEST(Levenshtein, MatchesTableOnRandomPairs) {
  SplitMix64 rng(1);
  for (int t = 0; t < 2000; ++t) {
    std::string a(rng.uniform_below(15), ' '), b(rng.uniform_below(15), ' ');
    for (char& c : a) c = "AB-12"[rng.uniform_below(5)];
    for (char& c : b) c = "AB-12"[rng.uniform_below(5)];
    ASSERT_EQ(levenshtein(a, b), dp_distance(a, b));
  }
}

TEST(Levenshtein, CountsCodePoints) {
  EXPECT_EQ(levenshtein("KÖ-A1", "KO-A1"), 1u);
  EXPECT_EQ(decode_utf8("KÖ").size(), 2u);
  EXPECT_EQ(decode_utf8("\xff").front(), U'\uFFFD');
  EXPECT_DOUBLE_EQ(cer("KÖ-A1", "KÖ-A1"), 0.0);
  EXPECT_DOUBLE_EQ(cer("KO-A1", "KÖ-A1"), 0.2);
}

TEST(Cer, Fixtures) {
  EXPECT_EQ(cer("ER-K1234", "ER-K1234"), 0.0);
  EXPECT_EQ(cer("ER-K1235", "ER-K1234"), 0.125);
  EXPECT_EQ(cer("", "ER-K1234"), 1.0);
  EXPECT_THROW(cer("A", ""), Error);
}

TEST(MissRate, Fixtures) {
  std::vector<SampleScore> s{score_sample("a", "M-A1", "M-A1"), score_sample("b", "M-A2", "M-A2")};
  EXPECT_EQ(miss_rate(s), 0.0);
  s.push_back(score_sample("c", "M-A3", "M-A3"));
  s.push_back(score_sample("d", "M-A5", "M-A4"));
  EXPECT_EQ(miss_rate(s), 0.25);
  const EvalReport r = summarize(s);
  EXPECT_EQ(r.n_false, 1u);
  EXPECT_EQ(r.n_true, 3u);
  for (const auto& x : r.per_sample) EXPECT_EQ(x.correct(), x.distance == 0);
}

TEST(Summarize, PerfectAndEmptyPredictions) {
  std::vector<SampleScore> perfect, empty;
  for (const char* l : {"ER-K1234", "M-A1", "ABC-XY9"}) {
    perfect.push_back(score_sample(l, l, l));
    empty.push_back(score_sample(l, "", l));
  }
  const EvalReport p = summarize(perfect);
  EXPECT_EQ(p.corpus_cer, 0.0);
  EXPECT_EQ(p.mr, 0.0);
  const EvalReport e = summarize(empty);
  EXPECT_EQ(e.corpus_cer, 1.0);
  EXPECT_EQ(e.macro_cer, 1.0);
  EXPECT_EQ(e.mr, 1.0);
}

TEST(Summarize, CorpusVersusMacro) {
  std::vector<SampleScore> s{score_sample("a", "M-A2", "M-A1"), score_sample("b", "ER-K1234", "ER-K1234")};
  const EvalReport r = summarize(s);
  EXPECT_DOUBLE_EQ(r.corpus_cer, 1.0 / 12.0);
  EXPECT_DOUBLE_EQ(r.macro_cer, 0.5 * 0.25);
}

// A 647-sample set, every sample wrong, whose corpus CER prints as the
// published real-data baseline.
TEST(Summarize, RealBaselineFixture) {
  constexpr std::size_t kSamples = 647;
  for (std::uint64_t seed = 1;; ++seed) {
    SplitMix64 rng(seed);
    std::vector<std::string> labels;
    std::size_t chars = 0;
    for (std::size_t i = 0; i < kSamples; ++i) {
      labels.push_back(format_label(generate_plate(rng)));
      chars += labels.back().size();
    }
    // Smallest total distance whose ratio prints as 73.74.
    const auto dist = static_cast<std::size_t>(std::ceil(0.73735 * chars));
    if (!(double(dist) / chars < 0.73745)) continue;
    std::vector<SampleScore> scores;
    std::size_t left = dist;
    for (std::size_t i = 0; i < kSamples; ++i) {
      const std::size_t rest = kSamples - i - 1;
      std::size_t k = std::min(labels[i].size(), left - rest);
      k = std::max<std::size_t>(1, std::min(k, (left + rest) / (rest + 1)));
      std::string pred = labels[i];
      for (std::size_t c = 0; c < k; ++c) pred[c] = pred[c] == '#' ? '*' : '#';
      scores.push_back(score_sample(std::to_string(i), pred, labels[i]));
      left -= k;
    }
    ASSERT_EQ(left, 0u);
    const EvalReport r = summarize(scores);
    EXPECT_EQ(r.total_distance, dist);
    EXPECT_EQ(format_percent(r.corpus_cer), "73.74");
    EXPECT_EQ(format_percent(r.mr), "100.00");
    EXPECT_EQ(r.n_false, kSamples);
    return;
  }
}

TEST(Predictions, ParseAndFormat) {
  const auto p = parse_predictions("a\tER-K1234\nb\t\n");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[1].second, "");
  EXPECT_EQ(parse_predictions(format_predictions(p)), p);
  EXPECT_THROW(parse_predictions("a ER-K1234\n"), Error);
  EXPECT_THROW(parse_predictions("a\tX\na\tY\n"), Error);
}

TEST(EvaluateRun, ScoresTestSplitOnly) {
  DatasetSplit split;
  split.train = {"t"};
  split.test = {"x1", "x2"};
  const std::map<std::string, std::string, std::less<>> labels{{"t", "M-A1"}, {"x1", "ER-K1234"}, {"x2", "B-C2"}};
  const std::vector<std::pair<std::string, std::string>> preds{{"x1", "ER-K1234"}};
  const EvalReport r = evaluate_run(preds, labels, split);
  EXPECT_EQ(r.per_sample.size(), 2u);
  EXPECT_EQ(r.n_false, 1u);  // x2 missing, scored as empty
  EXPECT_DOUBLE_EQ(r.corpus_cer, 4.0 / 12.0);
  const std::vector<std::pair<std::string, std::string>> stray{{"t", "M-A1"}};
  EXPECT_THROW(evaluate_run(stray, labels, split), Error);
}

TEST(Report, TableAndJsonAreDeterministic) {
  std::vector<SampleScore> s{score_sample("a", "M-A2", "M-A1")};
  const std::vector<ReportCell> cells{{"Real", "100", summarize(s)}, {"Synthetic", "0", summarize(s)}};
  const std::vector<std::string> cols{"0", "100"};
  const std::string t = format_report_table(cells, cols);
  EXPECT_EQ(t, format_report_table(cells, cols));
  EXPECT_EQ(format_report_json(cells), format_report_json(cells));
  EXPECT_NE(t.find("CER [%]"), std::string::npos);
  EXPECT_NE(t.find("--"), std::string::npos);
  EXPECT_NE(t.find("25.00"), std::string::npos);
  EXPECT_EQ(format_percent(0.11904), "11.90");
}
