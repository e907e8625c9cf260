#include "lpsynth/eval.hpp"

#include "detail/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_set>

namespace lpsynth {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    int len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
    char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
    bool ok = len > 0 && i + static_cast<std::size_t>(len) <= s.size();
    for (int k = 1; ok && k < len; ++k) {
      const auto c = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      ok = (c >> 6) == 0x2;
      cp = (cp << 6) | (c & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    ok = ok && cp >= kMin[len] && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1])});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) { return levenshtein(decode_utf8(a), decode_utf8(b)); }

double cer(std::string_view prediction, std::string_view label) {
  const auto l = decode_utf8(label);
  if (l.empty()) throw Error("CER of an empty label");
  return static_cast<double>(levenshtein(decode_utf8(prediction), l)) / static_cast<double>(l.size());
}

SampleScore score_sample(std::string id, std::string prediction, std::string label) {
  SampleScore s{std::move(id), std::move(prediction), std::move(label), 0, 0};
  const auto l = decode_utf8(s.label);
  if (l.empty()) throw Error("sample '" + s.id + "' has an empty label");
  s.label_chars = l.size();
  s.distance = levenshtein(decode_utf8(s.prediction), l);
  return s;
}

double miss_rate(std::span<const SampleScore> samples) {
  if (samples.empty()) throw Error("miss rate of an empty sample set");
  const auto n_false = std::count_if(samples.begin(), samples.end(), [](const SampleScore& s) { return !s.correct(); });
  return static_cast<double>(n_false) / static_cast<double>(samples.size());
}

EvalReport summarize(std::vector<SampleScore> samples) {
  if (samples.empty()) throw Error("cannot summarize an empty evaluation");
  EvalReport r;
  double cer_sum = 0.0;
  for (const auto& s : samples) {
    r.total_distance += s.distance;
    r.total_chars += s.label_chars;
    (s.correct() ? r.n_true : r.n_false) += 1;
    cer_sum += static_cast<double>(s.distance) / static_cast<double>(s.label_chars);
  }
  r.corpus_cer = static_cast<double>(r.total_distance) / static_cast<double>(r.total_chars);
  r.macro_cer = cer_sum / static_cast<double>(samples.size());
  r.mr = miss_rate(samples);
  r.per_sample = std::move(samples);
  return r;
}

std::vector<std::pair<std::string, std::string>> parse_predictions(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::unordered_set<std::string> seen;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw Error("predictions line " + std::to_string(i + 1) + ": expected <sample_id>\\t<prediction>");
    }
    std::string id(line.substr(0, tab));
    if (!seen.insert(id).second) throw Error("predictions: duplicate id '" + id + "'");
    out.emplace_back(std::move(id), std::string(line.substr(tab + 1)));
  }
  return out;
}

std::string format_predictions(std::span<const std::pair<std::string, std::string>> predictions) {
  std::string out;
  for (const auto& [id, p] : predictions) out += id + '\t' + p + '\n';
  return out;
}

EvalReport evaluate_run(std::span<const std::pair<std::string, std::string>> predictions,
                        const std::map<std::string, std::string, std::less<>>& labels, const DatasetSplit& split) {
  std::map<std::string_view, std::string_view> pred;
  const std::unordered_set<std::string_view> test(split.test.begin(), split.test.end());
  for (const auto& [id, p] : predictions) {
    if (!test.count(id)) throw Error("prediction for '" + id + "' which is not in the evaluated test split");
    if (!pred.emplace(id, p).second) throw Error("duplicate prediction for '" + id + "'");
  }
  std::vector<SampleScore> scores;
  scores.reserve(split.test.size());
  for (const auto& id : split.test) {
    const auto l = labels.find(id);
    if (l == labels.end()) throw Error("test sample '" + id + "' has no label");
    const auto p = pred.find(id);
    scores.push_back(score_sample(id, p == pred.end() ? std::string() : std::string(p->second), l->second));
  }
  return summarize(std::move(scores));
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

std::string format_report_table(std::span<const ReportCell> cells, std::span<const std::string> subset_columns) {
  std::vector<std::string> rows;
  for (const auto& c : cells) {
    if (std::find(rows.begin(), rows.end(), c.row) == rows.end()) rows.push_back(c.row);
  }
  std::size_t row_w = std::string("Training Set").size();
  for (const auto& r : rows) row_w = std::max(row_w, r.size());
  constexpr int kCol = 8;

  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  std::string out = pad("Training Set", row_w);
  for (const auto& s : subset_columns) out += " | " + pad(s, 2 * kCol + 1);
  out += "\n" + pad("", row_w);
  for (std::size_t i = 0; i < subset_columns.size(); ++i) out += " | " + pad("CER [%]", kCol) + " " + pad("MR [%]", kCol);
  out += "\n";
  for (const auto& r : rows) {
    out += pad(r, row_w);
    for (const auto& s : subset_columns) {
      const auto it = std::find_if(cells.begin(), cells.end(), [&](const ReportCell& c) { return c.row == r && c.subset == s; });
      const std::string cer_s = it == cells.end() ? "--" : format_percent(it->report.corpus_cer);
      const std::string mr_s = it == cells.end() ? "--" : format_percent(it->report.mr);
      out += " | " + pad(cer_s, kCol) + " " + pad(mr_s, kCol);
    }
    out += "\n";
  }
  return out;
}

std::string format_report_json(std::span<const ReportCell> cells) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json cj;
    cj["row"] = c.row;
    cj["subset"] = c.subset;
    cj["corpus_cer"] = c.report.corpus_cer;
    cj["macro_cer"] = c.report.macro_cer;
    cj["mr"] = c.report.mr;
    cj["n_true"] = c.report.n_true;
    cj["n_false"] = c.report.n_false;
    cj["total_distance"] = c.report.total_distance;
    cj["total_chars"] = c.report.total_chars;
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (const auto& s : c.report.per_sample) {
      samples.push_back({{"id", s.id}, {"prediction", s.prediction}, {"label", s.label}, {"distance", s.distance}});
    }
    cj["per_sample"] = samples;
    j.push_back(cj);
  }
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

}  // namespace lpsynth
