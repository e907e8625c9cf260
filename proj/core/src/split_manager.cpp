#include "lpsynth/split_manager.hpp"

#include "lpsynth/rng.hpp"

#include "detail/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace lpsynth {

namespace {

template <class T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_below(i)]);
  }
}

std::string with_thousands(std::size_t n) {
  std::string s = std::to_string(n);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

}  // namespace

DatasetSplit build_split(std::span<const SampleRecord> samples, DataType type, const SplitFractions& fr,
                         std::uint64_t seed) {
  if (!(fr.validation >= 0.0 && fr.test >= 0.0 && fr.validation + fr.test < 1.0)) {
    throw Error("split fractions must be non-negative and sum below 1");
  }
  SplitMix64 rng(seed);
  std::map<std::string, std::vector<std::string>> groups;
  std::unordered_set<std::string> ids;
  for (const auto& s : samples) {
    if (!ids.insert(s.id).second) throw Error("duplicate sample id '" + s.id + "'");
    groups[s.label].push_back(s.id);
  }
  std::vector<std::string> labels;
  for (const auto& [label, members] : groups) labels.push_back(label);
  shuffle(labels, rng);

  DatasetSplit split;
  split.data_type = type;
  split.seed = seed;
  const auto test_target = static_cast<std::size_t>(std::ceil(fr.test * static_cast<double>(samples.size())));
  std::vector<std::string> rest;
  for (const auto& label : labels) {
    auto& members = groups[label];
    auto& dst = split.test.size() < test_target ? split.test : rest;
    dst.insert(dst.end(), members.begin(), members.end());
  }
  shuffle(rest, rng);
  const auto n_val = static_cast<std::size_t>(std::llround(fr.validation * static_cast<double>(samples.size())));
  const std::size_t cut = std::min(n_val, rest.size());
  split.validation.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(cut));
  split.train.assign(rest.begin() + static_cast<std::ptrdiff_t>(cut), rest.end());
  return split;
}

std::size_t subset_size(std::size_t n, int percent) {
  if (percent < 0 || percent > 100) throw Error("subset percentage outside [0, 100]");
  const std::size_t k = static_cast<std::size_t>(percent);
  std::size_t q = n / 100 * k + (n % 100) * k / 100;
  const std::size_t r = (n % 100) * k % 100;
  if (r > 50 || (r == 50 && q % 2 == 1)) ++q;
  return q;
}

std::vector<DatasetSplit> build_subsets(const DatasetSplit& full, const SubsetSpec& spec, std::uint64_t seed) {
  for (int f : spec.fractions) {
    if (f <= 0 || f >= 100) throw Error("subset fraction " + std::to_string(f) + " outside (0, 100)");
  }
  if (spec.pinned_train_0 > full.train.size()) {
    throw Error("pinned subset 0 size " + std::to_string(spec.pinned_train_0) + " exceeds the full training split (" +
                std::to_string(full.train.size()) + ")");
  }
  if (spec.pinned_validation_0 && *spec.pinned_validation_0 > full.validation.size()) {
    throw Error("pinned subset 0 validation size exceeds the full validation split");
  }
  std::vector<int> fractions = spec.fractions;
  std::sort(fractions.begin(), fractions.end());
  fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());

  // Separate streams so the validation order does not depend on the train size.
  SplitMix64 train_rng(derive_seed(seed, 1));
  SplitMix64 val_rng(derive_seed(seed, 2));
  std::vector<std::string> train = full.train, val = full.validation;
  shuffle(train, train_rng);
  shuffle(val, val_rng);

  auto make = [&](int id, std::size_t n_train, std::size_t n_val) {
    DatasetSplit s;
    s.data_type = full.data_type;
    s.subset_id = id;
    s.seed = seed;
    s.train.assign(train.begin(), train.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.validation.assign(val.begin(), val.begin() + static_cast<std::ptrdiff_t>(n_val));
    s.test = full.test;
    return s;
  };
  std::vector<DatasetSplit> out;
  // Unpinned, subset 0 keeps the full split's validation-to-train proportion.
  std::size_t val0 = 0;
  if (spec.pinned_validation_0) {
    val0 = *spec.pinned_validation_0;
  } else if (!full.train.empty()) {
    val0 = static_cast<std::size_t>(std::llround(static_cast<double>(spec.pinned_train_0) *
                                                 static_cast<double>(full.validation.size()) /
                                                 static_cast<double>(full.train.size())));
  }
  out.push_back(make(0, spec.pinned_train_0, std::min(val0, full.validation.size())));
  for (int f : fractions) out.push_back(make(f, subset_size(full.train.size(), f), subset_size(full.validation.size(), f)));
  out.push_back(make(100, full.train.size(), full.validation.size()));
  return out;
}

SplitVerdict verify_split(const DatasetSplit& split, std::span<const SampleRecord> annotations) {
  SplitVerdict v;
  auto fail = [&](std::string msg) {
    v.valid = false;
    v.violations.push_back(std::move(msg));
  };
  std::unordered_map<std::string, std::string> label_of;
  for (const auto& a : annotations) label_of.emplace(a.id, a.label);

  std::unordered_map<std::string, const char*> owner;
  const std::pair<const char*, const std::vector<std::string>*> parts[] = {
      {"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}};
  for (const auto& [name, ids] : parts) {
    for (const auto& id : *ids) {
      const auto [it, inserted] = owner.emplace(id, name);
      if (!inserted) {
        fail(it->second == std::string_view(name) ? "duplicate id '" + id + "' in " + name
                                                  : "id '" + id + "' in both " + it->second + " and " + name);
      }
      if (!label_of.count(id)) fail("id '" + id + "' in " + name + " has no annotation");
    }
  }
  std::unordered_set<std::string> test_labels;
  for (const auto& id : split.test) {
    if (auto it = label_of.find(id); it != label_of.end()) test_labels.insert(it->second);
  }
  for (const auto& [name, ids] : parts) {
    if (ids == &split.test) continue;
    for (const auto& id : *ids) {
      auto it = label_of.find(id);
      if (it != label_of.end() && test_labels.count(it->second)) {
        fail("test label '" + it->second + "' also used by " + name + " sample '" + id + "'");
      }
    }
  }
  return v;
}

SplitVerdict verify_nesting(std::span<const DatasetSplit> subsets) {
  SplitVerdict v;
  for (std::size_t i = 0; i + 1 < subsets.size(); ++i) {
    const auto& a = subsets[i];
    const auto& b = subsets[i + 1];
    for (auto [small, large, what] : {std::tuple{&a.train, &b.train, "train"}, std::tuple{&a.validation, &b.validation, "validation"}}) {
      const std::unordered_set<std::string> big(large->begin(), large->end());
      const auto missing = std::count_if(small->begin(), small->end(), [&](const std::string& id) { return !big.count(id); });
      if (missing) {
        v.valid = false;
        v.violations.push_back(std::string(what) + " of subset " + std::to_string(a.subset_id.value_or(-1)) +
                               " not contained in subset " + std::to_string(b.subset_id.value_or(-1)) + " (" +
                               std::to_string(missing) + " ids)");
      }
    }
  }
  return v;
}

std::string format_ratio(std::size_t part, std::size_t whole, int decimals) {
  if (whole == 0) throw Error("ratio of an empty set");
  // Integer rounding, half away from zero, at the requested precision.
  unsigned long long scale = 100;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const unsigned long long num = static_cast<unsigned long long>(part) * scale;
  const unsigned long long q = (2 * num + whole) / (2 * whole);
  std::string digits = std::to_string(q);
  if (decimals == 0) return digits + "%";
  if (digits.size() <= static_cast<std::size_t>(decimals)) digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
  digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
  return digits + "%";
}

std::string format_split_table(std::span<const DatasetSplit> subsets) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %-6s %12s %12s %12s %12s\n", "type", "subset", "train", "validation", "test",
                "total");
  out += line;
  for (const auto& s : subsets) {
    const std::string subset = s.subset_id ? std::to_string(*s.subset_id) : "---";
    const std::size_t total = s.train.size() + s.validation.size() + s.test.size();
    std::snprintf(line, sizeof line, "%-12s %-6s %12s %12s %12s %12s\n", std::string(to_string(s.data_type)).c_str(),
                  subset.c_str(), with_thousands(s.train.size()).c_str(), with_thousands(s.validation.size()).c_str(),
                  with_thousands(s.test.size()).c_str(), with_thousands(total).c_str());
    out += line;
  }
  return out;
}

std::string format_membership(const DatasetSplit& s) {
  std::string out = "# seed=" + std::to_string(s.seed) + " type=" + std::string(to_string(s.data_type)) +
                    " subset=" + (s.subset_id ? std::to_string(*s.subset_id) : "none") +
                    " train=" + std::to_string(s.train.size()) + " validation=" + std::to_string(s.validation.size()) +
                    " test=" + std::to_string(s.test.size()) + "\n";
  for (auto [name, ids] : {std::pair{"[train]", &s.train}, std::pair{"[validation]", &s.validation},
                           std::pair{"[test]", &s.test}}) {
    out += name;
    out += '\n';
    for (const auto& id : *ids) {
      if (id.empty() || id.find_first_of(" \t\n[#") == 0 || id.find('\n') != std::string::npos) {
        throw Error("sample id '" + id + "' cannot be written to a membership file");
      }
      out += id;
      out += '\n';
    }
  }
  return out;
}

DatasetSplit parse_membership(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || !lines[0].starts_with("# ")) throw Error("membership file: missing header");
  DatasetSplit s;
  std::map<std::string, std::string, std::less<>> header;
  for (auto kv : detail::split_ws(lines[0].substr(2))) {
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw Error("membership header: malformed field '" + std::string(kv) + "'");
    header.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  auto field = [&](const char* key) {
    const auto it = header.find(key);
    if (it == header.end()) throw Error(std::string("membership header: missing ") + key);
    return it->second;
  };
  s.seed = detail::parse_int<std::uint64_t>(field("seed"));
  s.data_type = parse_data_type(field("type"));
  if (const auto sub = field("subset"); sub != "none") s.subset_id = detail::parse_int<int>(sub);

  std::vector<std::string>* current = nullptr;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty()) continue;
    if (line == "[train]") current = &s.train;
    else if (line == "[validation]") current = &s.validation;
    else if (line == "[test]") current = &s.test;
    else if (!current) throw Error("membership file: id before any section");
    else current->emplace_back(line);
  }
  if (s.train.size() != detail::parse_int<std::size_t>(field("train")) ||
      s.validation.size() != detail::parse_int<std::size_t>(field("validation")) ||
      s.test.size() != detail::parse_int<std::size_t>(field("test"))) {
    throw Error("membership file: counts disagree with header");
  }
  return s;
}

void write_membership(const std::filesystem::path& path, const DatasetSplit& split) {
  detail::write_text_file_atomic(path.string(), format_membership(split));
}

DatasetSplit read_membership(const std::filesystem::path& path) {
  return parse_membership(detail::read_text_file(path.string()));
}

}  // namespace lpsynth
