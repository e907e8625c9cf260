#include "lpsynth/split_manager.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

using namespace lpsynth;

namespace {

std::vector<SampleRecord> toy_corpus(int labels, int per_label) {
  std::vector<SampleRecord> out;
  for (int l = 0; l < labels; ++l) {
    for (int k = 0; k < per_label; ++k) {
      out.push_back({"s" + std::to_string(l) + "_" + std::to_string(k), "L-A" + std::to_string(l)});
    }
  }
  return out;
}

DatasetSplit stub(std::size_t train, std::size_t val, std::size_t test, DataType type = DataType::synthetic) {
  DatasetSplit s;
  s.data_type = type;
  for (std::size_t i = 0; i < train; ++i) s.train.push_back("t" + std::to_string(i));
  for (std::size_t i = 0; i < val; ++i) s.validation.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < test; ++i) s.test.push_back("x" + std::to_string(i));
  return s;
}

}  // namespace

TEST(SplitManager, PublishedRatios) {
  EXPECT_EQ(format_ratio(9040, 1576029), "0.6%");
  EXPECT_EQ(format_ratio(9040, 954927), "0.9%");
  EXPECT_EQ(format_ratio(9040, 1576029, 2), "0.57%");
  EXPECT_EQ(format_ratio(9040, 954927, 2), "0.95%");
}

TEST(SplitManager, SubsetSizeRoundsHalfEven) {
  EXPECT_EQ(subset_size(1576029, 25), 394007u);
  EXPECT_EQ(subset_size(1576029, 50), 788014u);
  EXPECT_EQ(subset_size(1576029, 75), 1182022u);
  EXPECT_EQ(subset_size(954927, 50), 477464u);
  EXPECT_EQ(subset_size(954927, 75), 716195u);
  EXPECT_EQ(subset_size(10, 25), 2u);   // 2.5 -> 2
  EXPECT_EQ(subset_size(14, 25), 4u);   // 3.5 -> 4
  EXPECT_EQ(subset_size(100, 100), 100u);
  EXPECT_EQ(subset_size(100, 0), 0u);
}

TEST(SplitManager, QuarterOfToySet) {
  const DatasetSplit full = stub(100, 20, 20);
  SubsetSpec spec;
  spec.fractions = {25};
  spec.pinned_train_0 = 10;
  const auto subsets = build_subsets(full, spec, 4);
  ASSERT_EQ(subsets.size(), 3u);
  EXPECT_EQ(*subsets[1].subset_id, 25);
  EXPECT_EQ(subsets[1].train.size(), 25u);
  const std::set<std::string> all(full.train.begin(), full.train.end());
  for (const auto& id : subsets[1].train) EXPECT_TRUE(all.count(id));
  EXPECT_EQ(std::set<std::string>(subsets[2].train.begin(), subsets[2].train.end()), all);
  EXPECT_EQ(subsets[0].test, full.test);
}

TEST(SplitManager, SubsetsNestAndAreDeterministic) {
  const DatasetSplit full = stub(5000, 600, 700);
  SubsetSpec spec;
  spec.pinned_train_0 = 300;
  const auto a = build_subsets(full, spec, 12);
  EXPECT_EQ(a, build_subsets(full, spec, 12));
  EXPECT_NE(a[1].train, build_subsets(full, spec, 13)[1].train);
  EXPECT_TRUE(verify_nesting(a).valid);
  auto broken = a;
  broken[2].train.back() = "t_outsider";
  EXPECT_FALSE(verify_nesting(broken).valid);
  EXPECT_EQ(a[0].train.size(), 300u);
  EXPECT_EQ(a[0].validation.size(), 36u);  // 300 * 600 / 5000
}

TEST(SplitManager, PinnedSubsetLargerThanFullIsAnError) {
  EXPECT_THROW(build_subsets(stub(100, 10, 10), {}, 1), Error);
}

TEST(SplitManager, BuildSplitKeepsLabelsTogether) {
  const auto corpus = toy_corpus(50, 4);
  const DatasetSplit s = build_split(corpus, DataType::partly_real, {0.1, 0.2}, 8);
  EXPECT_TRUE(verify_split(s, corpus).valid);
  EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), corpus.size());
  std::map<std::string, std::string> label;
  for (const auto& r : corpus) label[r.id] = r.label;
  std::set<std::string> test_labels;
  for (const auto& id : s.test) test_labels.insert(label[id]);
  EXPECT_EQ(s.test.size(), 4 * test_labels.size());
  EXPECT_EQ(s, build_split(corpus, DataType::partly_real, {0.1, 0.2}, 8));
}

TEST(SplitManager, VerifierCatchesViolations) {
  const auto corpus = toy_corpus(20, 3);
  const DatasetSplit good = build_split(corpus, DataType::synthetic, {}, 2);
  EXPECT_TRUE(verify_split(good, corpus).valid);

  DatasetSplit dup = good;
  dup.validation.push_back(dup.train.front());
  EXPECT_FALSE(verify_split(dup, corpus).valid);

  // Move one test sample into train: its label now appears on both sides.
  DatasetSplit leak = good;
  leak.train.push_back(leak.test.back());
  leak.test.pop_back();
  const auto v = verify_split(leak, corpus);
  EXPECT_FALSE(v.valid);
  EXPECT_FALSE(v.violations.empty());
}

TEST(SplitManager, MembershipRoundTrip) {
  const auto dir = std::filesystem::path(LPSYNTH_TEST_DIR);
  std::filesystem::create_directories(dir);
  DatasetSplit s = build_split(toy_corpus(10, 2), DataType::real, {}, 3);
  s.subset_id = 25;
  EXPECT_EQ(parse_membership(format_membership(s)), s);
  write_membership(dir / "membership.txt", s);
  EXPECT_EQ(read_membership(dir / "membership.txt"), s);
  EXPECT_THROW(parse_membership("[train]\na\n"), Error);
}

TEST(SplitManager, TableHasThousandsSeparators) {
  const auto subsets = build_subsets(stub(20000, 2000, 2100), {}, 1);
  const std::string t = format_split_table(subsets);
  EXPECT_NE(t.find("9,040"), std::string::npos);
  EXPECT_NE(t.find("20,000"), std::string::npos);
  EXPECT_NE(t.find("2,100"), std::string::npos);
}
