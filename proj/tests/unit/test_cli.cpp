#include "lpsynth/annotation_io.hpp"
#include "lpsynth/image.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(LPSYNTH_TEST_DIR) / "cli";

int cli(const std::string& args, const fs::path& stderr_path = "/dev/null") {
  const std::string cmd = std::string(LPSYNTH_CLI) + " " + args + " > /dev/null 2> '" + stderr_path.string() + "'";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<fs::path> listing(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Cli, GenConfigsIsDeterministic) {
  fs::remove_all(kWork / "gen");
  ASSERT_EQ(cli("gen-configs --seed 1 --count 3 -o '" + (kWork / "gen/a").string() + "'"), 0);
  ASSERT_EQ(cli("gen-configs --seed 1 --count 3 -o '" + (kWork / "gen/b").string() + "'"), 0);
  const auto files = listing(kWork / "gen/a");
  ASSERT_EQ(files, listing(kWork / "gen/b"));
  int configs = 0;
  for (const auto& f : files) {
    if (f.extension() != ".cfg") continue;
    ++configs;
    EXPECT_EQ(slurp(kWork / "gen/a" / f), slurp(kWork / "gen/b" / f)) << f;
  }
  EXPECT_EQ(configs, 3);
  EXPECT_TRUE(fs::exists(kWork / "gen/a/run_manifest.json"));
}

TEST(Cli, RenderOneFrame) {
  fs::remove_all(kWork / "one");
  ASSERT_EQ(cli("gen-configs --seed 2 --count 1 --length 1 -o '" + (kWork / "one/cfg").string() + "'"), 0);
  ASSERT_EQ(cli("render '" + (kWork / "one/cfg").string() + "' -o '" + (kWork / "one/out").string() + "'"), 0);
  int png = 0, xml = 0;
  for (const auto& f : listing(kWork / "one/out")) {
    png += f.extension() == ".png";
    xml += f.extension() == ".xml";
  }
  EXPECT_EQ(png, 1);
  EXPECT_EQ(xml, 1);
  for (const auto& f : listing(kWork / "one/out")) {
    if (f.extension() != ".xml") continue;
    const auto seq = lpsynth::read_annotation(kWork / "one/out" / f);
    ASSERT_EQ(seq.frames.size(), 1u);
    const auto img = lpsynth::read_png(kWork / "one/out" / seq.sequence_id / "frame_000000.png");
    EXPECT_EQ(img.width, 640);
    EXPECT_EQ(img.height, 360);
  }
}

TEST(Cli, ErrorsAreJsonOnStderr) {
  fs::create_directories(kWork);
  const fs::path err = kWork / "stderr.txt";
  EXPECT_NE(cli("print-master --label 'not a plate' -o '" + (kWork / "x.png").string() + "'", err), 0);
  const auto j = nlohmann::json::parse(slurp(err));
  EXPECT_EQ(j["status"], "error");
  EXPECT_EQ(j["command"], "print-master");
  EXPECT_FALSE(j["message"].get<std::string>().empty());
}

TEST(Cli, PrintMasterCarriesDensity) {
  fs::create_directories(kWork);
  ASSERT_EQ(cli("print-master --label ER-K1234 --dpi 150 -o '" + (kWork / "master.png").string() + "'"), 0);
  lpsynth::PngInfo info;
  const auto img = lpsynth::read_png(kWork / "master.png", &info);
  EXPECT_EQ(img.width, 3071);
  EXPECT_EQ(img.height, 650);
  ASSERT_TRUE(info.dots_per_inch);
  // PNG stores whole pixels per metre: half a unit is 0.0127 dpi.
  EXPECT_NEAR(*info.dots_per_inch, 150.0, 0.5 * 0.0254);
}

TEST(Cli, SplitVirtualPrintsTable) {
  fs::remove_all(kWork / "split");
  ASSERT_EQ(cli("split --virtual 954927,106104,118238 --type partly_real --subsets --seed 1 -o '" +
                (kWork / "split").string() + "'"),
            0);
  const std::string table = slurp(kWork / "split/split_table.txt");
  for (const char* n : {"9,040", "238,732", "477,464", "716,195", "954,927", "26,526", "53,052", "79,578", "106,104",
                        "118,238"}) {
    EXPECT_NE(table.find(n), std::string::npos) << n;
  }
  const auto manifest = nlohmann::json::parse(slurp(kWork / "split/run_manifest.json"));
  EXPECT_EQ(manifest["summary"]["subset0_ratio"], "0.9%");
}
