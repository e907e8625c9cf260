// lpsynth: command-line front end, one subcommand per pipeline stage.

#include "lpsynth/annotation_io.hpp"
#include "lpsynth/eval.hpp"
#include "lpsynth/ocr_prep.hpp"
#include "lpsynth/parallel.hpp"
#include "lpsynth/playback.hpp"
#include "lpsynth/rectifier.hpp"
#include "lpsynth/renderer.hpp"
#include "lpsynth/rng.hpp"
#include "lpsynth/run_manifest.hpp"
#include "lpsynth/split_manager.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace lpsynth;

namespace {

struct Failure : Error {
  Failure(std::string msg, nlohmann::json details = nlohmann::json::object())
      : Error(std::move(msg)), details(std::move(details)) {}
  nlohmann::json details;
};

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d.png", index);
  return buf;
}

std::vector<fs::path> png_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

GlyphAtlas load_atlas(const std::string& path) {
  return GlyphAtlas::load(path.empty() ? default_glyph_atlas_path() : fs::path(path));
}

PlaybackLayout load_layout_or_default(const std::string& path) {
  if (path.empty()) return PlaybackLayout{};
  return load_layout(path);
}

// Common run bookkeeping: start time at construction, manifest on finish().
struct Run {
  RunManifest manifest;
  explicit Run(std::string command, std::string out_dir) {
    manifest.command = std::move(command);
    manifest.output_dir = std::move(out_dir);
    manifest.started_at = utc_timestamp(std::chrono::system_clock::now());
  }
  void finish() {
    manifest.finished_at = utc_timestamp(std::chrono::system_clock::now());
    write_run_manifest(manifest.output_dir, manifest);
  }
};

// gen-configs -------------------------------------------------------------

struct GenConfigsArgs {
  std::uint64_t seed = 0;
  int count = 1;
  std::string out;
  std::string presets;
  int width = 640, height = 360, length = 50;
  double depth_min = 3.0, depth_max = 15.0, curvature = 0.1;
};

void gen_configs(const GenConfigsArgs& a) {
  Run run("gen-configs", a.out);
  const PresetBank bank = a.presets.empty() ? default_preset_bank() : load_preset_bank(a.presets);
  ConfigOptions opt;
  opt.resolution = {a.width, a.height};
  opt.scene_length = a.length;
  opt.depth = {a.depth_min, a.depth_max};
  opt.trajectory_curvature = a.curvature;
  if (!a.presets.empty()) run.manifest.inputs.push_back(a.presets);
  run.manifest.seeds.push_back(a.seed);
  fs::create_directories(a.out);
  for (int i = 0; i < a.count; ++i) {
    const SceneConfig c = generate_config(derive_seed(a.seed, static_cast<std::uint64_t>(i)), bank, opt);
    save_config(fs::path(a.out) / (c.sequence_id + ".cfg"), c);
  }
  run.manifest.summary.emplace_back("configs", std::to_string(a.count));
  run.finish();
}

// render ------------------------------------------------------------------

struct RenderArgs {
  std::vector<std::string> configs;
  std::string out;
  std::string atlas;
  double texels_per_mm = 4.0;
  bool no_dof = false;
  int jobs = 1;
};

void render(const RenderArgs& a) {
  Run run("render", a.out);
  const GlyphAtlas atlas = load_atlas(a.atlas);
  RenderOptions opt;
  opt.plate_texels_per_mm = a.texels_per_mm;
  opt.depth_of_field = !a.no_dof;

  std::vector<fs::path> configs;
  for (const auto& c : a.configs) {
    if (fs::is_directory(c)) {
      for (auto& p : files_with_extension(c, ".cfg")) configs.push_back(p);
    } else {
      configs.emplace_back(c);
    }
  }
  if (configs.empty()) throw Error("render: no config files given");
  std::size_t frames = 0;
  for (const auto& path : configs) {
    const SceneConfig cfg = load_config(path);
    run.manifest.inputs.push_back(path.string());
    run.manifest.seeds.push_back(cfg.master_seed);
    const SceneRenderer renderer(cfg, atlas, opt);
    SequenceAnnotation seq = renderer.sequence_header();
    seq.frames.resize(static_cast<std::size_t>(cfg.scene_length));
    const fs::path dir = fs::path(a.out) / cfg.sequence_id;
    fs::create_directories(dir);
    parallel_for(seq.frames.size(), a.jobs, [&](std::size_t i) {
      RenderedFrame f = renderer.render(static_cast<int>(i));
      write_png(dir / frame_name(static_cast<int>(i)), f.pixels);
      seq.frames[i] = std::move(f.annotation);
    });
    write_annotation(a.out, seq);
    frames += seq.frames.size();
  }
  run.manifest.summary.emplace_back("sequences", std::to_string(configs.size()));
  run.manifest.summary.emplace_back("frames", std::to_string(frames));
  run.finish();
}

// compose-playback --------------------------------------------------------

struct ComposeArgs {
  std::vector<std::string> annotations;
  std::string out;
  std::string layout;
  std::string atlas;
  int jobs = 1;
};

void compose(const ComposeArgs& a) {
  Run run("compose-playback", a.out);
  const GlyphAtlas atlas = load_atlas(a.atlas);
  const PlaybackLayout layout = load_layout_or_default(a.layout);
  if (!a.layout.empty()) run.manifest.inputs.push_back(a.layout);
  std::size_t frames = 0;
  for (const auto& xml : a.annotations) {
    const SequenceAnnotation seq = read_annotation(xml);
    run.manifest.inputs.push_back(xml);
    const fs::path src = fs::path(xml).parent_path() / seq.sequence_id;
    const fs::path dst = fs::path(a.out) / seq.sequence_id;
    fs::create_directories(dst);
    parallel_for(seq.frames.size(), a.jobs, [&](std::size_t i) {
      const FrameAnnotation& f = seq.frames[i];
      const Image img = read_png(src / frame_name(f.frame_index));
      write_png(dst / frame_name(f.frame_index), compose_playback_frame(img, f.frame_index, f.label, layout, atlas));
    });
    frames += seq.frames.size();
  }
  save_layout(fs::path(a.out) / "layout.json", layout);
  run.manifest.summary.emplace_back("frames", std::to_string(frames));
  run.finish();
}

// rectify -----------------------------------------------------------------

struct RectifyArgs {
  std::string recorded;
  std::string annotation;
  std::string out;
  std::string layout;
  std::string sequence_id;
  int jobs = 1;
};

void rectify_cmd(const RectifyArgs& a) {
  Run run("rectify", a.out);
  const PlaybackLayout layout = load_layout_or_default(a.layout);
  const SequenceAnnotation source = read_annotation(a.annotation);
  run.manifest.inputs = {a.recorded, a.annotation};
  if (!a.layout.empty()) run.manifest.inputs.push_back(a.layout);
  const auto files = png_files(a.recorded);

  ProcessOptions opt;
  opt.sequence_id = a.sequence_id;
  opt.jobs = a.jobs;
  const std::string id = a.sequence_id.empty() ? source.sequence_id + "_pr" : a.sequence_id;
  const fs::path dir = fs::path(a.out) / id;
  fs::create_directories(dir);
  const ProcessedSequence result = process_recorded_sequence(
      static_cast<int>(files.size()), [&](int i) { return read_png(files[static_cast<std::size_t>(i)]); }, source,
      layout, [&](int i, const Image& img) { write_png(dir / frame_name(i), img); }, opt);

  write_annotation(a.out, result.annotation);
  write_text(fs::path(a.out) / (id + ".skip.log"), result.skip_log());
  const int ok = result.ok_count();
  const int skipped = static_cast<int>(files.size()) - ok;
  run.manifest.summary.emplace_back("frames", std::to_string(files.size()));
  run.manifest.summary.emplace_back("ok", std::to_string(ok));
  run.manifest.summary.emplace_back("skipped", std::to_string(skipped));
  run.finish();
  std::cout << nlohmann::json{{"sequence_id", id}, {"frames", files.size()}, {"ok", ok}, {"skipped", skipped}}.dump()
            << "\n";
  if (ok == 0) {
    throw Failure("rectify: no frame could be rectified", {{"frames", files.size()}, {"skipped", skipped}});
  }
}

// prep --------------------------------------------------------------------

struct PrepArgs {
  std::vector<std::string> annotations;
  std::string out;
  int height = kOcrHeight;
  bool keep_occluded = false;
  int jobs = 1;
};

void prep(const PrepArgs& a) {
  Run run("prep", a.out);
  PrepOptions opt;
  opt.out_height = a.height;
  opt.keep_occluded = a.keep_occluded;
  const fs::path images = fs::path(a.out) / "images";
  fs::create_directories(images);
  std::vector<ManifestEntry> manifest;
  std::size_t skipped = 0;
  for (const auto& xml : a.annotations) {
    const SequenceAnnotation seq = read_annotation(xml);
    run.manifest.inputs.push_back(xml);
    const fs::path frames = fs::path(xml).parent_path() / seq.sequence_id;
    std::vector<std::optional<ManifestEntry>> entries(seq.frames.size());
    parallel_for(seq.frames.size(), a.jobs, [&](std::size_t i) {
      const FrameAnnotation& f = seq.frames[i];
      if (f.bbox.empty() || (f.occluded && !opt.keep_occluded)) return;
      const auto s = prep_frame(read_png(frames / frame_name(f.frame_index)), f, seq, opt);
      if (!s) return;
      const std::string rel = "images/" + s->sample_id + ".png";
      write_png(fs::path(a.out) / rel, s->image);
      entries[i] = ManifestEntry{s->sample_id, rel, s->label, s->provenance, s->sequence_id, s->frame_index};
    });
    for (auto& e : entries) {
      if (e) manifest.push_back(std::move(*e));
      else ++skipped;
    }
  }
  write_text(fs::path(a.out) / "manifest.tsv", format_manifest(manifest));
  run.manifest.summary.emplace_back("samples", std::to_string(manifest.size()));
  run.manifest.summary.emplace_back("skipped", std::to_string(skipped));
  run.finish();
}

// split -------------------------------------------------------------------

struct SplitArgs {
  std::vector<std::string> manifests;
  std::vector<std::size_t> virtual_counts;
  std::string out;
  std::string type;
  std::uint64_t seed = 0;
  double validation = 0.1, test = 0.1;
  bool subsets = false;
  std::size_t pinned = 9040;
  std::optional<std::size_t> pinned_validation;
};

void split(const SplitArgs& a) {
  Run run("split", a.out);
  run.manifest.seeds.push_back(a.seed);
  DatasetSplit full;
  if (!a.virtual_counts.empty()) {
    // Bookkeeping only: stub ids, no images or labels behind them.
    if (a.virtual_counts.size() != 3) throw Error("split: --virtual needs train,validation,test counts");
    full.data_type = a.type.empty() ? DataType::synthetic : parse_data_type(a.type);
    full.seed = a.seed;
    auto fill = [](std::vector<std::string>& v, const char* prefix, std::size_t n) {
      v.reserve(n);
      for (std::size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
    };
    fill(full.train, "t", a.virtual_counts[0]);
    fill(full.validation, "v", a.virtual_counts[1]);
    fill(full.test, "x", a.virtual_counts[2]);
  } else {
    std::vector<SampleRecord> records;
    std::optional<DataType> type;
    for (const auto& m : a.manifests) {
      run.manifest.inputs.push_back(m);
      for (const auto& e : read_manifest(m)) {
        records.push_back({e.sample_id, e.label});
        if (!type) type = e.provenance;
      }
    }
    if (records.empty()) throw Error("split: no samples");
    full = build_split(records, a.type.empty() ? type.value_or(DataType::synthetic) : parse_data_type(a.type),
                       {a.validation, a.test}, a.seed);
    const auto verdict = verify_split(full, records);
    if (!verdict.valid) throw Failure("split: verification failed", {{"violations", verdict.violations}});
  }
  fs::create_directories(a.out);
  std::vector<DatasetSplit> table{full};
  write_membership(fs::path(a.out) / "split_full.txt", full);
  if (a.subsets) {
    SubsetSpec spec;
    spec.pinned_train_0 = a.pinned;
    spec.pinned_validation_0 = a.pinned_validation;
    table = build_subsets(full, spec, a.seed);
    const auto nest = verify_nesting(table);
    if (!nest.valid) throw Failure("split: subsets do not nest", {{"violations", nest.violations}});
    for (const auto& s : table) {
      write_membership(fs::path(a.out) / ("split_subset_" + std::to_string(*s.subset_id) + ".txt"), s);
    }
    const auto& s0 = table.front();
    run.manifest.summary.emplace_back("subset0_ratio", format_ratio(s0.train.size(), full.train.size()));
  }
  const std::string text = format_split_table(table);
  write_text(fs::path(a.out) / "split_table.txt", text);
  std::cout << text;
  run.manifest.summary.emplace_back("train", std::to_string(full.train.size()));
  run.manifest.summary.emplace_back("validation", std::to_string(full.validation.size()));
  run.manifest.summary.emplace_back("test", std::to_string(full.test.size()));
  run.finish();
}

// evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string predictions;
  std::vector<std::string> manifests;
  std::string split;
  std::string out;
  std::string row = "Model";
  std::string subset = "100";
};

void evaluate(const EvaluateArgs& a) {
  Run run("evaluate", a.out);
  run.manifest.inputs.push_back(a.predictions);
  run.manifest.inputs.push_back(a.split);
  std::map<std::string, std::string, std::less<>> labels;
  for (const auto& m : a.manifests) {
    run.manifest.inputs.push_back(m);
    for (const auto& e : read_manifest(m)) labels[e.sample_id] = e.label;
  }
  const DatasetSplit split = read_membership(a.split);
  const auto predictions = parse_predictions(read_text(a.predictions));
  const std::vector<ReportCell> cells{{a.row, a.subset, evaluate_run(predictions, labels, split)}};
  const std::vector<std::string> columns{a.subset};
  const std::string table = format_report_table(cells, columns);
  write_text(fs::path(a.out) / "report.txt", table);
  write_text(fs::path(a.out) / "report.json", format_report_json(cells));
  std::cout << table;
  const EvalReport& r = cells.front().report;
  run.manifest.summary.emplace_back("corpus_cer", format_percent(r.corpus_cer));
  run.manifest.summary.emplace_back("macro_cer", format_percent(r.macro_cer));
  run.manifest.summary.emplace_back("mr", format_percent(r.mr));
  run.finish();
}

// print-master ------------------------------------------------------------

struct PrintMasterArgs {
  std::string label;
  double dpi = 300.0;
  std::string out;
  std::string atlas;
};

void print_master(const PrintMasterArgs& a) {
  const auto plate = parse_label(a.label);
  if (!plate) throw Error("print-master: '" + a.label + "' is not a valid plate label");
  const fs::path out(a.out);
  const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  Run run("print-master", dir.string());
  const Image img = render_print_master(*plate, load_atlas(a.atlas), a.dpi);
  write_png(out, img, PngInfo{a.dpi});
  run.manifest.summary.emplace_back("size", std::to_string(img.width) + "x" + std::to_string(img.height));
  run.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic license-plate dataset toolchain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));

  GenConfigsArgs gc;
  auto* c_gen = app.add_subcommand("gen-configs", "Write deterministic scene configs");
  c_gen->add_option("--seed", gc.seed, "Batch seed")->required();
  c_gen->add_option("--count", gc.count, "Number of sequences")->check(CLI::PositiveNumber);
  c_gen->add_option("-o,--out", gc.out, "Output directory")->required();
  c_gen->add_option("--presets", gc.presets, "Preset bank JSON (default: built-in bank)");
  c_gen->add_option("--width", gc.width)->check(CLI::PositiveNumber);
  c_gen->add_option("--height", gc.height)->check(CLI::PositiveNumber);
  c_gen->add_option("--length", gc.length, "Frames per sequence")->check(CLI::PositiveNumber);
  c_gen->add_option("--depth-min", gc.depth_min, "Nearest plate depth, m");
  c_gen->add_option("--depth-max", gc.depth_max, "Farthest plate depth, m");
  c_gen->add_option("--curvature", gc.curvature, "Trajectory bend, 0 = straight");

  RenderArgs rd;
  auto* c_render = app.add_subcommand("render", "Render configs to PNG frames and XML annotations");
  c_render->add_option("configs", rd.configs, "Config files or directories")->required();
  c_render->add_option("-o,--out", rd.out, "Output directory")->required();
  c_render->add_option("--atlas", rd.atlas, "Glyph atlas");
  c_render->add_option("--texels-per-mm", rd.texels_per_mm, "Plate texture density");
  c_render->add_flag("--no-dof", rd.no_dof, "Disable depth-of-field blur");
  c_render->add_option("-j,--jobs", rd.jobs)->check(CLI::PositiveNumber);

  ComposeArgs cp;
  auto* c_compose = app.add_subcommand("compose-playback", "Embed 1920x1080 frames into the playback canvas");
  c_compose->add_option("annotations", cp.annotations, "Sequence XML files")->required();
  c_compose->add_option("-o,--out", cp.out, "Output directory")->required();
  c_compose->add_option("--layout", cp.layout, "Layout JSON (default: built-in layout)");
  c_compose->add_option("--atlas", cp.atlas, "Glyph atlas");
  c_compose->add_option("-j,--jobs", cp.jobs)->check(CLI::PositiveNumber);

  RectifyArgs rc;
  auto* c_rect = app.add_subcommand("rectify", "Rectify recorded playback frames and transfer annotations");
  c_rect->add_option("--recorded", rc.recorded, "Directory of recorded PNG frames")->required();
  c_rect->add_option("--annotation", rc.annotation, "Source sequence XML")->required();
  c_rect->add_option("-o,--out", rc.out, "Output directory")->required();
  c_rect->add_option("--layout", rc.layout, "Layout JSON (default: built-in layout)");
  c_rect->add_option("--sequence-id", rc.sequence_id, "Id of the partly-real sequence");
  c_rect->add_option("-j,--jobs", rc.jobs)->check(CLI::PositiveNumber);

  PrepArgs pp;
  auto* c_prep = app.add_subcommand("prep", "Deskew and crop annotated plates for OCR");
  c_prep->add_option("annotations", pp.annotations, "Sequence XML files (frames in the sibling directory)")->required();
  c_prep->add_option("-o,--out", pp.out, "Output directory")->required();
  c_prep->add_option("--height", pp.height, "Output height in pixels")->check(CLI::PositiveNumber);
  c_prep->add_flag("--keep-occluded", pp.keep_occluded, "Also emit frames flagged as occluded");
  c_prep->add_option("-j,--jobs", pp.jobs)->check(CLI::PositiveNumber);

  SplitArgs sp;
  std::size_t pinned_validation = 0;
  auto* c_split = app.add_subcommand("split", "Build train/validation/test splits and nested subsets");
  auto* o_manifest = c_split->add_option("--manifest", sp.manifests, "Sample manifests from prep");
  auto* o_virtual = c_split->add_option("--virtual", sp.virtual_counts, "Stub split of train,validation,test ids")
                        ->delimiter(',')->expected(3);
  o_manifest->excludes(o_virtual);
  c_split->add_option("-o,--out", sp.out, "Output directory")->required();
  c_split->add_option("--seed", sp.seed)->required();
  c_split->add_option("--type", sp.type, "synthetic, partly_real or real");
  c_split->add_option("--validation", sp.validation, "Validation fraction");
  c_split->add_option("--test", sp.test, "Test fraction");
  c_split->add_flag("--subsets", sp.subsets, "Also build subsets 0/25/50/75/100");
  c_split->add_option("--pinned", sp.pinned, "Subset 0 training size");
  auto* o_pv = c_split->add_option("--pinned-validation", pinned_validation, "Subset 0 validation size");

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Score OCR predictions (CER, MR)");
  c_eval->add_option("--predictions", ev.predictions, "<sample_id>\\t<prediction> per line")->required();
  c_eval->add_option("--manifest", ev.manifests, "Sample manifests holding the labels")->required();
  c_eval->add_option("--split", ev.split, "Membership file; its test ids are scored")->required();
  c_eval->add_option("-o,--out", ev.out, "Output directory")->required();
  c_eval->add_option("--row", ev.row, "Row name in the report table");
  c_eval->add_option("--subset", ev.subset, "Column group in the report table");

  PrintMasterArgs pm;
  auto* c_print = app.add_subcommand("print-master", "Frontal plate image at print resolution");
  c_print->add_option("--label", pm.label, "Plate label, e.g. ER-K1234")->required();
  c_print->add_option("--dpi", pm.dpi)->check(CLI::PositiveNumber);
  c_print->add_option("-o,--out", pm.out, "Output PNG")->required();
  c_print->add_option("--atlas", pm.atlas, "Glyph atlas");

  std::string command;
  try {
    app.parse(argc, argv);
    command = app.get_subcommands().front()->get_name();
    if (o_pv->count()) sp.pinned_validation = pinned_validation;
    if (*c_gen) gen_configs(gc);
    else if (*c_render) render(rd);
    else if (*c_compose) compose(cp);
    else if (*c_rect) rectify_cmd(rc);
    else if (*c_prep) prep(pp);
    else if (*c_split) split(sp);
    else if (*c_eval) evaluate(ev);
    else if (*c_print) print_master(pm);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Failure& e) {
    nlohmann::json j{{"status", "error"}, {"command", command}, {"message", e.what()}};
    j.update(e.details);
    std::cerr << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"status", "error"}, {"command", command}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
