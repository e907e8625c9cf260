#include "lpsynth/annotation_io.hpp"

#include "detail/text.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include <set>
#include <sstream>

namespace lpsynth {

namespace pt = boost::property_tree;
using detail::format_double;

namespace {

constexpr const char* kAttr = "<xmlattr>";

std::string vec_text(const double* v, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

template <int N>
Eigen::Matrix<double, N, 1> parse_vec(const std::string& text, const std::string& what) {
  const auto parts = detail::split_ws(text);
  if (parts.size() != N) throw AnnotationError(what + ": expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = detail::parse_double(parts[i]);
  return v;
}

std::string sides_text(const OcclusionSides& s) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ' ';
    out += name;
  };
  add(s.left, "left");
  add(s.right, "right");
  add(s.top, "top");
  add(s.bottom, "bottom");
  return out;
}

OcclusionSides parse_sides(const std::string& text) {
  OcclusionSides s;
  for (auto part : detail::split_ws(text)) {
    bool* flag = part == "left" ? &s.left : part == "right" ? &s.right : part == "top" ? &s.top
                 : part == "bottom" ? &s.bottom : nullptr;
    if (!flag) throw AnnotationError("unknown occlusion side '" + std::string(part) + "'");
    if (*flag) throw AnnotationError("occlusion side listed twice");
    *flag = true;
  }
  return s;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw AnnotationError("expected true/false, got '" + s + "'");
}

// Strict accessors: every node may only carry the listed children/attributes.
void expect_keys(const pt::ptree& node, std::initializer_list<const char*> allowed, const std::string& where,
                 bool text = false) {
  std::set<std::string> seen;
  for (const auto& [key, child] : node) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw AnnotationError(where + ": unexpected element '" + key + "'");
  }
  if (!text && !detail::trim(node.data()).empty()) throw AnnotationError(where + ": unexpected text content");
}

void expect_attrs(const pt::ptree& node, std::initializer_list<const char*> allowed, const std::string& where) {
  const auto attrs = node.get_child_optional(kAttr);
  if (!attrs) return;
  for (const auto& [key, child] : *attrs) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw AnnotationError(where + ": unexpected attribute '" + key + "'");
  }
}

std::string attr(const pt::ptree& node, const char* name, const std::string& where) {
  const auto v = node.get_optional<std::string>(std::string(kAttr) + "." + name);
  if (!v) throw AnnotationError(where + ": missing attribute '" + name + "'");
  return *v;
}

std::optional<std::string> opt_attr(const pt::ptree& node, const char* name) {
  const auto v = node.get_optional<std::string>(std::string(kAttr) + "." + name);
  return v ? std::optional<std::string>(*v) : std::nullopt;
}

const pt::ptree& only_child(const pt::ptree& node, const char* name, const std::string& where) {
  if (node.count(name) != 1) throw AnnotationError(where + ": expected exactly one <" + name + ">");
  return node.get_child(name);
}

template <class Int>
Int int_attr(const pt::ptree& node, const char* name, const std::string& where) {
  try {
    return detail::parse_int<Int>(attr(node, name, where));
  } catch (const AnnotationError&) {
    throw;
  } catch (const Error& e) {
    throw AnnotationError(where + ": " + e.what());
  }
}

pt::ptree camera_node(const CameraPreset& c) {
  pt::ptree n;
  n.put("<xmlattr>.id", c.id);
  n.put("<xmlattr>.position", vec_text(c.position.data(), 3));
  n.put("<xmlattr>.tilt", vec_text(c.tilt.data(), 3));
  n.put("<xmlattr>.sensor_size_mm", vec_text(c.sensor_size_mm.data(), 2));
  n.put("<xmlattr>.focal_length_mm", format_double(c.focal_length_mm));
  n.put("<xmlattr>.f_number", format_double(c.f_number));
  n.put("<xmlattr>.native_resolution", std::to_string(c.native_width) + " " + std::to_string(c.native_height));
  return n;
}

CameraPreset parse_camera(const pt::ptree& n) {
  const std::string w = "camera";
  expect_keys(n, {kAttr}, w);
  expect_attrs(n, {"id", "position", "tilt", "sensor_size_mm", "focal_length_mm", "f_number", "native_resolution"}, w);
  CameraPreset c;
  c.id = attr(n, "id", w);
  c.position = parse_vec<3>(attr(n, "position", w), w);
  c.tilt = parse_vec<3>(attr(n, "tilt", w), w);
  c.sensor_size_mm = parse_vec<2>(attr(n, "sensor_size_mm", w), w);
  c.focal_length_mm = detail::parse_double(attr(n, "focal_length_mm", w));
  c.f_number = detail::parse_double(attr(n, "f_number", w));
  const auto res = parse_vec<2>(attr(n, "native_resolution", w), w);
  c.native_width = static_cast<int>(res[0]);
  c.native_height = static_cast<int>(res[1]);
  validate(c);
  return c;
}

pt::ptree light_node(const LightPreset& l) {
  pt::ptree n;
  n.put("<xmlattr>.id", l.id);
  n.put("<xmlattr>.kind", std::string(to_string(l.kind)));
  n.put("<xmlattr>.position", vec_text(l.position.data(), 3));
  n.put("<xmlattr>.direction", vec_text(l.direction.data(), 3));
  n.put("<xmlattr>.intensity", format_double(l.intensity));
  n.put("<xmlattr>.beamwidth", format_double(l.beamwidth));
  return n;
}

LightPreset parse_light(const pt::ptree& n) {
  const std::string w = "light";
  expect_keys(n, {kAttr}, w);
  expect_attrs(n, {"id", "kind", "position", "direction", "intensity", "beamwidth"}, w);
  LightPreset l;
  l.id = attr(n, "id", w);
  l.kind = parse_light_kind(attr(n, "kind", w));
  l.position = parse_vec<3>(attr(n, "position", w), w);
  l.direction = parse_vec<3>(attr(n, "direction", w), w);
  l.intensity = detail::parse_double(attr(n, "intensity", w));
  l.beamwidth = detail::parse_double(attr(n, "beamwidth", w));
  validate(l);
  return l;
}

FrameAnnotation parse_frame(const pt::ptree& n) {
  std::string w = "frame";
  expect_keys(n, {kAttr, "bbox", "corners"}, w);
  expect_attrs(n, {"index", "label", "occluded", "occlusion", "source_frame"}, w);
  FrameAnnotation f;
  f.frame_index = int_attr<int>(n, "index", w);
  w = "frame " + std::to_string(f.frame_index);
  f.label = attr(n, "label", w);
  f.occluded = parse_bool(attr(n, "occluded", w));
  f.sides = parse_sides(opt_attr(n, "occlusion").value_or(""));
  if (const auto sf = opt_attr(n, "source_frame")) f.source_frame = detail::parse_int<int>(*sf);

  const pt::ptree& b = only_child(n, "bbox", w);
  expect_keys(b, {kAttr}, w + " bbox");
  expect_attrs(b, {"x", "y", "w", "h"}, w + " bbox");
  f.bbox = {int_attr<int>(b, "x", w), int_attr<int>(b, "y", w), int_attr<int>(b, "w", w), int_attr<int>(b, "h", w)};

  if (n.count("corners") > 1) throw AnnotationError(w + ": more than one <corners>");
  if (const auto c = n.get_child_optional("corners")) {
    expect_keys(*c, {}, w + " corners", true);
    const auto v = detail::split_ws(c->data());
    if (v.size() != 8) throw AnnotationError(w + ": corners need 8 numbers");
    Quad q;
    for (int i = 0; i < 4; ++i) q[i] = {detail::parse_double(v[2 * i]), detail::parse_double(v[2 * i + 1])};
    f.corners = q;
  }
  return f;
}

}  // namespace

std::string annotation_to_xml(const SequenceAnnotation& seq) {
  check_invariants(seq);
  pt::ptree root;
  pt::ptree& s = root.add_child("sequence", pt::ptree());
  s.put("<xmlattr>.schema_version", seq.schema_version);
  s.put("<xmlattr>.id", seq.sequence_id);
  s.put("<xmlattr>.data_type", std::string(to_string(seq.data_type)));
  s.put("render_engine", seq.render_engine);
  pt::ptree& res = s.add_child("resolution", pt::ptree());
  res.put("<xmlattr>.width", seq.resolution.width);
  res.put("<xmlattr>.height", seq.resolution.height);
  if (seq.camera) s.add_child("camera", camera_node(*seq.camera));
  if (seq.light) s.add_child("light", light_node(*seq.light));
  pt::ptree& params = s.add_child("parameters", pt::ptree());
  for (const auto& [name, value] : seq.parameters) {
    pt::ptree& p = params.add_child("param", pt::ptree());
    p.put("<xmlattr>.name", name);
    p.put("<xmlattr>.value", value);
  }
  pt::ptree& frames = s.add_child("frames", pt::ptree());
  for (const auto& f : seq.frames) {
    pt::ptree& fn = frames.add_child("frame", pt::ptree());
    fn.put("<xmlattr>.index", f.frame_index);
    fn.put("<xmlattr>.label", f.label);
    fn.put("<xmlattr>.occluded", f.occluded ? "true" : "false");
    if (f.sides.any()) fn.put("<xmlattr>.occlusion", sides_text(f.sides));
    if (f.source_frame) fn.put("<xmlattr>.source_frame", *f.source_frame);
    pt::ptree& b = fn.add_child("bbox", pt::ptree());
    b.put("<xmlattr>.x", f.bbox.x);
    b.put("<xmlattr>.y", f.bbox.y);
    b.put("<xmlattr>.w", f.bbox.w);
    b.put("<xmlattr>.h", f.bbox.h);
    if (f.corners) {
      std::string text;
      for (const Vec2& p : *f.corners) {
        if (!text.empty()) text += ' ';
        text += format_double(p.x()) + ' ' + format_double(p.y());
      }
      fn.put("corners", text);
    }
  }
  std::ostringstream out;
  pt::write_xml(out, root, pt::xml_writer_make_settings<std::string>(' ', 2));
  return out.str();
}

SequenceAnnotation annotation_from_xml(std::string_view xml) {
  pt::ptree root;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, root, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw AnnotationError(std::string("malformed annotation XML: ") + e.what());
  }
  try {
    if (root.size() != 1 || root.begin()->first != "sequence") {
      throw AnnotationError("annotation root must be a single <sequence>");
    }
    const pt::ptree& s = root.begin()->second;
    const std::string w = "sequence";
    expect_keys(s, {kAttr, "render_engine", "resolution", "camera", "light", "parameters", "frames"}, w);
    expect_attrs(s, {"schema_version", "id", "data_type"}, w);

    SequenceAnnotation seq;
    seq.schema_version = int_attr<int>(s, "schema_version", w);
    if (seq.schema_version != kAnnotationSchemaVersion) {
      throw AnnotationError("unsupported annotation schema version " + std::to_string(seq.schema_version));
    }
    seq.sequence_id = attr(s, "id", w);
    seq.data_type = parse_data_type(attr(s, "data_type", w));
    const pt::ptree& engine = only_child(s, "render_engine", w);
    expect_keys(engine, {}, "render_engine", true);
    seq.render_engine = engine.data();

    const pt::ptree& res = only_child(s, "resolution", w);
    expect_keys(res, {kAttr}, "resolution");
    expect_attrs(res, {"width", "height"}, "resolution");
    seq.resolution = {int_attr<int>(res, "width", "resolution"), int_attr<int>(res, "height", "resolution")};

    if (s.count("camera") > 1 || s.count("light") > 1) throw AnnotationError("duplicate camera/light snapshot");
    if (const auto c = s.get_child_optional("camera")) seq.camera = parse_camera(*c);
    if (const auto l = s.get_child_optional("light")) seq.light = parse_light(*l);

    const pt::ptree& params = only_child(s, "parameters", w);
    expect_keys(params, {"param"}, "parameters");
    for (const auto& [key, p] : params) {
      expect_keys(p, {kAttr}, "param");
      expect_attrs(p, {"name", "value"}, "param");
      seq.parameters.emplace_back(attr(p, "name", "param"), attr(p, "value", "param"));
    }

    const pt::ptree& frames = only_child(s, "frames", w);
    expect_keys(frames, {"frame"}, "frames");
    for (const auto& [key, f] : frames) seq.frames.push_back(parse_frame(f));

    check_invariants(seq);
    return seq;
  } catch (const AnnotationError&) {
    throw;
  } catch (const std::exception& e) {
    throw AnnotationError(std::string("invalid annotation: ") + e.what());
  }
}

std::string annotation_to_json(const SequenceAnnotation& seq) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = seq.schema_version;
  j["sequence_id"] = seq.sequence_id;
  j["data_type"] = std::string(to_string(seq.data_type));
  j["render_engine"] = seq.render_engine;
  j["resolution"] = {seq.resolution.width, seq.resolution.height};
  if (seq.camera) {
    const CameraPreset& c = *seq.camera;
    j["camera"] = {{"id", c.id},
                   {"position", {c.position.x(), c.position.y(), c.position.z()}},
                   {"tilt", {c.tilt.x(), c.tilt.y(), c.tilt.z()}},
                   {"sensor_size_mm", {c.sensor_size_mm.x(), c.sensor_size_mm.y()}},
                   {"focal_length_mm", c.focal_length_mm},
                   {"f_number", c.f_number},
                   {"native_resolution", {c.native_width, c.native_height}}};
  }
  if (seq.light) {
    const LightPreset& l = *seq.light;
    j["light"] = {{"id", l.id},
                  {"kind", std::string(to_string(l.kind))},
                  {"position", {l.position.x(), l.position.y(), l.position.z()}},
                  {"direction", {l.direction.x(), l.direction.y(), l.direction.z()}},
                  {"intensity", l.intensity},
                  {"beamwidth", l.beamwidth}};
  }
  ordered_json params = ordered_json::object();
  for (const auto& [name, value] : seq.parameters) params[name] = value;
  j["parameters"] = params;
  ordered_json frames = ordered_json::array();
  for (const auto& f : seq.frames) {
    ordered_json fj;
    fj["index"] = f.frame_index;
    fj["label"] = f.label;
    fj["bbox"] = {f.bbox.x, f.bbox.y, f.bbox.w, f.bbox.h};
    if (f.corners) {
      ordered_json c = ordered_json::array();
      for (const Vec2& p : *f.corners) c.push_back({p.x(), p.y()});
      fj["corners"] = c;
    }
    fj["occluded"] = f.occluded;
    ordered_json sides = ordered_json::array();
    for (auto s : detail::split_ws(sides_text(f.sides))) sides.push_back(std::string(s));
    fj["occlusion"] = sides;
    if (f.source_frame) fj["source_frame"] = *f.source_frame;
    frames.push_back(fj);
  }
  j["frames"] = frames;
  return j.dump(2) + "\n";
}

std::filesystem::path write_annotation(const std::filesystem::path& dir, const SequenceAnnotation& seq) {
  if (seq.sequence_id.empty()) throw AnnotationError("sequence id must not be empty");
  const std::string xml = annotation_to_xml(seq);
  std::filesystem::create_directories(dir);
  const auto xml_path = dir / (seq.sequence_id + ".xml");
  detail::write_text_file_atomic(xml_path.string(), xml);
  detail::write_text_file_atomic((dir / (seq.sequence_id + ".json")).string(), annotation_to_json(seq));
  return xml_path;
}

SequenceAnnotation read_annotation(const std::filesystem::path& xml_path) {
  return annotation_from_xml(detail::read_text_file(xml_path.string()));
}

}  // namespace lpsynth
