#include "kfuse/io.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace kfuse {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "failed reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIoError, "failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Detection files

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

void check_at_line(const Detection& det, std::size_t num_classes, int line) {
  try {
    check_detection(det, num_classes);
  } catch (const Error& e) {
    throw Error(ErrorCode::kRangeError, e.message(), line, e.field());
  }
}

double json_number(const ordered_json& obj, const char* key, int line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kParseError, std::string("missing key '") + key + "'", line, key);
  }
  if (!it->is_number()) {
    throw Error(ErrorCode::kParseError, std::string("'") + key + "' is not a number", line, key);
  }
  return it->get<double>();
}

Detection parse_json_line(std::string_view line, int line_no) {
  ordered_json obj;
  try {
    obj = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what(), line_no);
  }
  if (!obj.is_object()) throw Error(ErrorCode::kParseError, "expected a JSON object", line_no);
  static const std::set<std::string> kKnown = {"frame", "view", "class", "x",
                                               "y",     "w",    "h",     "score"};
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!kKnown.count(it.key())) {
      throw Error(ErrorCode::kParseError, "unknown key '" + it.key() + "'", line_no, it.key());
    }
  }
  auto cls = obj.find("class");
  if (cls == obj.end() || !cls->is_number_integer()) {
    throw Error(ErrorCode::kParseError, "'class' must be an integer", line_no, "class");
  }
  Detection det;
  det.class_id = cls->get<int>();
  det.box.x = json_number(obj, "x", line_no);
  det.box.y = json_number(obj, "y", line_no);
  det.box.w = json_number(obj, "w", line_no);
  det.box.h = json_number(obj, "h", line_no);
  if (auto s = obj.find("score"); s != obj.end() && !s->is_null()) {
    if (!s->is_number()) {
      throw Error(ErrorCode::kParseError, "'score' is not a number", line_no, "score");
    }
    det.score = s->get<double>();
  }
  return det;
}

template <typename T>
T parse_token(std::string_view token, int line, const char* field) {
  T value{};
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kParseError, "cannot parse '" + std::string(token) + "'", line, field);
  }
  return value;
}

Detection parse_yolo_line(std::string_view line, int line_no, ImageSize image) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  if (tokens.size() != 5 && tokens.size() != 6) {
    throw Error(ErrorCode::kParseError,
                "expected 5 or 6 fields, found " + std::to_string(tokens.size()), line_no);
  }
  static constexpr const char* kFields[] = {"x", "y", "w", "h", "score"};
  double v[5] = {0, 0, 0, 0, 0};
  for (std::size_t k = 1; k < tokens.size(); ++k) {
    v[k - 1] = parse_token<double>(tokens[k], line_no, kFields[k - 1]);
  }
  const int cls = parse_token<int>(tokens[0], line_no, "class");
  for (int k = 0; k < 2; ++k) {
    if (!(v[k] >= 0.0 && v[k] <= 1.0)) {
      throw Error(ErrorCode::kRangeError, "normalized coordinate outside [0, 1]", line_no,
                  kFields[k]);
    }
  }
  for (int k = 2; k < 4; ++k) {
    if (!(v[k] > 0.0 && v[k] <= 1.0)) {
      throw Error(ErrorCode::kRangeError, "normalized size outside (0, 1]", line_no, kFields[k]);
    }
  }
  Detection det;
  det.class_id = cls;
  det.box = {v[0] * image.width, v[1] * image.height, v[2] * image.width, v[3] * image.height};
  if (tokens.size() == 6) det.score = v[4];
  return det;
}

}  // namespace

std::vector<Detection> parse_detections(std::string_view text, DetectionFormat format,
                                        const ReadOptions& options) {
  if (format == DetectionFormat::kYoloTxt && !options.image_size) {
    throw Error(ErrorCode::kMissingImageSize, "yolo_txt input needs the image size");
  }
  std::vector<Detection> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    const int line_no = static_cast<int>(i + 1);
    Detection det = format == DetectionFormat::kJsonLines
                        ? parse_json_line(lines[i], line_no)
                        : parse_yolo_line(lines[i], line_no, *options.image_size);
    check_at_line(det, options.num_classes, line_no);
    out.push_back(det);
  }
  return out;
}

std::vector<Detection> read_detections(const fs::path& path, DetectionFormat format,
                                       const ReadOptions& options) {
  const std::string text = read_text_file(path);
  try {
    return parse_detections(text, format, options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message(), e.line(), e.field());
  }
}

namespace {

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string format_detections(std::span<const Detection> dets, DetectionFormat format,
                              const WriteContext& context) {
  if (format == DetectionFormat::kYoloTxt && !context.image_size) {
    throw Error(ErrorCode::kMissingImageSize, "yolo_txt output needs the image size");
  }
  std::string out;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& d = dets[i];
    check_at_line(d, 0, static_cast<int>(i + 1));
    if (format == DetectionFormat::kJsonLines) {
      ordered_json obj;
      obj["frame"] = context.frame;
      obj["view"] = context.view;
      obj["class"] = d.class_id;
      obj["x"] = d.box.x;
      obj["y"] = d.box.y;
      obj["w"] = d.box.w;
      obj["h"] = d.box.h;
      if (d.score) obj["score"] = *d.score;
      out += obj.dump();
      out += '\n';
      continue;
    }
    const double width = context.image_size->width;
    const double height = context.image_size->height;
    const double v[4] = {d.box.x / width, d.box.y / height, d.box.w / width, d.box.h / height};
    static constexpr const char* kFields[] = {"x", "y", "w", "h"};
    for (int k = 0; k < 4; ++k) {
      const bool ok = k < 2 ? (v[k] >= 0.0 && v[k] <= 1.0) : (v[k] > 0.0 && v[k] <= 1.0);
      if (!ok) {
        throw Error(ErrorCode::kRangeError, "box does not fit the normalized frame",
                    static_cast<int>(i + 1), kFields[k]);
      }
    }
    out += std::to_string(d.class_id);
    for (double value : v) out += ' ' + format_fixed6(value);
    if (d.score) out += ' ' + format_fixed6(*d.score);
    out += '\n';
  }
  return out;
}

void write_detections(std::span<const Detection> dets, const fs::path& path,
                      DetectionFormat format, const WriteContext& context) {
  write_text_file(path, format_detections(dets, format, context));
}

// ---------------------------------------------------------------------------
// PFM

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

struct PfmHeader {
  int width = 0;
  int height = 0;
  bool little_endian = true;
  std::size_t data_offset = 0;
};

PfmHeader parse_pfm_header(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  };
  auto token = [&]() -> std::string_view {
    skip_space();
    std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  const std::string_view magic = token();
  if (magic != "Pf") {
    throw Error(ErrorCode::kBadMagic,
                magic == "PF" ? "three-channel PFM is not a disparity channel"
                              : "not a single-channel PFM file");
  }
  PfmHeader header;
  const std::string_view w = token();
  const std::string_view h = token();
  const std::string_view scale_token = token();
  auto to_int = [](std::string_view s) -> int {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v <= 0) {
      throw Error(ErrorCode::kBadDimensions, "invalid PFM dimension '" + std::string(s) + "'");
    }
    return v;
  };
  header.width = to_int(w);
  header.height = to_int(h);
  double scale = 0.0;
  auto [ptr, ec] = std::from_chars(scale_token.data(), scale_token.data() + scale_token.size(),
                                   scale);
  if (ec != std::errc() || ptr != scale_token.data() + scale_token.size() || scale == 0.0 ||
      !std::isfinite(scale)) {
    throw Error(ErrorCode::kBadMagic, "invalid PFM scale '" + std::string(scale_token) + "'");
  }
  header.little_endian = scale < 0.0;
  // exactly one whitespace byte separates the header from the data
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw Error(ErrorCode::kBadDimensions, "PFM header is truncated");
  }
  header.data_offset = pos + 1;
  return header;
}

}  // namespace

std::string encode_pfm(const Raster& raster) {
  std::string out = "Pf\n" + std::to_string(raster.width()) + " " +
                    std::to_string(raster.height()) + "\n-1\n";
  const std::size_t header = out.size();
  const std::size_t w = static_cast<std::size_t>(raster.width());
  out.resize(header + 4 * w * static_cast<std::size_t>(raster.height()));
  char* dst = out.data() + header;
  for (int row = raster.height() - 1; row >= 0; --row) {
    for (int col = 0; col < raster.width(); ++col) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(raster.at(col, row));
      if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
      std::memcpy(dst, &bits, 4);
      dst += 4;
    }
  }
  return out;
}

Raster decode_pfm(std::string_view bytes) {
  const PfmHeader header = parse_pfm_header(bytes);
  const std::size_t count =
      static_cast<std::size_t>(header.width) * static_cast<std::size_t>(header.height);
  if (bytes.size() - header.data_offset != 4 * count) {
    throw Error(ErrorCode::kBadDimensions,
                "PFM declares " + std::to_string(header.width) + "x" +
                    std::to_string(header.height) + " but carries " +
                    std::to_string(bytes.size() - header.data_offset) + " data bytes");
  }
  const bool swap = header.little_endian != (std::endian::native == std::endian::little);
  std::vector<float> values(count);
  const char* src = bytes.data() + header.data_offset;
  for (int stored = 0; stored < header.height; ++stored) {
    const std::size_t row = static_cast<std::size_t>(header.height - 1 - stored);
    for (int col = 0; col < header.width; ++col) {
      std::uint32_t bits;
      std::memcpy(&bits, src, 4);
      src += 4;
      if (swap) bits = byteswap32(bits);
      const float v = std::bit_cast<float>(bits);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "non-finite value at (" + std::to_string(col) + ", " + std::to_string(row) +
                        ")");
      }
      values[row * static_cast<std::size_t>(header.width) + static_cast<std::size_t>(col)] = v;
    }
  }
  return Raster(header.width, header.height, std::move(values));
}

Raster read_pfm(const fs::path& path) {
  const std::string bytes = read_text_file(path);
  try {
    return decode_pfm(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

ImageSize read_pfm_size(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open '" + path.string() + "'");
  std::string head(256, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  try {
    const PfmHeader header = parse_pfm_header(head);
    return {header.width, header.height};
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void write_pfm(const Raster& raster, const fs::path& path) {
  write_text_file(path, encode_pfm(raster));
}

Raster read_disparity(const fs::path& path) { return read_pfm(path); }

// ---------------------------------------------------------------------------
// Manifest

namespace {

void check_keys(const ordered_json& obj, std::initializer_list<const char*> known,
                const std::string& where, ManifestMode mode,
                std::vector<std::string>* warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (const char* k : known) found = found || it.key() == k;
    if (found) continue;
    const std::string msg = where + ": unknown field '" + it.key() + "'";
    if (mode == ManifestMode::kStrict) throw Error(ErrorCode::kParseError, msg, 0, it.key());
    if (warnings) warnings->push_back(msg);
  }
}

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kParseError, where + ": missing field '" + key + "'", 0, key);
  }
  return *it;
}

int view_key(const std::string& key, const std::string& where) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
  if (ec != std::errc() || ptr != key.data() + key.size() || v < 1 || v > 9) {
    throw Error(ErrorCode::kParseError, where + ": invalid view key '" + key + "'", 0, key);
  }
  return v;
}

std::map<int, std::string> parse_view_paths(const ordered_json& obj, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::kParseError, where + " must be an object");
  std::map<int, std::string> out;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!it->is_string()) {
      throw Error(ErrorCode::kParseError, where + "." + it.key() + " must be a string path");
    }
    out[view_key(it.key(), where)] = it->get<std::string>();
  }
  return out;
}

}  // namespace

DatasetManifest parse_manifest(std::string_view text, const fs::path& base_dir,
                               ManifestMode mode, std::vector<std::string>* warnings) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::kParseError, "manifest must be a JSON object");
  const ordered_json& version = require(root, "schema_version", "manifest");
  if (!version.is_number_integer() || version.get<int>() != DatasetManifest::kSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                "manifest schema_version " + version.dump() + ", expected " +
                    std::to_string(DatasetManifest::kSchemaVersion));
  }
  check_keys(root, {"schema_version", "classes", "detection_format", "frames"}, "manifest",
             mode, warnings);

  DatasetManifest manifest;
  manifest.base_dir = base_dir;
  try {
    manifest.class_table =
        ClassTable(require(root, "classes", "manifest").get<std::vector<std::string>>());
    if (auto it = root.find("detection_format"); it != root.end()) {
      auto fmt = parse_format_name(it->get<std::string>());
      if (!fmt) {
        throw Error(ErrorCode::kParseError, "unknown detection_format " + it->dump());
      }
      manifest.detection_format = *fmt;
    }
    const ordered_json& frames = require(root, "frames", "manifest");
    if (!frames.is_array()) throw Error(ErrorCode::kParseError, "manifest.frames must be a list");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const ordered_json& f = frames[i];
      const std::string where = "frames[" + std::to_string(i) + "]";
      if (!f.is_object()) throw Error(ErrorCode::kParseError, where + " must be an object");
      check_keys(f, {"shot_id", "image_size", "labels", "detections", "disparity"}, where, mode,
                 warnings);
      FrameEntry entry;
      entry.shot_id = require(f, "shot_id", where).get<std::string>();
      const ordered_json& size = require(f, "image_size", where);
      check_keys(size, {"width", "height"}, where + ".image_size", mode, warnings);
      entry.image_size.width = require(size, "width", where + ".image_size").get<int>();
      entry.image_size.height = require(size, "height", where + ".image_size").get<int>();
      if (auto it = f.find("labels"); it != f.end()) {
        entry.labels = parse_view_paths(*it, where + ".labels");
      }
      if (auto it = f.find("detections"); it != f.end()) {
        entry.detections = parse_view_paths(*it, where + ".detections");
      }
      if (auto it = f.find("disparity"); it != f.end()) {
        if (!it->is_object()) {
          throw Error(ErrorCode::kParseError, where + ".disparity must be an object");
        }
        for (auto d = it->begin(); d != it->end(); ++d) {
          const std::string dwhere = where + ".disparity." + d.key();
          check_keys(*d, {"x", "y"}, dwhere, mode, warnings);
          DisparityPaths paths;
          if (auto x = d->find("x"); x != d->end()) paths.x = x->get<std::string>();
          if (auto y = d->find("y"); y != d->end()) paths.y = y->get<std::string>();
          entry.disparity[view_key(d.key(), where + ".disparity")] = paths;
        }
      }
      manifest.frames.push_back(std::move(entry));
    }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) {
      throw Error(ErrorCode::kParseError, "manifest: " + e.message());
    }
    throw;
  }
  return manifest;
}

DatasetManifest read_manifest(const fs::path& path, ManifestMode mode,
                              std::vector<std::string>* warnings) {
  const std::string text = read_text_file(path);
  fs::path base = path.parent_path();
  return parse_manifest(text, base, mode, warnings);
}

std::string dump_manifest(const DatasetManifest& manifest) {
  ordered_json root;
  root["schema_version"] = DatasetManifest::kSchemaVersion;
  root["classes"] = manifest.class_table.names();
  root["detection_format"] = std::string(format_name(manifest.detection_format));
  root["frames"] = ordered_json::array();
  for (const FrameEntry& f : manifest.frames) {
    ordered_json entry;
    entry["shot_id"] = f.shot_id;
    entry["image_size"] = {{"width", f.image_size.width}, {"height", f.image_size.height}};
    ordered_json labels = ordered_json::object();
    for (const auto& [v, p] : f.labels) labels[std::to_string(v)] = p;
    entry["labels"] = labels;
    ordered_json detections = ordered_json::object();
    for (const auto& [v, p] : f.detections) detections[std::to_string(v)] = p;
    entry["detections"] = detections;
    ordered_json disparity = ordered_json::object();
    for (const auto& [v, p] : f.disparity) {
      ordered_json channels = ordered_json::object();
      if (!p.x.empty()) channels["x"] = p.x;
      if (!p.y.empty()) channels["y"] = p.y;
      disparity[std::to_string(v)] = channels;
    }
    entry["disparity"] = disparity;
    root["frames"].push_back(entry);
  }
  return root.dump(2) + "\n";
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_text_file(path, dump_manifest(manifest));
}

KaleidoFrame load_frame(const DatasetManifest& manifest, const FrameEntry& entry,
                        ViewSource source) {
  KaleidoFrame frame;
  frame.shot_id = entry.shot_id;
  frame.image_size = entry.image_size;
  const auto& paths = source == ViewSource::kLabels ? entry.labels : entry.detections;
  ReadOptions options;
  options.image_size = entry.image_size;
  options.num_classes = manifest.class_table.size();
  for (const auto& [v, path] : paths) {
    try {
      frame.views[ViewpointId(v)] =
          read_detections(manifest.resolve(path), manifest.detection_format, options);
    } catch (const Error& e) {
      throw Error(e.code(),
                  "frame '" + entry.shot_id + "' view " + std::to_string(v) + ": " + e.message(),
                  e.line(), e.field());
    }
  }
  for (ViewpointId target : surrounding_views()) {
    const std::string where =
        "frame '" + entry.shot_id + "' disparity 5->" + std::to_string(target.index()) + ": ";
    auto it = entry.disparity.find(target.index());
    if (it == entry.disparity.end()) {
      throw Error(ErrorCode::kMissingFile, where + "not declared");
    }
    DisparityField field;
    field.target = target;
    field.size = entry.image_size;
    try {
      if (!it->second.x.empty()) field.dx = read_disparity(manifest.resolve(it->second.x));
      if (!it->second.y.empty()) field.dy = read_disparity(manifest.resolve(it->second.y));
      field.validate();
    } catch (const Error& e) {
      throw Error(e.code(), where + e.message());
    }
    frame.disparities.emplace(target, std::move(field));
  }
  return frame;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string json_string(const std::string& s) { return ordered_json(s).dump(); }

std::string metric(const std::optional<double>& v) {
  return v ? format_fixed6(*v) : std::string("null");
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  std::string out = "{\n";
  out += "  \"schema_version\": 1,\n";
  out += "  \"folds\": " + std::to_string(report.folds) + ",\n";
  out += "  \"classes\": [";
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    if (i) out += ", ";
    out += json_string(report.classes.names()[i]);
  }
  out += "],\n";
  out += "  \"aggregate\": {\n";
  out += "    \"precision\": " + format_fixed6(report.precision) + ",\n";
  out += "    \"recall\": " + format_fixed6(report.recall) + ",\n";
  out += "    \"map50\": " + format_fixed6(report.map50) + ",\n";
  out += "    \"map50_95\": " + format_fixed6(report.map50_95) + "\n";
  out += "  },\n";
  out += "  \"per_class\": [";
  bool first = true;
  for (const auto& [cls, m] : report.per_class) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    {\"class_id\": " + std::to_string(cls) +
           ", \"name\": " + json_string(report.classes.name(cls)) +
           ", \"gts\": " + std::to_string(m.gts) + ", \"preds\": " + std::to_string(m.preds) +
           ", \"ap50\": " + metric(m.ap50) + ", \"ap50_95\": " + metric(m.ap50_95) + "}";
  }
  out += first ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

EvalReport report_from_json(std::string_view text) {
  try {
    const ordered_json root = ordered_json::parse(text);
    if (root.at("schema_version").get<int>() != 1) {
      throw Error(ErrorCode::kSchemaVersionMismatch, "unsupported report schema_version");
    }
    EvalReport report;
    report.folds = root.at("folds").get<std::size_t>();
    report.classes = ClassTable(root.at("classes").get<std::vector<std::string>>());
    const ordered_json& agg = root.at("aggregate");
    report.precision = agg.at("precision").get<double>();
    report.recall = agg.at("recall").get<double>();
    report.map50 = agg.at("map50").get<double>();
    report.map50_95 = agg.at("map50_95").get<double>();
    for (const ordered_json& c : root.at("per_class")) {
      ClassMetrics m;
      m.gts = c.at("gts").get<std::size_t>();
      m.preds = c.at("preds").get<std::size_t>();
      if (!c.at("ap50").is_null()) m.ap50 = c.at("ap50").get<double>();
      if (!c.at("ap50_95").is_null()) m.ap50_95 = c.at("ap50_95").get<double>();
      const ClassId id = c.at("class_id").get<int>();
      if (!report.classes.contains(id)) {
        throw Error(ErrorCode::kRangeError, "report class id " + std::to_string(id));
      }
      report.per_class[id] = m;
    }
    return report;
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report: ") + e.what());
  }
}

std::string report_table(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %10s %14s\n", "Class", "GTs", "Preds",
                "AP@0.5", "AP@0.5:0.95");
  out += line;
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *v);
    return std::string(buf);
  };
  for (const auto& [cls, m] : report.per_class) {
    std::snprintf(line, sizeof(line), "%-10s %8zu %8zu %10s %14s\n",
                  report.classes.name(cls).c_str(), m.gts, m.preds, pct(m.ap50).c_str(),
                  pct(m.ap50_95).c_str());
    out += line;
  }
  out += "\n";
  std::snprintf(line, sizeof(line), "%10s %10s %10s %14s\n", "Precision", "Recall", "mAP@0.5",
                "mAP@0.5:0.95");
  out += line;
  std::snprintf(line, sizeof(line), "%10.2f %10.2f %10.2f %14.2f\n", 100.0 * report.precision,
                100.0 * report.recall, 100.0 * report.map50, 100.0 * report.map50_95);
  out += line;
  if (report.folds > 1) {
    out += "(mean over " + std::to_string(report.folds) + " folds)\n";
  }
  return out;
}

}  // namespace kfuse
