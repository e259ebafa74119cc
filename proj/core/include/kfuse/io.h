#pragma once

// Readers and writers for detection files, PFM disparity rasters, dataset
// manifests and evaluation reports.
//
// Detection files
//   json_lines  one object per line, keys in this order:
//               {"frame","view","class","x","y","w","h","score"?}, pixels.
//   yolo_txt    one line per box: `class x y w h [score]`, coordinates
//               normalized by the image size, six decimals.
//
// Disparity channels are single-channel little-endian PFM files; corner
// views use one file per axis (`*.x.pfm`, `*.y.pfm`).

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kfuse/eval.h"
#include "kfuse/model.h"

namespace kfuse {

struct ReadOptions {
  std::optional<ImageSize> image_size;  // required for yolo_txt
  std::size_t num_classes = 0;          // 0 skips the class range check
};

struct WriteContext {
  std::string frame;
  int view = 5;
  std::optional<ImageSize> image_size;  // required for yolo_txt
};

std::vector<Detection> parse_detections(std::string_view text, DetectionFormat format,
                                        const ReadOptions& options = {});
std::vector<Detection> read_detections(const std::filesystem::path& path,
                                       DetectionFormat format,
                                       const ReadOptions& options = {});

std::string format_detections(std::span<const Detection> dets, DetectionFormat format,
                              const WriteContext& context);
void write_detections(std::span<const Detection> dets, const std::filesystem::path& path,
                      DetectionFormat format, const WriteContext& context);

std::string encode_pfm(const Raster& raster);
Raster decode_pfm(std::string_view bytes);
Raster read_pfm(const std::filesystem::path& path);
// Parses only the header.
ImageSize read_pfm_size(const std::filesystem::path& path);
void write_pfm(const Raster& raster, const std::filesystem::path& path);

// One disparity channel. Alias of read_pfm.
Raster read_disparity(const std::filesystem::path& path);

enum class ManifestMode {
  kStrict,   // unknown fields are errors
  kLenient,  // unknown fields are reported through `warnings`
};

DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                               ManifestMode mode = ManifestMode::kStrict,
                               std::vector<std::string>* warnings = nullptr);
DatasetManifest read_manifest(const std::filesystem::path& path,
                              ManifestMode mode = ManifestMode::kStrict,
                              std::vector<std::string>* warnings = nullptr);
// Canonical form: fixed key order, views in ascending order, two-space
// indentation, trailing newline.
std::string dump_manifest(const DatasetManifest& manifest);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

enum class ViewSource { kLabels, kDetections };

// Loads one frame's per-view detections and its eight disparity fields.
// Views without a declared file are left out of `views`.
KaleidoFrame load_frame(const DatasetManifest& manifest, const FrameEntry& entry,
                        ViewSource source);

// Canonical report JSON: fixed key order, metrics with six decimals.
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view text);
// Plain-text table: one row per class, then the aggregate row.
std::string report_table(const EvalReport& report);

std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace kfuse
