#pragma once

// Core domain types: boxes, detections, viewpoints, disparity rasters,
// kaleidoscopic frames and the dataset manifest.
//
// Coordinates are pixels, center format, origin at the top-left corner of
// the image with y pointing down. A frame of size W x H spans [0, W] x [0, H].
// Disparity rasters are indexed so that pixel (col, row) is the nearest
// pixel to every point that rounds to (col, row).

#include <array>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kfuse/error.h"

namespace kfuse {

using ClassId = int;

// Ordered class taxonomy; ids are the positions 0..size()-1.
class ClassTable {
 public:
  ClassTable() = default;
  explicit ClassTable(std::vector<std::string> names);

  // The eleven PCB component classes:
  // C, D, IC, L, R, XTAL, LED, Q, AL_C, RY, FI.
  static ClassTable pcb_components();

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  bool contains(ClassId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < names_.size();
  }
  const std::string& name(ClassId id) const;
  std::optional<ClassId> find(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const ClassTable&) const = default;

 private:
  std::vector<std::string> names_;
};

struct BBox {
  double x = 0.0;  // center, horizontal
  double y = 0.0;  // center, vertical (down)
  double w = 0.0;
  double h = 0.0;

  double left() const { return x - 0.5 * w; }
  double right() const { return x + 0.5 * w; }
  double top() const { return y - 0.5 * h; }
  double bottom() const { return y + 0.5 * h; }
  double area() const { return w * h; }

  static BBox from_corners(double x1, double y1, double x2, double y2);

  // w > 0, h > 0 and all coordinates finite.
  bool valid() const;

  bool operator==(const BBox&) const = default;
};

// A labelled or predicted box. Ground-truth labels carry no score.
struct Detection {
  ClassId class_id = 0;
  BBox box;
  std::optional<double> score;

  bool is_label() const { return !score.has_value(); }

  bool operator==(const Detection&) const = default;
};

// Throws kRangeError when `det` breaks a model invariant. When
// `num_classes` is non-zero the class id is checked against it.
void check_detection(const Detection& det, std::size_t num_classes = 0);

enum class ViewKind { kCenter, kEdge, kCorner };

// Position on the 3x3 viewpoint grid, numbered row-major from 1 (top-left)
// to 9 (bottom-right). View 5 is the center view.
class ViewpointId {
 public:
  explicit ViewpointId(int index);

  static ViewpointId center() { return ViewpointId(5); }

  int index() const { return index_; }
  int row() const { return (index_ - 1) / 3; }
  int col() const { return (index_ - 1) % 3; }
  ViewKind kind() const;
  bool is_center() const { return index_ == 5; }

  // Which displacement channels a center->this disparity field carries.
  bool moves_x() const { return col() != 1; }
  bool moves_y() const { return row() != 1; }

  auto operator<=>(const ViewpointId&) const = default;

 private:
  int index_;
};

std::array<ViewpointId, 9> all_views();
// The eight non-center views in ascending order.
std::array<ViewpointId, 8> surrounding_views();

struct ImageSize {
  int width = 0;
  int height = 0;

  bool operator==(const ImageSize&) const = default;
};

// Row-major float raster, top row first.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, float fill = 0.0f);
  Raster(int width, int height, std::vector<float> values);

  int width() const { return width_; }
  int height() const { return height_; }
  float at(int col, int row) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  float& at(int col, int row) {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  bool operator==(const Raster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

// Displacement of center-view content in viewpoint `target`. An absent
// channel is identically zero.
struct DisparityField {
  ViewpointId target{1};
  ImageSize size;
  std::optional<Raster> dx;
  std::optional<Raster> dy;

  // Channel layout must match the target's grid position and raster
  // dimensions must equal `size`. Throws kDimensionMismatch or
  // kInvalidArgument.
  void validate() const;

  // Zero rasters in exactly the channels the target requires.
  static DisparityField zeros(ViewpointId target, ImageSize size);
};

struct KaleidoFrame {
  std::string shot_id;
  ImageSize image_size;
  std::map<ViewpointId, std::vector<Detection>> views;
  std::map<ViewpointId, DisparityField> disparities;

  const DisparityField& disparity(ViewpointId target) const;
  // All eight fields present with matching dimensions.
  void validate() const;
};

enum class DetectionFormat { kJsonLines, kYoloTxt };

std::string_view format_name(DetectionFormat format);
std::optional<DetectionFormat> parse_format_name(std::string_view name);

// Paths of one center->target disparity field; an empty string is an absent
// channel.
struct DisparityPaths {
  std::string x;
  std::string y;

  bool operator==(const DisparityPaths&) const = default;
};

struct FrameEntry {
  std::string shot_id;
  ImageSize image_size;
  std::map<int, std::string> labels;       // view index -> path
  std::map<int, std::string> detections;   // view index -> path
  std::map<int, DisparityPaths> disparity;  // target view index -> paths

  bool operator==(const FrameEntry&) const = default;
};

// Corpus index. Paths are relative to `base_dir` (the directory holding the
// manifest file) unless absolute. Frames group by shot id for splitting.
struct DatasetManifest {
  static constexpr int kSchemaVersion = 1;

  ClassTable class_table;
  DetectionFormat detection_format = DetectionFormat::kJsonLines;
  std::vector<FrameEntry> frames;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& path) const;
  std::vector<std::string> shot_ids() const;
  const FrameEntry* find_frame(std::string_view shot_id) const;
};

struct ManifestIssue {
  ErrorCode code;
  std::string shot_id;
  std::string message;
};

struct ManifestStats {
  std::size_t frames = 0;
  std::size_t view_images = 0;
  std::size_t disparity_maps = 0;
  std::size_t disparity_channels = 0;
  std::vector<ManifestIssue> issues;

  bool ok() const { return issues.empty(); }
};

struct ValidateOptions {
  // Check that referenced files exist and disparity headers match the
  // declared image size. Off for structural checks of stub manifests.
  bool check_files = true;
};

// Each shot contributes nine view images, eight disparity maps and twelve
// disparity channels (edge maps one channel, corner maps two).
ManifestStats validate_manifest(const DatasetManifest& manifest,
                                const ValidateOptions& options = {});

}  // namespace kfuse
