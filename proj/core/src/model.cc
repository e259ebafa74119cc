#include "kfuse/model.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "kfuse/io.h"

namespace kfuse {

ClassTable::ClassTable(std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "class " + std::to_string(i) + " has an empty name");
    }
    if (!seen.insert(names_[i]).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate class name '" + names_[i] + "'");
    }
  }
}

ClassTable ClassTable::pcb_components() {
  return ClassTable({"C", "D", "IC", "L", "R", "XTAL", "LED", "Q", "AL_C",
                     "RY", "FI"});
}

const std::string& ClassTable::name(ClassId id) const {
  if (!contains(id)) {
    throw Error(ErrorCode::kRangeError,
                "class id " + std::to_string(id) + " not in class table");
  }
  return names_[static_cast<std::size_t>(id)];
}

std::optional<ClassId> ClassTable::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<ClassId>(it - names_.begin());
}

BBox BBox::from_corners(double x1, double y1, double x2, double y2) {
  return BBox{0.5 * (x1 + x2), 0.5 * (y1 + y2), x2 - x1, y2 - y1};
}

bool BBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

void check_detection(const Detection& det, std::size_t num_classes) {
  if (det.class_id < 0 ||
      (num_classes != 0 && static_cast<std::size_t>(det.class_id) >= num_classes)) {
    throw Error(ErrorCode::kRangeError,
                "class id " + std::to_string(det.class_id) + " out of range",
                0, "class");
  }
  const BBox& b = det.box;
  if (!std::isfinite(b.x)) throw Error(ErrorCode::kRangeError, "non-finite", 0, "x");
  if (!std::isfinite(b.y)) throw Error(ErrorCode::kRangeError, "non-finite", 0, "y");
  if (!(std::isfinite(b.w) && b.w > 0.0)) {
    throw Error(ErrorCode::kRangeError, "width must be positive", 0, "w");
  }
  if (!(std::isfinite(b.h) && b.h > 0.0)) {
    throw Error(ErrorCode::kRangeError, "height must be positive", 0, "h");
  }
  if (det.score && !(*det.score >= 0.0 && *det.score <= 1.0)) {
    throw Error(ErrorCode::kRangeError, "score must lie in [0, 1]", 0, "score");
  }
}

ViewpointId::ViewpointId(int index) : index_(index) {
  if (index < 1 || index > 9) {
    throw Error(ErrorCode::kInvalidArgument,
                "viewpoint index " + std::to_string(index) + " outside 1..9");
  }
}

ViewKind ViewpointId::kind() const {
  if (is_center()) return ViewKind::kCenter;
  return (moves_x() && moves_y()) ? ViewKind::kCorner : ViewKind::kEdge;
}

std::array<ViewpointId, 9> all_views() {
  return {ViewpointId(1), ViewpointId(2), ViewpointId(3),
          ViewpointId(4), ViewpointId(5), ViewpointId(6),
          ViewpointId(7), ViewpointId(8), ViewpointId(9)};
}

std::array<ViewpointId, 8> surrounding_views() {
  return {ViewpointId(1), ViewpointId(2), ViewpointId(3), ViewpointId(4),
          ViewpointId(6), ViewpointId(7), ViewpointId(8), ViewpointId(9)};
}

Raster::Raster(int width, int height, float fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kBadDimensions, "raster dimensions must be positive");
  }
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Raster::Raster(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width <= 0 || height <= 0 ||
      values_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kBadDimensions,
                "raster of " + std::to_string(width) + "x" + std::to_string(height) +
                    " given " + std::to_string(values_.size()) + " values");
  }
}

void DisparityField::validate() const {
  if (target.is_center()) {
    throw Error(ErrorCode::kInvalidArgument, "disparity target cannot be the center view");
  }
  const std::string name = "disparity 5->" + std::to_string(target.index());
  auto check_channel = [&](const std::optional<Raster>& channel, bool required,
                           const char* axis) {
    if (required && !channel) {
      throw Error(ErrorCode::kInvalidArgument, name + " lacks its " + axis + " channel");
    }
    if (!required && channel) {
      throw Error(ErrorCode::kInvalidArgument,
                  name + " carries a " + axis + " channel its view cannot have");
    }
    if (channel && (channel->width() != size.width || channel->height() != size.height)) {
      throw Error(ErrorCode::kDimensionMismatch,
                  name + " " + axis + " raster is " + std::to_string(channel->width()) +
                      "x" + std::to_string(channel->height()) + ", image is " +
                      std::to_string(size.width) + "x" + std::to_string(size.height));
    }
  };
  check_channel(dx, target.moves_x(), "x");
  check_channel(dy, target.moves_y(), "y");
}

DisparityField DisparityField::zeros(ViewpointId target, ImageSize size) {
  DisparityField field;
  field.target = target;
  field.size = size;
  if (target.moves_x()) field.dx = Raster(size.width, size.height);
  if (target.moves_y()) field.dy = Raster(size.width, size.height);
  return field;
}

const DisparityField& KaleidoFrame::disparity(ViewpointId target) const {
  auto it = disparities.find(target);
  if (it == disparities.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame '" + shot_id + "' has no disparity for view " +
                    std::to_string(target.index()));
  }
  return it->second;
}

void KaleidoFrame::validate() const {
  for (ViewpointId v : surrounding_views()) {
    const DisparityField& field = disparity(v);
    if (field.target != v) {
      throw Error(ErrorCode::kInvalidArgument,
                  "frame '" + shot_id + "' stores the field for view " +
                      std::to_string(field.target.index()) + " under view " +
                      std::to_string(v.index()));
    }
    if (field.size != image_size) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "frame '" + shot_id + "' disparity for view " + std::to_string(v.index()) +
                      " does not match the image size");
    }
    field.validate();
  }
}

std::string_view format_name(DetectionFormat format) {
  return format == DetectionFormat::kJsonLines ? "json_lines" : "yolo_txt";
}

std::optional<DetectionFormat> parse_format_name(std::string_view name) {
  if (name == "json_lines") return DetectionFormat::kJsonLines;
  if (name == "yolo_txt") return DetectionFormat::kYoloTxt;
  return std::nullopt;
}

std::filesystem::path DatasetManifest::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::vector<std::string> DatasetManifest::shot_ids() const {
  std::vector<std::string> ids;
  ids.reserve(frames.size());
  for (const FrameEntry& f : frames) ids.push_back(f.shot_id);
  return ids;
}

const FrameEntry* DatasetManifest::find_frame(std::string_view shot_id) const {
  for (const FrameEntry& f : frames) {
    if (f.shot_id == shot_id) return &f;
  }
  return nullptr;
}

namespace {

constexpr std::size_t kViewsPerShot = 9;

void check_view_map(const FrameEntry& frame, const std::map<int, std::string>& paths,
                    const char* what, std::vector<ManifestIssue>& issues) {
  for (const auto& [view, path] : paths) {
    if (view < 1 || view > 9) {
      issues.push_back({ErrorCode::kInvalidArgument, frame.shot_id,
                        std::string(what) + " for invalid view " + std::to_string(view)});
    }
    if (path.empty()) {
      issues.push_back({ErrorCode::kMissingFile, frame.shot_id,
                        std::string(what) + " path for view " + std::to_string(view) +
                            " is empty"});
    }
  }
}

void check_file(const DatasetManifest& manifest, const FrameEntry& frame,
                const std::string& path, const std::string& what,
                std::vector<ManifestIssue>& issues) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(manifest.resolve(path), ec)) {
    issues.push_back({ErrorCode::kMissingFile, frame.shot_id,
                      what + " file '" + path + "' does not exist"});
  }
}

}  // namespace

ManifestStats validate_manifest(const DatasetManifest& manifest,
                                const ValidateOptions& options) {
  ManifestStats stats;
  stats.frames = manifest.frames.size();
  stats.view_images = kViewsPerShot * stats.frames;

  std::set<std::string> seen;
  for (const FrameEntry& frame : manifest.frames) {
    if (!seen.insert(frame.shot_id).second) {
      stats.issues.push_back({ErrorCode::kDuplicateShotId, frame.shot_id,
                              "shot id appears more than once"});
    }
    if (frame.image_size.width <= 0 || frame.image_size.height <= 0) {
      stats.issues.push_back({ErrorCode::kDimensionMismatch, frame.shot_id,
                              "image size must be positive"});
    }
    check_view_map(frame, frame.labels, "labels", stats.issues);
    check_view_map(frame, frame.detections, "detections", stats.issues);

    for (const auto& [view, paths] : frame.disparity) {
      if (view < 1 || view > 9 || view == 5) {
        stats.issues.push_back({ErrorCode::kInvalidArgument, frame.shot_id,
                                "disparity for invalid target view " + std::to_string(view)});
      }
    }
    for (ViewpointId target : surrounding_views()) {
      const std::string tag = "disparity 5->" + std::to_string(target.index());
      auto it = frame.disparity.find(target.index());
      if (it == frame.disparity.end()) {
        stats.issues.push_back({ErrorCode::kMissingFile, frame.shot_id, tag + " not declared"});
        continue;
      }
      ++stats.disparity_maps;
      const DisparityPaths& paths = it->second;
      auto check_channel = [&](const std::string& path, bool required, const char* axis) {
        if (path.empty()) {
          if (required) {
            stats.issues.push_back({ErrorCode::kMissingFile, frame.shot_id,
                                    tag + " " + axis + " channel not declared"});
          }
          return;
        }
        if (!required) {
          stats.issues.push_back({ErrorCode::kInvalidArgument, frame.shot_id,
                                  tag + " declares a " + axis +
                                      " channel its view cannot have"});
          return;
        }
        ++stats.disparity_channels;
        if (!options.check_files) return;
        const std::size_t before = stats.issues.size();
        check_file(manifest, frame, path, tag + " " + axis, stats.issues);
        if (stats.issues.size() != before) return;
        try {
          ImageSize size = read_pfm_size(manifest.resolve(path));
          if (size != frame.image_size) {
            stats.issues.push_back(
                {ErrorCode::kDimensionMismatch, frame.shot_id,
                 tag + " " + axis + " raster is " + std::to_string(size.width) + "x" +
                     std::to_string(size.height) + ", image is " +
                     std::to_string(frame.image_size.width) + "x" +
                     std::to_string(frame.image_size.height)});
          }
        } catch (const Error& e) {
          stats.issues.push_back({e.code(), frame.shot_id, e.what()});
        }
      };
      check_channel(paths.x, target.moves_x(), "x");
      check_channel(paths.y, target.moves_y(), "y");
    }

    if (options.check_files) {
      for (const auto& [view, path] : frame.labels) {
        if (!path.empty()) {
          check_file(manifest, frame, path, "labels view " + std::to_string(view), stats.issues);
        }
      }
      for (const auto& [view, path] : frame.detections) {
        if (!path.empty()) {
          check_file(manifest, frame, path, "detections view " + std::to_string(view),
                     stats.issues);
        }
      }
    }
  }
  return stats;
}

}  // namespace kfuse
