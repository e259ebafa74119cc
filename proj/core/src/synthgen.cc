#include "kfuse/synthgen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "kfuse/fusion.h"
#include "kfuse/io.h"
#include "kfuse/parallel.h"

namespace kfuse {

std::array<std::array<double, 2>, 9> grid_baseline() {
  std::array<std::array<double, 2>, 9> out{};
  for (ViewpointId v : all_views()) {
    out[static_cast<std::size_t>(v.index() - 1)] = {static_cast<double>(v.col() - 1),
                                                     static_cast<double>(v.row() - 1)};
  }
  return out;
}

void SceneParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (image_size.width <= 0 || image_size.height <= 0) fail("image size must be positive");
  if (n_components < 0) fail("n_components must be non-negative");
  if (!(size_range.min >= 1.0 && size_range.min <= size_range.max)) {
    fail("size_range must satisfy 1 <= min <= max");
  }
  if (!(height_range.min >= 0.0 && height_range.min <= height_range.max)) {
    fail("height_range must satisfy 0 <= min <= max");
  }
  if (!(disparity_gain >= 0.0)) fail("disparity_gain must be non-negative");
  if (num_classes < 1) fail("num_classes must be at least 1");
  if (!(max_overlap_iou >= 0.0 && max_overlap_iou < 1.0)) {
    fail("max_overlap_iou must lie in [0, 1)");
  }
  if (max_attempts < 1) fail("max_attempts must be at least 1");
  if (baseline[4][0] != 0.0 || baseline[4][1] != 0.0) fail("the center view cannot move");
  for (ViewpointId v : surrounding_views()) {
    const auto& b = baseline[static_cast<std::size_t>(v.index() - 1)];
    if ((b[0] != 0.0) != v.moves_x() || (b[1] != 0.0) != v.moves_y()) {
      fail("baseline of view " + std::to_string(v.index()) +
           " does not match its grid position");
    }
  }
}

void DetectorNoise::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (!(jitter_sigma >= 0.0)) fail("jitter_sigma must be non-negative");
  if (!(miss_prob >= 0.0 && miss_prob <= 1.0)) fail("miss_prob must lie in [0, 1]");
  if (!(fp_rate >= 0.0)) fail("fp_rate must be non-negative");
  if (!(confusion_prob >= 0.0 && confusion_prob < 1.0)) fail("confusion_prob must lie in [0, 1)");
  if (!(tp_sigma >= 0.0 && fp_sigma >= 0.0)) fail("score sigmas must be non-negative");
  if (!(fp_size_range.min >= 1.0 && fp_size_range.min <= fp_size_range.max)) {
    fail("fp_size_range must satisfy 1 <= min <= max");
  }
}

DetectorNoise DetectorNoise::none() {
  DetectorNoise n;
  n.jitter_sigma = 0.0;
  n.miss_prob = 0.0;
  n.fp_rate = 0.0;
  n.confusion_prob = 0.0;
  n.tp_sigma = 0.0;
  n.fp_sigma = 0.0;
  return n;
}

std::array<float, 2> component_displacement(const SceneParams& params, ViewpointId view,
                                            double height) {
  const auto& b = params.baseline[static_cast<std::size_t>(view.index() - 1)];
  double dx = params.disparity_gain * height * b[0];
  double dy = params.disparity_gain * height * b[1];
  if (params.signs == SignConvention::kFolded) {
    dx = std::abs(dx);
    dy = std::abs(dy);
  }
  return {static_cast<float>(dx), static_cast<float>(dy)};
}

namespace {

struct PixelSpan {
  int first = 0;
  int last = -1;
};

// Pixels whose centers lie inside [lo, hi], clipped to the raster.
PixelSpan footprint(double lo, double hi, int extent) {
  PixelSpan s;
  s.first = std::max(0, static_cast<int>(std::ceil(lo)));
  s.last = std::min(extent - 1, static_cast<int>(std::floor(hi)));
  return s;
}

int center_pixel(double c, int extent) {
  return std::clamp(static_cast<int>(std::floor(c + 0.5)), 0, extent - 1);
}

bool covers(const BBox& box, int col, int row, ImageSize size) {
  const PixelSpan xs = footprint(box.left(), box.right(), size.width);
  const PixelSpan ys = footprint(box.top(), box.bottom(), size.height);
  return col >= xs.first && col <= xs.last && row >= ys.first && row <= ys.last;
}

}  // namespace

Scene generate_scene(const SceneParams& params, const std::string& shot_id) {
  params.validate();
  Rng rng(params.seed);
  const ImageSize size = params.image_size;

  double max_dx = 0.0;
  double max_dy = 0.0;
  for (const auto& b : params.baseline) {
    max_dx = std::max(max_dx, std::abs(b[0]));
    max_dy = std::max(max_dy, std::abs(b[1]));
  }
  // keep every view's box inside the frame
  const double margin_x = params.disparity_gain * params.height_range.max * max_dx + 1.0;
  const double margin_y = params.disparity_gain * params.height_range.max * max_dy + 1.0;

  Scene scene;
  scene.frame.shot_id = shot_id;
  scene.frame.image_size = size;
  for (int i = 0; i < params.n_components; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < params.max_attempts && !placed; ++attempt) {
      const double w = rng.uniform(params.size_range.min, params.size_range.max);
      const double h = rng.uniform(params.size_range.min, params.size_range.max);
      const double height = rng.uniform(params.height_range.min, params.height_range.max);
      const auto cls = static_cast<ClassId>(rng.uniform_index(params.num_classes));
      const double x_lo = margin_x + 0.5 * w;
      const double x_hi = size.width - margin_x - 0.5 * w;
      const double y_lo = margin_y + 0.5 * h;
      const double y_hi = size.height - margin_y - 0.5 * h;
      if (x_lo > x_hi || y_lo > y_hi) continue;
      const BBox box{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi), w, h};
      const int col = center_pixel(box.x, size.width);
      const int row = center_pixel(box.y, size.height);
      bool ok = true;
      for (const SceneComponent& other : scene.components) {
        const BBox& ob = other.label.box;
        if (iou(box, ob) > params.max_overlap_iou || covers(ob, col, row, size) ||
            covers(box, center_pixel(ob.x, size.width), center_pixel(ob.y, size.height),
                   size)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      scene.components.push_back({Detection{cls, box, std::nullopt}, height});
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::kPlacementFailure,
                  "placed " + std::to_string(i) + " of " + std::to_string(params.n_components) +
                      " components in " + std::to_string(size.width) + "x" +
                      std::to_string(size.height));
    }
  }

  std::vector<Detection> center;
  for (const SceneComponent& c : scene.components) center.push_back(c.label);
  scene.frame.views[ViewpointId::center()] = center;

  for (ViewpointId v : surrounding_views()) {
    DisparityField field = DisparityField::zeros(v, size);
    std::vector<Detection> labels;
    labels.reserve(scene.components.size());
    for (const SceneComponent& c : scene.components) {
      const auto d = component_displacement(params, v, c.height);
      const PixelSpan xs = footprint(c.label.box.left(), c.label.box.right(), size.width);
      const PixelSpan ys = footprint(c.label.box.top(), c.label.box.bottom(), size.height);
      for (int row = ys.first; row <= ys.last; ++row) {
        for (int col = xs.first; col <= xs.last; ++col) {
          if (field.dx) field.dx->at(col, row) = d[0];
          if (field.dy) field.dy->at(col, row) = d[1];
        }
      }
      Detection label = c.label;
      if (field.dx) label.box.x += -static_cast<double>(d[0]);
      if (field.dy) label.box.y += -static_cast<double>(d[1]);
      labels.push_back(label);
    }
    // Overlapping footprints may overwrite each other; restore every center
    // pixel so the sampled displacement is exact.
    for (const SceneComponent& c : scene.components) {
      const auto d = component_displacement(params, v, c.height);
      const int col = center_pixel(c.label.box.x, size.width);
      const int row = center_pixel(c.label.box.y, size.height);
      if (field.dx) field.dx->at(col, row) = d[0];
      if (field.dy) field.dy->at(col, row) = d[1];
    }
    scene.frame.views[v] = std::move(labels);
    scene.frame.disparities.emplace(v, std::move(field));
  }
  return scene;
}

std::vector<Detection> simulate_detector(std::span<const Detection> labels,
                                         const DetectorNoise& noise, std::size_t num_classes,
                                         ImageSize image_size, Rng& rng) {
  noise.validate();
  if (num_classes < 1) throw Error(ErrorCode::kInvalidArgument, "num_classes must be positive");
  auto clip01 = [](double s) { return std::clamp(s, 0.0, 1.0); };
  std::vector<Detection> out;
  for (const Detection& gt : labels) {
    if (rng.bernoulli(noise.miss_prob)) continue;
    Detection d = gt;
    d.box.x += rng.normal(0.0, noise.jitter_sigma);
    d.box.y += rng.normal(0.0, noise.jitter_sigma);
    d.box.w = std::max(1.0, d.box.w + rng.normal(0.0, 0.5 * noise.jitter_sigma));
    d.box.h = std::max(1.0, d.box.h + rng.normal(0.0, 0.5 * noise.jitter_sigma));
    const bool confuse = rng.bernoulli(noise.confusion_prob);
    if (confuse && num_classes > 1) {
      auto other = static_cast<ClassId>(rng.uniform_index(num_classes - 1));
      if (other >= d.class_id) ++other;
      d.class_id = other;
    }
    d.score = clip01(rng.normal(noise.tp_mean, noise.tp_sigma));
    out.push_back(d);
  }
  const std::uint64_t n_fp = rng.poisson(noise.fp_rate);
  for (std::uint64_t i = 0; i < n_fp; ++i) {
    Detection d;
    d.class_id = static_cast<ClassId>(rng.uniform_index(num_classes));
    d.box.w = rng.uniform(noise.fp_size_range.min, noise.fp_size_range.max);
    d.box.h = rng.uniform(noise.fp_size_range.min, noise.fp_size_range.max);
    d.box.x = rng.uniform(0.0, image_size.width);
    d.box.y = rng.uniform(0.0, image_size.height);
    d.score = clip01(rng.normal(noise.fp_mean, noise.fp_sigma));
    out.push_back(d);
  }
  return out;
}

std::string synthetic_shot_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "shot_%04zu", index);
  return buf;
}

SyntheticFrame generate_frame(std::size_t index, const SceneParams& params,
                              const std::optional<DetectorNoise>& noise) {
  const std::uint64_t frame_seed = derive_seed(params.seed, index);
  SceneParams scene_params = params;
  scene_params.seed = derive_seed(frame_seed, 0);
  SyntheticFrame out;
  out.scene = generate_scene(scene_params, synthetic_shot_id(index));
  if (noise) {
    for (ViewpointId v : all_views()) {
      Rng rng(derive_seed(frame_seed, static_cast<std::uint64_t>(v.index())));
      out.detections[v] = simulate_detector(out.scene.frame.views.at(v), *noise,
                                            params.num_classes, params.image_size, rng);
    }
  }
  return out;
}

namespace {

ClassTable synthetic_classes(std::size_t n) {
  const ClassTable pcb = ClassTable::pcb_components();
  if (n == pcb.size()) return pcb;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("class_" + std::to_string(i));
  return ClassTable(std::move(names));
}

}  // namespace

DatasetManifest generate_dataset(const std::filesystem::path& out_dir, std::size_t n_frames,
                                 const SceneParams& params,
                                 const std::optional<DetectorNoise>& noise,
                                 const DatasetOptions& options) {
  params.validate();
  if (noise) noise->validate();
  DatasetManifest manifest;
  manifest.class_table = synthetic_classes(params.num_classes);
  manifest.base_dir = out_dir;
  manifest.frames.resize(n_frames);

  parallel_for(n_frames, options.jobs, [&](std::size_t i) {
    const SyntheticFrame frame = generate_frame(i, params, noise);
    const std::string shot = frame.scene.frame.shot_id;
    const std::string dir = "frames/" + shot + "/";
    FrameEntry entry;
    entry.shot_id = shot;
    entry.image_size = params.image_size;
    for (const auto& [v, labels] : frame.scene.frame.views) {
      const std::string rel = dir + "labels/v" + std::to_string(v.index()) + ".jsonl";
      write_detections(labels, out_dir / rel, DetectionFormat::kJsonLines,
                       {shot, v.index(), params.image_size});
      entry.labels[v.index()] = rel;
    }
    for (const auto& [v, dets] : frame.detections) {
      const std::string rel = dir + "detections/v" + std::to_string(v.index()) + ".jsonl";
      write_detections(dets, out_dir / rel, DetectionFormat::kJsonLines,
                       {shot, v.index(), params.image_size});
      entry.detections[v.index()] = rel;
    }
    for (const auto& [v, field] : frame.scene.frame.disparities) {
      DisparityPaths paths;
      const std::string stem = dir + "disparity/v" + std::to_string(v.index());
      if (field.dx) {
        paths.x = stem + ".x.pfm";
        write_pfm(*field.dx, out_dir / paths.x);
      }
      if (field.dy) {
        paths.y = stem + ".y.pfm";
        write_pfm(*field.dy, out_dir / paths.y);
      }
      entry.disparity[v.index()] = paths;
    }
    manifest.frames[i] = std::move(entry);
  });

  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

DisparityField make_smooth_field(ViewpointId target, ImageSize size, double max_gradient,
                                 double max_offset, Rng& rng) {
  DisparityField field = DisparityField::zeros(target, size);
  auto fill = [&](Raster& raster) {
    // split the gradient budget between the linear and sinusoidal parts
    const double linear_budget = rng.uniform(0.0, max_gradient);
    const double share = rng.uniform();
    const double gx = (rng.bernoulli(0.5) ? 1 : -1) * linear_budget * share;
    const double gy = (rng.bernoulli(0.5) ? 1 : -1) * linear_budget * (1.0 - share);
    const double fx = rng.uniform(0.005, 0.05);
    const double fy = rng.uniform(0.005, 0.05);
    const double amp = (max_gradient - linear_budget) / (fx + fy);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double offset = rng.uniform(-max_offset, max_offset);
    const double cx = 0.5 * size.width;
    const double cy = 0.5 * size.height;
    for (int row = 0; row < size.height; ++row) {
      for (int col = 0; col < size.width; ++col) {
        raster.at(col, row) = static_cast<float>(
            offset + gx * (col - cx) + gy * (row - cy) +
            amp * std::sin(fx * col + fy * row + phase));
      }
    }
  };
  if (field.dx) fill(*field.dx);
  if (field.dy) fill(*field.dy);
  return field;
}

}  // namespace kfuse
