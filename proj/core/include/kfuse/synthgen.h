#pragma once

// Synthetic kaleidoscopic scenes and a noisy detector. Scenes are built so
// that forward warping the center labels reproduces every view's labels
// exactly: each component's displacement is constant over its footprint in
// the disparity rasters, and no component's center pixel lies in another
// component's footprint.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "kfuse/model.h"
#include "kfuse/random.h"

namespace kfuse {

enum class SignConvention {
  kSigned,  // opposite views get opposite displacements
  kFolded,  // displacement magnitudes only, so max(0, d) is a no-op
};

struct Range {
  double min = 0.0;
  double max = 0.0;
};

// Grid direction of each view, indexed by view index - 1: columns map to
// x in {-1, 0, +1}, rows to y in {-1, 0, +1}.
std::array<std::array<double, 2>, 9> grid_baseline();

struct SceneParams {
  ImageSize image_size{640, 416};
  int n_components = 20;
  Range size_range{16.0, 64.0};   // pixels
  Range height_range{0.5, 3.0};   // scene units
  std::array<std::array<double, 2>, 9> baseline = grid_baseline();
  double disparity_gain = 2.0;    // pixels per scene unit
  std::size_t num_classes = 11;
  SignConvention signs = SignConvention::kSigned;
  double max_overlap_iou = 0.3;
  int max_attempts = 2000;        // per component
  std::uint64_t seed = 0;

  void validate() const;
};

struct DetectorNoise {
  double jitter_sigma = 2.0;      // pixels, centers; sizes use half of it
  double miss_prob = 0.3;
  double fp_rate = 1.0;           // expected false positives per view
  double confusion_prob = 0.05;
  double tp_mean = 0.8;
  double tp_sigma = 0.1;
  double fp_mean = 0.35;
  double fp_sigma = 0.15;
  Range fp_size_range{16.0, 64.0};

  void validate() const;
  static DetectorNoise none();
};

struct SceneComponent {
  Detection label;  // center view
  double height = 0.0;
};

struct Scene {
  KaleidoFrame frame;  // ground-truth labels in all nine views
  std::vector<SceneComponent> components;
};

// Displacement of a component of `height` in `view` under `params`, rounded
// to float as stored in the rasters.
std::array<float, 2> component_displacement(const SceneParams& params, ViewpointId view,
                                            double height);

// Throws kPlacementFailure when the components cannot be placed.
Scene generate_scene(const SceneParams& params, const std::string& shot_id = "shot_0000");

// Drops, jitters, confuses and scores ground-truth boxes, then adds
// Poisson(fp_rate) false positives placed uniformly in the frame.
std::vector<Detection> simulate_detector(std::span<const Detection> labels,
                                         const DetectorNoise& noise, std::size_t num_classes,
                                         ImageSize image_size, Rng& rng);

struct SyntheticFrame {
  Scene scene;
  std::map<ViewpointId, std::vector<Detection>> detections;  // empty without noise
};

std::string synthetic_shot_id(std::size_t index);

// Frame `index` of a dataset seeded with `params.seed`. Depends only on
// (params, noise, index).
SyntheticFrame generate_frame(std::size_t index, const SceneParams& params,
                              const std::optional<DetectorNoise>& noise);

struct DatasetOptions {
  int jobs = 1;
};

// Writes `n_frames` frames and `manifest.json` under `out_dir`:
//   frames/<shot>/labels/v<k>.jsonl
//   frames/<shot>/detections/v<k>.jsonl     (with noise)
//   frames/<shot>/disparity/v<k>.<x|y>.pfm
DatasetManifest generate_dataset(const std::filesystem::path& out_dir, std::size_t n_frames,
                                 const SceneParams& params,
                                 const std::optional<DetectorNoise>& noise,
                                 const DatasetOptions& options = {});

// Smooth test field d(x, y) = c + gx*x + gy*y + s*sin(fx*x + fy*y + phase)
// per channel, with random coefficients whose gradient 1-norm stays at or
// below `max_gradient`.
DisparityField make_smooth_field(ViewpointId target, ImageSize size, double max_gradient,
                                 double max_offset, Rng& rng);

}  // namespace kfuse
