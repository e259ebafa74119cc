#pragma once

// Disparity-driven box transport between the center view and the eight
// surrounding views.
//
//   forward  (center -> v):  (x, y) -> (x - m, y - n)
//   backward (v -> center):  (x, y) -> (x + m, y + n)
//
// where (m, n) is the displacement read from the center->v disparity field
// at the single pixel nearest the box center. Width, height, class and
// score are never changed by a box warp.

#include <span>
#include <vector>

#include "kfuse/model.h"

namespace kfuse {

enum class BorderMode {
  kDropIfCenterOutside,
  kClipToFrame,
};

enum class BackwardMode {
  kDirectAdd,
  kFixedPoint,
};

struct WarpPolicy {
  // Apply max(0, d) to each sampled displacement component.
  bool clamp_nonnegative = true;
  BorderMode border_mode = BorderMode::kClipToFrame;
  BackwardMode backward_mode = BackwardMode::kDirectAdd;
  int max_iters = 50;   // fixed-point only
  double tol = 1e-6;    // fixed-point only, pixels

  // Throws kInvalidArgument unless max_iters >= 1 and tol > 0.
  void validate() const;

  // Label generalization defaults: clamp on, clip to frame.
  static WarpPolicy labeling() { return {}; }
  // Inference defaults: boxes whose center leaves the frame are dropped.
  static WarpPolicy inference() {
    WarpPolicy p;
    p.border_mode = BorderMode::kDropIfCenterOutside;
    return p;
  }
};

struct Displacement {
  double m = 0.0;
  double n = 0.0;

  bool operator==(const Displacement&) const = default;
};

// Nearest raster pixel to `(x, y)`, clamped into the raster. Total for every
// finite point.
Displacement sample_displacement(const DisparityField& field, double x, double y,
                                 const WarpPolicy& policy);

Detection forward_warp_box(const Detection& det, const DisparityField& field,
                           const WarpPolicy& policy);

// Throws kNonConvergence when fixed-point iteration exceeds max_iters.
Detection backward_warp_box(const Detection& det, const DisparityField& field,
                            const WarpPolicy& policy);

enum class BorderAction { kDropped, kClipped };

// Marks a box the border policy changed so a reviewer can check it.
struct BorderFlag {
  std::size_t index = 0;  // position in the input set
  BorderAction action = BorderAction::kDropped;
  Detection warped;       // before border handling
};

struct WarpedSet {
  std::vector<Detection> boxes;
  std::vector<BorderFlag> flags;
};

// Applies `policy.border_mode` to a warped box. Returns nothing when the box
// is dropped.
std::optional<Detection> apply_border(const Detection& warped, ImageSize image,
                                      BorderMode mode, bool* changed);

WarpedSet forward_warp_set(std::span<const Detection> boxes, const DisparityField& field,
                           ImageSize image, const WarpPolicy& policy);

WarpedSet backward_warp_set(std::span<const Detection> boxes, const DisparityField& field,
                            ImageSize image, const WarpPolicy& policy);

}  // namespace kfuse
