#pragma once

// Ensemble box fusion for multi-view inference.
//
// All operations work per class and never fuse across classes. Candidates
// are ranked by score, descending; equal scores keep their input order (for
// multi-model input: model order, then position within the model's list).
// Outputs are grouped by ascending class id, each group in ranking order.

#include <span>
#include <vector>

#include "kfuse/model.h"
#include "kfuse/warp.h"

namespace kfuse {

enum class ConfRescale {
  kMinCountOverN,  // s * min(T, N) / N
  kCountOverN,     // min(1, s * T / N)
  kNone,
};

enum class FusionMethod { kWbf, kNmw, kNms };

std::string_view method_name(FusionMethod method);
std::optional<FusionMethod> parse_method_name(std::string_view name);

struct FusionParams {
  double iou_threshold = 0.55;         // (0, 1]
  double skip_score_threshold = 0.0;   // [0, 1); lower scores are discarded
  int num_models = 1;                  // N
  ConfRescale conf_rescale = ConfRescale::kMinCountOverN;
  double intermix_match_iou = 0.5;

  void validate() const;
};

struct FusedBox {
  Detection detection;
  int cluster_size = 1;              // T
  std::vector<int> source_models;    // sorted, unique model indices

  bool operator==(const FusedBox&) const = default;
};

// Intersection over union; 0 for disjoint boxes, 1 for identical ones.
double iou(const BBox& a, const BBox& b);

// Greedy suppression: keep the best remaining box, drop same-class boxes
// with IoU > iou_thr against it. Throws kMissingScore.
std::vector<Detection> nms(std::span<const Detection> dets, double iou_thr);

// Non-maximum weighted: each cluster (IoU > iou_thr with its top box) is
// averaged with weights score * IoU(member, top); the fused score is the top
// box's score. Throws kMissingScore.
std::vector<FusedBox> nmw(std::span<const Detection> dets, double iou_thr);

// Weighted boxes fusion over `per_model.size() == params.num_models` lists.
// Throws kModelCountMismatch or kMissingScore.
std::vector<FusedBox> wbf(std::span<const std::vector<Detection>> per_model,
                          const FusionParams& params);

// Multi-model entry point for all three methods. NMS and NMW pool the model
// lists (after the skip threshold) and do not rescale scores.
std::vector<FusedBox> fuse(std::span<const std::vector<Detection>> per_model,
                           FusionMethod method, const FusionParams& params);

// Replaces each fused box's coordinates with those of its matched
// center-view detection, keeping class and score. Fused boxes are visited by
// descending score and take the unused same-class center box of highest
// IoU > match_iou. Unmatched fused boxes keep their own coordinates. The
// output has one entry per fused box, in input order.
std::vector<Detection> intermix(std::span<const FusedBox> fused,
                                std::span<const Detection> center, double match_iou);

struct MvInferParams {
  FusionMethod method = FusionMethod::kWbf;
  FusionParams fusion = [] {
    FusionParams p;
    p.num_models = 9;
    return p;
  }();
  WarpPolicy warp = WarpPolicy::inference();
  // Retry with direct_add when fixed-point backward warping fails.
  bool fallback_to_direct_add = true;
};

struct MvInferStages {
  std::vector<std::vector<Detection>> aligned;  // index i holds view i + 1
  std::vector<FusedBox> fused;                  // source_models hold view indices - 1
  std::vector<Detection> output;
};

// Backward-warps views 1-4 and 6-9 into center coordinates, fuses the nine
// aligned sets and intermixes the result with the raw center detections.
MvInferStages mv_infer_stages(const KaleidoFrame& frame, const MvInferParams& params);

std::vector<Detection> mv_infer(const KaleidoFrame& frame, const MvInferParams& params);

}  // namespace kfuse
