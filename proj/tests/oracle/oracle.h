#pragma once

// Brute-force reference implementations for tests. Deliberately naive and
// written against the textbook definitions; none of this calls into the
// fusion or eval code under test.

#include <cstddef>
#include <string>
#include <vector>

#include "kfuse/model.h"

namespace kfuse::oracle {

struct Corners {
  double x1, y1, x2, y2;
};

Corners corners(const BBox& b);
double area_iou(const BBox& a, const BBox& b);

struct OracleFused {
  ClassId class_id;
  double x, y, w, h, score;
  int cluster_size;
};

// Each input list is one model; `thr` is the IoU threshold.
std::vector<OracleFused> naive_nms(const std::vector<std::vector<Detection>>& models, double thr);
std::vector<OracleFused> naive_nmw(const std::vector<std::vector<Detection>>& models, double thr);
// Rescale min(T, N)/N.
std::vector<OracleFused> naive_wbf(const std::vector<std::vector<Detection>>& models, double thr);

struct Hit {
  double score;
  bool tp;
  std::string frame;
  std::size_t index;
};

// Greedy score-ordered matching for one frame and one threshold; returns one
// Hit per prediction (all classes).
std::vector<std::pair<ClassId, Hit>> naive_match(const std::vector<Detection>& preds,
                                                 const std::vector<Detection>& gts,
                                                 double thr, const std::string& frame);

// Enumerates every point of the precision/recall curve and, for each of the
// 101 recall levels, takes the best precision at recall >= level.
double enumerated_ap(std::vector<Hit> hits, std::size_t gt_count);

struct OracleMetrics {
  double map50 = 0.0;
  double map50_95 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct OracleFrame {
  std::string id;
  std::vector<Detection> preds;
  std::vector<Detection> gts;
};

OracleMetrics naive_evaluate(const std::vector<OracleFrame>& frames, std::size_t num_classes);

}  // namespace kfuse::oracle
