#pragma once

// COCO-style detection metrics and the shot-grouped k-fold protocol.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kfuse/model.h"

namespace kfuse {

struct FrameDetections {
  std::string frame_id;
  std::vector<Detection> dets;
};

// Outcome of one prediction at one IoU threshold. `index` is the
// prediction's position in its frame's input list; together with the frame
// id it breaks score ties so pooled rankings never depend on merge order.
struct MatchRecord {
  ClassId class_id = 0;
  double score = 0.0;
  bool is_tp = false;
  std::string frame_id;
  std::size_t index = 0;

  bool operator==(const MatchRecord&) const = default;
};

// Per class, predictions in descending score order each take the unmatched
// same-class ground truth of highest IoU >= iou_thr (a true positive);
// otherwise they are false positives. Throws kMixedFrameInput when the
// frame ids differ and kMissingScore for unscored predictions.
std::vector<MatchRecord> match_detections(const FrameDetections& preds,
                                          const FrameDetections& gts, double iou_thr);

// Ranking order used for every precision/recall curve.
bool ranks_before(const MatchRecord& a, const MatchRecord& b);

// 101-point interpolated AP over records of a single class and threshold:
// the mean, over recall levels 0, 0.01, ..., 1, of the highest precision
// reached at any recall at or above the level. Throws kZeroGroundTruth.
double average_precision(std::span<const MatchRecord> records, std::size_t gt_count);

// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

struct EvalConfig {
  std::vector<double> thresholds = coco_iou_thresholds();
  // Precision and recall count only predictions scoring at least this.
  std::optional<double> conf;
};

struct ClassMetrics {
  std::size_t gts = 0;
  std::size_t preds = 0;
  std::optional<double> ap50;     // absent when the class has no ground truth
  std::optional<double> ap50_95;

  bool operator==(const ClassMetrics&) const = default;
};

struct EvalReport {
  ClassTable classes;
  std::map<ClassId, ClassMetrics> per_class;  // every class in the table
  double precision = 0.0;
  double recall = 0.0;
  double map50 = 0.0;
  double map50_95 = 0.0;
  std::size_t folds = 1;

  bool operator==(const EvalReport&) const = default;
};

// Mergeable pool of match records. Merging is associative and
// commutative: the final ranking is fully determined by the records.
class EvalAccumulator {
 public:
  explicit EvalAccumulator(ClassTable classes, EvalConfig config = {});

  void add_frame(const FrameDetections& preds, const FrameDetections& gts);
  void merge(const EvalAccumulator& other);
  EvalReport finalize() const;

  const std::vector<std::vector<MatchRecord>>& records() const { return records_; }

 private:
  ClassTable classes_;
  EvalConfig config_;
  std::size_t primary_ = 0;  // index of the 0.5 threshold
  std::vector<std::vector<MatchRecord>> records_;  // one list per threshold
  std::vector<std::size_t> gt_counts_;
  std::vector<std::size_t> pred_counts_;
};

// Pairs frames by id and pools all records corpus-wide. Throws
// kFrameIdMismatch when the two sides name different frames.
EvalReport evaluate(std::span<const FrameDetections> preds,
                    std::span<const FrameDetections> gts, const ClassTable& classes,
                    const EvalConfig& config = {});

struct FoldSpec {
  int k = 0;
  std::uint64_t seed = 0;
  std::map<std::string, int> assignment;  // shot id -> fold

  std::vector<std::vector<std::string>> folds() const;
};

// Seeded shuffle of the shot ids, dealt round-robin into k folds. Throws
// kTooFewShots when k exceeds the number of shots and kInvalidArgument for
// k < 2 or duplicate shot ids.
FoldSpec kfold_split(std::span<const std::string> shot_ids, int k, std::uint64_t seed);
FoldSpec kfold_split(const DatasetManifest& manifest, int k, std::uint64_t seed);

// Unweighted mean of every metric across folds; a class AP is averaged over
// the folds where it is defined. Throws kClassTableMismatch.
EvalReport aggregate_folds(std::span<const EvalReport> reports);

}  // namespace kfuse
