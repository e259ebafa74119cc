#include "kfuse/eval.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "kfuse/fusion.h"
#include "kfuse/random.h"

namespace kfuse {

std::vector<MatchRecord> match_detections(const FrameDetections& preds,
                                          const FrameDetections& gts, double iou_thr) {
  if (preds.frame_id != gts.frame_id) {
    throw Error(ErrorCode::kMixedFrameInput,
                "predictions for '" + preds.frame_id + "' matched against ground truth of '" +
                    gts.frame_id + "'");
  }
  std::vector<std::size_t> order(preds.dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i : order) {
    if (!preds.dets[i].score) {
      throw Error(ErrorCode::kMissingScore, "frame '" + preds.frame_id + "' prediction " +
                                                std::to_string(i) + " has no score");
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *preds.dets[a].score > *preds.dets[b].score;
  });

  std::vector<bool> matched(gts.dets.size(), false);
  std::vector<MatchRecord> records;
  records.reserve(order.size());
  for (std::size_t i : order) {
    const Detection& p = preds.dets[i];
    int best = -1;
    double best_iou = iou_thr;
    for (std::size_t g = 0; g < gts.dets.size(); ++g) {
      if (matched[g] || gts.dets[g].class_id != p.class_id) continue;
      const double overlap = iou(p.box, gts.dets[g].box);
      if (overlap >= best_iou && (best < 0 || overlap > best_iou)) {
        best_iou = overlap;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) matched[static_cast<std::size_t>(best)] = true;
    records.push_back({p.class_id, *p.score, best >= 0, preds.frame_id, i});
  }
  return records;
}

bool ranks_before(const MatchRecord& a, const MatchRecord& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
  return a.index < b.index;
}

double average_precision(std::span<const MatchRecord> records, std::size_t gt_count) {
  if (gt_count == 0) {
    throw Error(ErrorCode::kZeroGroundTruth, "average precision needs at least one ground truth");
  }
  std::vector<const MatchRecord*> ranked;
  ranked.reserve(records.size());
  for (const MatchRecord& r : records) ranked.push_back(&r);
  std::sort(ranked.begin(), ranked.end(),
            [](const MatchRecord* a, const MatchRecord* b) { return ranks_before(*a, *b); });

  const std::size_t n = ranked.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ranked[i]->is_tp) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(gt_count);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n; i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  constexpr int kRecallLevels = 101;
  double sum = 0.0;
  for (int t = 0; t < kRecallLevels; ++t) {
    const double level = t / 100.0;
    auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / kRecallLevels;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> out;
  const double step = (0.95 - 0.5) / 9.0;
  for (int i = 0; i < 10; ++i) out.push_back(0.5 + i * step);
  return out;
}

EvalAccumulator::EvalAccumulator(ClassTable classes, EvalConfig config)
    : classes_(std::move(classes)), config_(std::move(config)) {
  if (config_.thresholds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one IoU threshold is required");
  }
  auto it = std::find(config_.thresholds.begin(), config_.thresholds.end(), 0.5);
  if (it == config_.thresholds.end()) {
    throw Error(ErrorCode::kInvalidArgument, "IoU thresholds must include 0.5");
  }
  primary_ = static_cast<std::size_t>(it - config_.thresholds.begin());
  records_.resize(config_.thresholds.size());
  gt_counts_.assign(classes_.size(), 0);
  pred_counts_.assign(classes_.size(), 0);
}

void EvalAccumulator::add_frame(const FrameDetections& preds, const FrameDetections& gts) {
  for (const Detection& d : preds.dets) {
    if (!classes_.contains(d.class_id)) {
      throw Error(ErrorCode::kRangeError, "frame '" + preds.frame_id + "' prediction class " +
                                              std::to_string(d.class_id) + " not in class table");
    }
  }
  for (const Detection& d : gts.dets) {
    if (!classes_.contains(d.class_id)) {
      throw Error(ErrorCode::kRangeError, "frame '" + gts.frame_id + "' label class " +
                                              std::to_string(d.class_id) + " not in class table");
    }
  }
  for (std::size_t t = 0; t < config_.thresholds.size(); ++t) {
    auto recs = match_detections(preds, gts, config_.thresholds[t]);
    records_[t].insert(records_[t].end(), recs.begin(), recs.end());
  }
  for (const Detection& d : gts.dets) ++gt_counts_[static_cast<std::size_t>(d.class_id)];
  for (const Detection& d : preds.dets) ++pred_counts_[static_cast<std::size_t>(d.class_id)];
}

void EvalAccumulator::merge(const EvalAccumulator& other) {
  if (other.classes_ != classes_) {
    throw Error(ErrorCode::kClassTableMismatch, "cannot merge accumulators of different classes");
  }
  if (other.config_.thresholds != config_.thresholds || other.config_.conf != config_.conf) {
    throw Error(ErrorCode::kInvalidArgument, "cannot merge accumulators of different configs");
  }
  for (std::size_t t = 0; t < records_.size(); ++t) {
    records_[t].insert(records_[t].end(), other.records_[t].begin(), other.records_[t].end());
  }
  for (std::size_t c = 0; c < gt_counts_.size(); ++c) {
    gt_counts_[c] += other.gt_counts_[c];
    pred_counts_[c] += other.pred_counts_[c];
  }
}

EvalReport EvalAccumulator::finalize() const {
  EvalReport report;
  report.classes = classes_;
  const std::size_t num_classes = classes_.size();
  const std::size_t num_thresholds = config_.thresholds.size();

  // records split per class and threshold
  std::vector<std::vector<std::vector<MatchRecord>>> by_class(
      num_classes, std::vector<std::vector<MatchRecord>>(num_thresholds));
  for (std::size_t t = 0; t < num_thresholds; ++t) {
    for (const MatchRecord& r : records_[t]) {
      by_class[static_cast<std::size_t>(r.class_id)][t].push_back(r);
    }
  }

  double sum50 = 0.0;
  double sum_all = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    ClassMetrics m;
    m.gts = gt_counts_[c];
    m.preds = pred_counts_[c];
    if (m.gts > 0) {
      double mean = 0.0;
      for (std::size_t t = 0; t < num_thresholds; ++t) {
        const double ap = average_precision(by_class[c][t], m.gts);
        if (t == primary_) m.ap50 = ap;
        mean += ap;
      }
      m.ap50_95 = mean / static_cast<double>(num_thresholds);
      sum50 += *m.ap50;
      sum_all += *m.ap50_95;
      ++counted;
    }
    report.per_class[static_cast<ClassId>(c)] = m;
  }
  if (counted > 0) {
    report.map50 = sum50 / static_cast<double>(counted);
    report.map50_95 = sum_all / static_cast<double>(counted);
  }

  std::size_t tp = 0;
  std::size_t considered = 0;
  for (const MatchRecord& r : records_[primary_]) {
    if (config_.conf && r.score < *config_.conf) continue;
    ++considered;
    if (r.is_tp) ++tp;
  }
  const std::size_t total_gts = std::accumulate(gt_counts_.begin(), gt_counts_.end(),
                                                std::size_t{0});
  report.precision = considered ? static_cast<double>(tp) / static_cast<double>(considered) : 0.0;
  report.recall = total_gts ? static_cast<double>(tp) / static_cast<double>(total_gts) : 0.0;
  return report;
}

EvalReport evaluate(std::span<const FrameDetections> preds,
                    std::span<const FrameDetections> gts, const ClassTable& classes,
                    const EvalConfig& config) {
  std::map<std::string, const FrameDetections*> gt_by_id;
  for (const FrameDetections& g : gts) {
    if (!gt_by_id.emplace(g.frame_id, &g).second) {
      throw Error(ErrorCode::kFrameIdMismatch, "ground truth lists frame '" + g.frame_id +
                                                   "' twice");
    }
  }
  std::set<std::string> seen;
  for (const FrameDetections& p : preds) {
    if (!seen.insert(p.frame_id).second) {
      throw Error(ErrorCode::kFrameIdMismatch, "predictions list frame '" + p.frame_id +
                                                   "' twice");
    }
    if (!gt_by_id.count(p.frame_id)) {
      throw Error(ErrorCode::kFrameIdMismatch,
                  "predictions for frame '" + p.frame_id + "' have no ground truth");
    }
  }
  for (const auto& [id, g] : gt_by_id) {
    if (!seen.count(id)) {
      throw Error(ErrorCode::kFrameIdMismatch,
                  "ground truth frame '" + id + "' has no predictions");
    }
  }
  EvalAccumulator acc(classes, config);
  for (const FrameDetections& p : preds) acc.add_frame(p, *gt_by_id.at(p.frame_id));
  return acc.finalize();
}

std::vector<std::vector<std::string>> FoldSpec::folds() const {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(std::max(k, 0)));
  for (const auto& [shot, fold] : assignment) out[static_cast<std::size_t>(fold)].push_back(shot);
  return out;
}

FoldSpec kfold_split(std::span<const std::string> shot_ids, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be at least 2");
  std::vector<std::string> shots(shot_ids.begin(), shot_ids.end());
  std::sort(shots.begin(), shots.end());
  if (std::adjacent_find(shots.begin(), shots.end()) != shots.end()) {
    throw Error(ErrorCode::kInvalidArgument, "shot ids must be unique");
  }
  if (static_cast<std::size_t>(k) > shots.size()) {
    throw Error(ErrorCode::kTooFewShots, "cannot split " + std::to_string(shots.size()) +
                                             " shots into " + std::to_string(k) + " folds");
  }
  Rng rng(seed);
  for (std::size_t i = shots.size(); i-- > 1;) {
    std::swap(shots[i], shots[rng.uniform_index(i + 1)]);
  }
  FoldSpec spec;
  spec.k = k;
  spec.seed = seed;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    spec.assignment[shots[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return spec;
}

FoldSpec kfold_split(const DatasetManifest& manifest, int k, std::uint64_t seed) {
  const std::vector<std::string> ids = manifest.shot_ids();
  return kfold_split(std::span<const std::string>(ids), k, seed);
}

EvalReport aggregate_folds(std::span<const EvalReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "no reports to aggregate");
  EvalReport out;
  out.classes = reports.front().classes;
  out.folds = 0;
  struct Sums {
    double ap50 = 0.0;
    double ap50_95 = 0.0;
    std::size_t defined = 0;
  };
  std::map<ClassId, Sums> sums;
  for (const EvalReport& r : reports) {
    if (r.classes != out.classes) {
      throw Error(ErrorCode::kClassTableMismatch, "fold reports use different class tables");
    }
    out.precision += r.precision;
    out.recall += r.recall;
    out.map50 += r.map50;
    out.map50_95 += r.map50_95;
    out.folds += r.folds;
    for (const auto& [cls, m] : r.per_class) {
      ClassMetrics& agg = out.per_class[cls];
      agg.gts += m.gts;
      agg.preds += m.preds;
      if (m.ap50 && m.ap50_95) {
        Sums& s = sums[cls];
        s.ap50 += *m.ap50;
        s.ap50_95 += *m.ap50_95;
        ++s.defined;
      }
    }
  }
  const double n = static_cast<double>(reports.size());
  out.precision /= n;
  out.recall /= n;
  out.map50 /= n;
  out.map50_95 /= n;
  for (const auto& [cls, s] : sums) {
    out.per_class[cls].ap50 = s.ap50 / static_cast<double>(s.defined);
    out.per_class[cls].ap50_95 = s.ap50_95 / static_cast<double>(s.defined);
  }
  return out;
}

}  // namespace kfuse
