#include "kfuse/fusion.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace kfuse {

std::string_view method_name(FusionMethod method) {
  switch (method) {
    case FusionMethod::kWbf: return "wbf";
    case FusionMethod::kNmw: return "nmw";
    case FusionMethod::kNms: return "nms";
  }
  return "wbf";
}

std::optional<FusionMethod> parse_method_name(std::string_view name) {
  if (name == "wbf") return FusionMethod::kWbf;
  if (name == "nmw") return FusionMethod::kNmw;
  if (name == "nms") return FusionMethod::kNms;
  return std::nullopt;
}

void FusionParams::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "iou_threshold must lie in (0, 1]");
  }
  if (!(skip_score_threshold >= 0.0 && skip_score_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "skip_score_threshold must lie in [0, 1)");
  }
  if (num_models < 1) {
    throw Error(ErrorCode::kInvalidArgument, "num_models must be at least 1");
  }
  if (!(intermix_match_iou >= 0.0 && intermix_match_iou <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "intermix_match_iou must lie in [0, 1]");
  }
}

double iou(const BBox& a, const BBox& b) {
  const double ax1 = a.left(), ax2 = a.right(), ay1 = a.top(), ay2 = a.bottom();
  const double bx1 = b.left(), bx2 = b.right(), by1 = b.top(), by2 = b.bottom();
  const double iw = std::min(ax2, bx2) - std::max(ax1, bx1);
  const double ih = std::min(ay2, by2) - std::max(ay1, by1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  // Areas from the same corner arithmetic so identical boxes give exactly 1.
  const double uni = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

namespace {

struct Candidate {
  Detection det;
  int model = 0;
};

double score_of(const Candidate& c) { return *c.det.score; }

// Pools candidates and groups them per class, each group ranked by score
// (stable). Throws kMissingScore.
std::map<ClassId, std::vector<Candidate>> rank_by_class(
    std::span<const std::vector<Detection>> per_model, double skip_below) {
  std::map<ClassId, std::vector<Candidate>> groups;
  for (std::size_t m = 0; m < per_model.size(); ++m) {
    for (std::size_t i = 0; i < per_model[m].size(); ++i) {
      const Detection& d = per_model[m][i];
      if (!d.score) {
        throw Error(ErrorCode::kMissingScore,
                    "detection " + std::to_string(i) + " of model " + std::to_string(m) +
                        " has no score");
      }
      if (*d.score < skip_below) continue;
      groups[d.class_id].push_back({d, static_cast<int>(m)});
    }
  }
  for (auto& [cls, group] : groups) {
    std::stable_sort(group.begin(), group.end(), [](const Candidate& a, const Candidate& b) {
      return score_of(a) > score_of(b);
    });
  }
  return groups;
}

std::vector<int> sorted_sources(const std::vector<const Candidate*>& members) {
  std::set<int> s;
  for (const Candidate* c : members) s.insert(c->model);
  return {s.begin(), s.end()};
}

// Weighted mean of member boxes, taken as offsets from the first member so
// that identical members reproduce it bit for bit. Falls back to the
// unweighted mean when all weights are zero.
BBox weighted_box(const std::vector<const Candidate*>& members,
                  const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const bool uniform = !(total > 0.0);
  if (uniform) total = static_cast<double>(members.size());
  const BBox& base = members.front()->det.box;
  double dx = 0.0, dy = 0.0, dw = 0.0, dh = 0.0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    const double w = uniform ? 1.0 : weights[i];
    const BBox& b = members[i]->det.box;
    dx += w * (b.x - base.x);
    dy += w * (b.y - base.y);
    dw += w * (b.w - base.w);
    dh += w * (b.h - base.h);
  }
  return {base.x + dx / total, base.y + dy / total, base.w + dw / total, base.h + dh / total};
}

double mean_score(const std::vector<const Candidate*>& members) {
  const double base = score_of(*members.front());
  double delta = 0.0;
  for (std::size_t i = 1; i < members.size(); ++i) delta += score_of(*members[i]) - base;
  return base + delta / static_cast<double>(members.size());
}

std::vector<FusedBox> nms_ranked(const std::map<ClassId, std::vector<Candidate>>& groups,
                                 double iou_thr) {
  std::vector<FusedBox> out;
  for (const auto& [cls, group] : groups) {
    std::vector<bool> removed(group.size(), false);
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (removed[i]) continue;
      std::vector<const Candidate*> members{&group[i]};
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if (!removed[j] && iou(group[i].det.box, group[j].det.box) > iou_thr) {
          removed[j] = true;
          members.push_back(&group[j]);
        }
      }
      out.push_back({group[i].det, static_cast<int>(members.size()), sorted_sources(members)});
    }
  }
  return out;
}

std::vector<FusedBox> nmw_ranked(const std::map<ClassId, std::vector<Candidate>>& groups,
                                 double iou_thr) {
  std::vector<FusedBox> out;
  for (const auto& [cls, group] : groups) {
    std::vector<bool> used(group.size(), false);
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      const Candidate& top = group[i];
      std::vector<const Candidate*> members{&top};
      std::vector<double> weights{score_of(top)};
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if (used[j]) continue;
        const double overlap = iou(top.det.box, group[j].det.box);
        if (overlap > iou_thr) {
          used[j] = true;
          members.push_back(&group[j]);
          weights.push_back(score_of(group[j]) * overlap);
        }
      }
      Detection fused = top.det;
      fused.box = weighted_box(members, weights);
      out.push_back({fused, static_cast<int>(members.size()), sorted_sources(members)});
    }
  }
  return out;
}

double rescale(double score, int cluster_size, int num_models, ConfRescale mode) {
  switch (mode) {
    case ConfRescale::kMinCountOverN:
      return score * (static_cast<double>(std::min(cluster_size, num_models)) / num_models);
    case ConfRescale::kCountOverN:
      return std::min(1.0, score * (static_cast<double>(cluster_size) / num_models));
    case ConfRescale::kNone:
      return score;
  }
  return score;
}

std::vector<FusedBox> wbf_ranked(const std::map<ClassId, std::vector<Candidate>>& groups,
                                 const FusionParams& params) {
  struct Cluster {
    std::vector<const Candidate*> members;
    BBox box;
  };
  std::vector<FusedBox> out;
  for (const auto& [cls, group] : groups) {
    std::vector<Cluster> clusters;
    for (const Candidate& cand : group) {
      int best = -1;
      double best_iou = params.iou_threshold;
      for (std::size_t j = 0; j < clusters.size(); ++j) {
        const double overlap = iou(clusters[j].box, cand.det.box);
        if (overlap > best_iou) {
          best_iou = overlap;
          best = static_cast<int>(j);
        }
      }
      if (best < 0) {
        clusters.push_back({{&cand}, cand.det.box});
        continue;
      }
      Cluster& c = clusters[static_cast<std::size_t>(best)];
      c.members.push_back(&cand);
      std::vector<double> weights;
      weights.reserve(c.members.size());
      for (const Candidate* m : c.members) weights.push_back(score_of(*m));
      c.box = weighted_box(c.members, weights);
    }
    for (const Cluster& c : clusters) {
      const int t = static_cast<int>(c.members.size());
      Detection fused = c.members.front()->det;
      fused.box = c.box;
      fused.score = rescale(mean_score(c.members), t, params.num_models, params.conf_rescale);
      out.push_back({fused, t, sorted_sources(c.members)});
    }
  }
  return out;
}

void check_threshold(double iou_thr) {
  if (!(iou_thr > 0.0 && iou_thr <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "IoU threshold must lie in (0, 1]");
  }
}

}  // namespace

std::vector<Detection> nms(std::span<const Detection> dets, double iou_thr) {
  check_threshold(iou_thr);
  const std::vector<Detection> single(dets.begin(), dets.end());
  const auto groups = rank_by_class(std::span(&single, 1), 0.0);
  std::vector<Detection> out;
  for (const FusedBox& f : nms_ranked(groups, iou_thr)) out.push_back(f.detection);
  return out;
}

std::vector<FusedBox> nmw(std::span<const Detection> dets, double iou_thr) {
  check_threshold(iou_thr);
  const std::vector<Detection> single(dets.begin(), dets.end());
  return nmw_ranked(rank_by_class(std::span(&single, 1), 0.0), iou_thr);
}

std::vector<FusedBox> wbf(std::span<const std::vector<Detection>> per_model,
                          const FusionParams& params) {
  return fuse(per_model, FusionMethod::kWbf, params);
}

std::vector<FusedBox> fuse(std::span<const std::vector<Detection>> per_model,
                           FusionMethod method, const FusionParams& params) {
  params.validate();
  if (per_model.size() != static_cast<std::size_t>(params.num_models)) {
    throw Error(ErrorCode::kModelCountMismatch,
                "expected " + std::to_string(params.num_models) + " model lists, got " +
                    std::to_string(per_model.size()));
  }
  const auto groups = rank_by_class(per_model, params.skip_score_threshold);
  switch (method) {
    case FusionMethod::kWbf: return wbf_ranked(groups, params);
    case FusionMethod::kNmw: return nmw_ranked(groups, params.iou_threshold);
    case FusionMethod::kNms: return nms_ranked(groups, params.iou_threshold);
  }
  return {};
}

std::vector<Detection> intermix(std::span<const FusedBox> fused,
                                std::span<const Detection> center, double match_iou) {
  std::vector<std::size_t> order(fused.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto score = [&](std::size_t i) { return fused[i].detection.score.value_or(0.0); };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score(a) > score(b); });

  std::vector<bool> taken(center.size(), false);
  std::vector<Detection> out(fused.size());
  for (std::size_t i : order) {
    const Detection& f = fused[i].detection;
    int best = -1;
    double best_iou = match_iou;
    for (std::size_t j = 0; j < center.size(); ++j) {
      if (taken[j] || center[j].class_id != f.class_id) continue;
      const double overlap = iou(f.box, center[j].box);
      if (overlap > best_iou) {
        best_iou = overlap;
        best = static_cast<int>(j);
      }
    }
    out[i] = f;
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      out[i].box = center[static_cast<std::size_t>(best)].box;
    }
  }
  return out;
}

MvInferStages mv_infer_stages(const KaleidoFrame& frame, const MvInferParams& params) {
  params.fusion.validate();
  params.warp.validate();
  const auto context = [&](ViewpointId v) {
    return "frame '" + frame.shot_id + "' view " + std::to_string(v.index()) + ": ";
  };

  MvInferStages stages;
  stages.aligned.resize(9);
  for (ViewpointId v : all_views()) {
    auto it = frame.views.find(v);
    if (it == frame.views.end()) {
      throw Error(ErrorCode::kInvalidArgument, context(v) + "no detections");
    }
    const std::vector<Detection>& dets = it->second;
    for (const Detection& d : dets) {
      if (!d.score) throw Error(ErrorCode::kMissingScore, context(v) + "unscored detection");
    }
    auto& aligned = stages.aligned[static_cast<std::size_t>(v.index() - 1)];
    if (v.is_center()) {
      aligned = dets;
      continue;
    }
    const DisparityField& field = frame.disparity(v);
    try {
      aligned = backward_warp_set(dets, field, frame.image_size, params.warp).boxes;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonConvergence || !params.fallback_to_direct_add) {
        throw Error(e.code(), context(v) + e.message(), e.line(), e.field());
      }
      WarpPolicy direct = params.warp;
      direct.backward_mode = BackwardMode::kDirectAdd;
      aligned.clear();
      for (const Detection& d : dets) {
        Detection w;
        try {
          w = backward_warp_box(d, field, params.warp);
        } catch (const Error&) {
          w = backward_warp_box(d, field, direct);
        }
        if (auto kept = apply_border(w, frame.image_size, params.warp.border_mode, nullptr)) {
          aligned.push_back(*kept);
        }
      }
    }
  }

  FusionParams fusion = params.fusion;
  fusion.num_models = 9;
  try {
    stages.fused = fuse(stages.aligned, params.method, fusion);
  } catch (const Error& e) {
    throw Error(e.code(), "frame '" + frame.shot_id + "': " + e.message());
  }
  stages.output = intermix(stages.fused, stages.aligned[4], fusion.intermix_match_iou);
  return stages;
}

std::vector<Detection> mv_infer(const KaleidoFrame& frame, const MvInferParams& params) {
  return mv_infer_stages(frame, params).output;
}

}  // namespace kfuse
