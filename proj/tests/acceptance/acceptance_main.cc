// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "kfuse/eval.h"
#include "kfuse/fusion.h"
#include "kfuse/io.h"
#include "kfuse/random.h"
#include "kfuse/synthgen.h"
#include "kfuse/warp.h"
#include "oracle.h"
#include "stub_manifest.h"
#include "test_util.h"

namespace kfuse {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// Runs the CLI in-process with stdout swallowed.
int run_cli(const std::vector<std::string>& args) {
  std::ostringstream sink;
  std::streambuf* old = std::cout.rdbuf(sink.rdbuf());
  const int code = cli::run(args);
  std::cout.rdbuf(old);
  return code;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_text_file(e.path());
  }
  return out;
}

// ------------------------------------------------------------------ 1

Outcome manifest_arithmetic() {
  std::vector<std::size_t> sizes = {0, 1, 7, 105, 262};
  Rng rng(101);
  for (int i = 0; i < 20; ++i) sizes.push_back(rng.uniform_index(1000));
  for (std::size_t n : sizes) {
    const ManifestStats s = validate_manifest(testing::stub_manifest(n), {.check_files = false});
    if (!s.ok() || s.frames != n || s.view_images != 9 * n || s.disparity_channels != 12 * n) {
      return {false, fmt("n=%zu -> (%zu, %zu, %zu)", n, s.frames, s.view_images,
                         s.disparity_channels)};
    }
  }
  const ManifestStats paper = validate_manifest(testing::stub_manifest(262), {.check_files = false});
  return {true, fmt("%zu manifests give (n, 9n, 12n); 262 -> (%zu, %zu, %zu)", sizes.size(),
                    paper.frames, paper.view_images, paper.disparity_channels)};
}

// ------------------------------------------------------------------ 2

Detection random_box(Rng& rng, ImageSize size) {
  return testing::det(static_cast<int>(rng.uniform_index(11)), rng.uniform(0, size.width),
                      rng.uniform(0, size.height), rng.uniform(1, 80), rng.uniform(1, 80),
                      rng.uniform());
}

double dyadic(Rng& rng, double lo, double hi) { return std::floor(rng.uniform(lo, hi) * 64) / 64; }

Outcome warp_round_trip() {
  constexpr int kBoxes = 10000;
  const ImageSize image{640, 416};
  WarpPolicy signed_add;
  signed_add.clamp_nonnegative = false;
  Rng rng(202);

  std::vector<DisparityField> zeros;
  for (ViewpointId v : surrounding_views()) zeros.push_back(DisparityField::zeros(v, image));
  int identity_failures = 0;
  for (int i = 0; i < kBoxes; ++i) {
    const DisparityField& zero = zeros[static_cast<std::size_t>(i % 8)];
    const Detection b = random_box(rng, image);
    WarpPolicy fixed = signed_add;
    fixed.backward_mode = BackwardMode::kFixedPoint;
    identity_failures += forward_warp_box(b, zero, signed_add) != b;
    identity_failures += backward_warp_box(b, zero, signed_add) != b;
    identity_failures += backward_warp_box(b, zero, fixed) != b;
  }

  // a constant field reads the same everywhere, so a small raster suffices
  int inverse_failures = 0;
  for (int i = 0; i < kBoxes; ++i) {
    const DisparityField f =
        testing::constant_field(surrounding_views()[i % 8], {8, 8},
                                static_cast<float>(dyadic(rng, -40, 40)),
                                static_cast<float>(dyadic(rng, -40, 40)));
    Detection b = random_box(rng, image);
    b.box.x = dyadic(rng, 0, image.width);
    b.box.y = dyadic(rng, 0, image.height);
    inverse_failures +=
        backward_warp_box(forward_warp_box(b, f, signed_add), f, signed_add) != b;
  }

  WarpPolicy fixed;
  fixed.clamp_nonnegative = false;
  fixed.backward_mode = BackwardMode::kFixedPoint;
  fixed.tol = 1e-3;
  fixed.max_iters = 100;
  const ImageSize small{160, 120};
  double worst = 0.0;
  int boxes = 0;
  for (int field_index = 0; boxes < kBoxes; ++field_index) {
    const DisparityField f =
        make_smooth_field(surrounding_views()[field_index % 8], small, 0.4, 6.0, rng);
    for (int j = 0; j < 100; ++j, ++boxes) {
      Detection b = random_box(rng, small);
      b.box.x = static_cast<double>(rng.uniform_index(small.width));
      b.box.y = static_cast<double>(rng.uniform_index(small.height));
      const Detection back = backward_warp_box(forward_warp_box(b, f, fixed), f, fixed);
      worst = std::max({worst, std::abs(back.box.x - b.box.x), std::abs(back.box.y - b.box.y)});
    }
  }
  const bool pass = identity_failures == 0 && inverse_failures == 0 && worst <= fixed.tol;
  return {pass, fmt("zero-field mismatches %d, constant-field round-trip mismatches %d, "
                    "fixed-point max error %.3g px over %d boxes each",
                    identity_failures, inverse_failures, worst, kBoxes)};
}

// ------------------------------------------------------------------ 3

Outcome label_generalization() {
  TempDir dir("kfuse_accept_labels");
  SceneParams p;
  p.image_size = {192, 128};
  p.size_range = {8, 16};
  p.n_components = 20;
  p.seed = 303;
  generate_dataset(dir / "ds", 100, p, std::nullopt);
  const int code = run_cli({"generalize-labels", "--no-clamp", "--manifest",
                            (dir / "ds/manifest.json").string(), "--out",
                            (dir / "out").string()});
  if (code != 0) return {false, fmt("generalize-labels exited %d", code)};

  const DatasetManifest src = read_manifest(dir / "ds/manifest.json");
  std::size_t files = 0, mismatched = 0, boxes = 0;
  for (const FrameEntry& f : src.frames) {
    for (ViewpointId v : surrounding_views()) {
      const fs::path generated =
          dir / "out/labels" / f.shot_id / ("v" + std::to_string(v.index()) + ".jsonl");
      const auto want = read_detections(src.resolve(f.labels.at(v.index())),
                                        DetectionFormat::kJsonLines);
      const auto got = read_detections(generated, DetectionFormat::kJsonLines);
      ++files;
      boxes += want.size();
      mismatched += got != want;
    }
  }
  const bool no_flags = read_text_file(dir / "out/border_flags.jsonl").empty();
  return {mismatched == 0 && files == 800 && no_flags,
          fmt("%zu generated label files (%zu boxes), %zu differ from constructed labels",
              files, boxes, mismatched)};
}

// ------------------------------------------------------------------ 4

Outcome fusion_oracle() {
  Rng rng(404);
  double worst = 0.0;
  int count_mismatches = 0;
  int size_mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int models = 1 + static_cast<int>(rng.uniform_index(9));
    const int classes = 1 + static_cast<int>(rng.uniform_index(3));
    const int n = 1 + static_cast<int>(rng.uniform_index(15));
    std::vector<std::vector<Detection>> in(static_cast<std::size_t>(models));
    for (int i = 0; i < n; ++i) {
      const double ax = 40.0 * static_cast<double>(rng.uniform_index(3));
      in[rng.uniform_index(static_cast<std::uint64_t>(models))].push_back(testing::det(
          static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(classes))),
          ax + rng.uniform(-6, 6), 50 + rng.uniform(-6, 6), rng.uniform(15, 30),
          rng.uniform(15, 30), rng.uniform(0.01, 1.0)));
    }
    FusionParams params;
    params.num_models = models;
    params.iou_threshold = rng.uniform(0.3, 0.8);
    const double thr = params.iou_threshold;
    const std::pair<FusionMethod, std::vector<oracle::OracleFused>> cases[] = {
        {FusionMethod::kWbf, oracle::naive_wbf(in, thr)},
        {FusionMethod::kNmw, oracle::naive_nmw(in, thr)},
        {FusionMethod::kNms, oracle::naive_nms(in, thr)}};
    for (const auto& [method, want] : cases) {
      const auto got = fuse(in, method, params);
      if (got.size() != want.size()) {
        ++count_mismatches;
        continue;
      }
      for (std::size_t i = 0; i < got.size(); ++i) {
        const Detection& d = got[i].detection;
        if (d.class_id != want[i].class_id) ++count_mismatches;
        if (got[i].cluster_size != want[i].cluster_size) ++size_mismatches;
        worst = std::max({worst, std::abs(d.box.x - want[i].x), std::abs(d.box.y - want[i].y),
                          std::abs(d.box.w - want[i].w), std::abs(d.box.h - want[i].h),
                          std::abs(*d.score - want[i].score)});
      }
    }
  }
  return {count_mismatches == 0 && size_mismatches == 0 && worst <= 1e-9,
          fmt("1000 instances x {WBF, NMW, NMS}: %d structural and %d cluster-size "
              "mismatches, max deviation %.3g",
              count_mismatches, size_mismatches, worst)};
}

// ------------------------------------------------------------------ 5

Outcome map_oracle() {
  Rng rng(505);
  const ClassTable classes({"a", "b", "c"});
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<oracle::OracleFrame> frames;
    const int n_frames = 1 + static_cast<int>(rng.uniform_index(3));
    for (int f = 0; f < n_frames; ++f) frames.push_back({"f" + std::to_string(f), {}, {}});
    const int n = 1 + static_cast<int>(rng.uniform_index(10));
    for (int i = 0; i < n; ++i) {
      auto& frame = frames[rng.uniform_index(frames.size())];
      const auto cls = static_cast<ClassId>(rng.uniform_index(3));
      const double x = 20.0 * static_cast<double>(rng.uniform_index(4)) + rng.uniform(-3, 3);
      const double y = 20.0 + rng.uniform(-3, 3);
      if (rng.bernoulli(0.5)) {
        frame.gts.push_back(testing::det(cls, x, y, rng.uniform(8, 14), rng.uniform(8, 14)));
      } else {
        frame.preds.push_back(testing::det(cls, x, y, rng.uniform(8, 14), rng.uniform(8, 14),
                                           static_cast<double>(1 + rng.uniform_index(6)) / 6.0));
      }
    }
    std::vector<FrameDetections> preds, gts;
    for (const auto& f : frames) {
      preds.push_back({f.id, f.preds});
      gts.push_back({f.id, f.gts});
    }
    const EvalReport got = evaluate(preds, gts, classes);
    const oracle::OracleMetrics want = oracle::naive_evaluate(frames, 3);
    worst = std::max({worst, std::abs(got.map50 - want.map50),
                      std::abs(got.map50_95 - want.map50_95),
                      std::abs(got.precision - want.precision),
                      std::abs(got.recall - want.recall)});
  }

  std::vector<FrameDetections> gts, perfect, wrong;
  for (int f = 0; f < 5; ++f) {
    FrameDetections g{"f" + std::to_string(f), {}};
    for (int i = 0; i < 6; ++i) g.dets.push_back(testing::det(i % 3, 25.0 * i + 10, 20, 12, 12));
    FrameDetections p = g, w = g;
    for (auto& d : p.dets) d.score = 0.8;
    for (auto& d : w.dets) {
      d.score = 0.8;
      d.box.y += 200;
    }
    gts.push_back(g);
    perfect.push_back(p);
    wrong.push_back(w);
  }
  const EvalReport best = evaluate(perfect, gts, classes);
  const EvalReport worst_case = evaluate(wrong, gts, classes);
  const bool closed = best.map50 == 1.0 && best.map50_95 == 1.0 && worst_case.map50 == 0.0 &&
                      worst_case.map50_95 == 0.0;
  return {worst <= 1e-9 && closed,
          fmt("500 corpora: max deviation %.3g; perfect -> %.1f, all-FP -> %.1f", worst,
              best.map50, worst_case.map50)};
}

// --------------------------------------------------------------- 6 and 7

struct UpliftCorpus {
  std::vector<FrameDetections> gts;
  std::vector<FrameDetections> center_only;
  std::map<FusionMethod, std::vector<MvInferStages>> stages;
};

SceneParams corpus_scene() {
  SceneParams p;
  p.seed = 606;
  return p;
}

DetectorNoise corpus_noise() {
  DetectorNoise n;
  n.jitter_sigma = 2.0;
  n.miss_prob = 0.3;
  n.fp_rate = 1.0;
  n.confusion_prob = 0.05;
  return n;
}

const UpliftCorpus& uplift_corpus() {
  static const UpliftCorpus corpus = [] {
    UpliftCorpus c;
    const SceneParams scene = corpus_scene();
    const DetectorNoise noise = corpus_noise();
    for (std::size_t i = 0; i < 200; ++i) {
      const SyntheticFrame sf = generate_frame(i, scene, noise);
      const std::string id = sf.scene.frame.shot_id;
      c.gts.push_back({id, sf.scene.frame.views.at(ViewpointId::center())});
      c.center_only.push_back({id, sf.detections.at(ViewpointId::center())});
      KaleidoFrame frame = sf.scene.frame;
      frame.views = sf.detections;
      for (FusionMethod m : {FusionMethod::kWbf, FusionMethod::kNmw, FusionMethod::kNms}) {
        MvInferParams params;
        params.method = m;
        params.warp.clamp_nonnegative = false;
        c.stages[m].push_back(mv_infer_stages(frame, params));
      }
    }
    return c;
  }();
  return corpus;
}

Outcome multiview_uplift() {
  const UpliftCorpus& c = uplift_corpus();
  const ClassTable classes = ClassTable::pcb_components();
  std::vector<FrameDetections> fused;
  for (std::size_t i = 0; i < c.gts.size(); ++i) {
    fused.push_back({c.gts[i].frame_id, c.stages.at(FusionMethod::kWbf)[i].output});
  }
  const EvalReport center = evaluate(c.center_only, c.gts, classes);
  const EvalReport multi = evaluate(fused, c.gts, classes);
  const double gain = multi.map50 - center.map50;
  return {gain >= 0.10,
          fmt("mAP@0.5 center view %.4f -> multi-view WBF %.4f (%+.4f, need >= +0.10); "
              "recall %.4f -> %.4f",
              center.map50, multi.map50, gain, center.recall, multi.recall)};
}

// Mean distance from each ground-truth center to the center of its best
// same-class fused box (IoU > 0.5), over boxes every method matched.
std::map<FusionMethod, double> center_errors(const UpliftCorpus& c, std::size_t* matched) {
  const FusionMethod methods[] = {FusionMethod::kWbf, FusionMethod::kNmw, FusionMethod::kNms};
  std::map<FusionMethod, double> sums;
  *matched = 0;
  for (std::size_t i = 0; i < c.gts.size(); ++i) {
    for (const Detection& gt : c.gts[i].dets) {
      std::map<FusionMethod, double> dist;
      for (FusionMethod m : methods) {
        double best_iou = 0.5;
        for (const FusedBox& f : c.stages.at(m)[i].fused) {
          if (f.detection.class_id != gt.class_id) continue;
          const double o = iou(f.detection.box, gt.box);
          if (o > best_iou) {
            best_iou = o;
            dist[m] = std::hypot(f.detection.box.x - gt.box.x, f.detection.box.y - gt.box.y);
          }
        }
      }
      if (dist.size() != 3) continue;
      ++*matched;
      for (const auto& [m, d] : dist) sums[m] += d;
    }
  }
  for (auto& [m, s] : sums) s /= static_cast<double>(std::max<std::size_t>(*matched, 1));
  return sums;
}

Outcome fusion_ordering() {
  std::size_t matched = 0;
  const auto err = center_errors(uplift_corpus(), &matched);
  const double wbf = err.at(FusionMethod::kWbf);
  const double nmw = err.at(FusionMethod::kNmw);
  const double nms = err.at(FusionMethod::kNms);
  const double reduction = 1.0 - wbf / nms;
  return {matched > 0 && wbf <= nmw && nmw <= nms && reduction >= 0.20,
          fmt("mean center error over %zu boxes: WBF %.4f, NMW %.4f, NMS %.4f px; "
              "WBF vs NMS -%.1f%% (need >= 20%%)",
              matched, wbf, nmw, nms, 100.0 * reduction)};
}

// ------------------------------------------------------------------ 8

Outcome determinism_and_formats() {
  TempDir dir("kfuse_accept_det");
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  auto path = [&](const char* rel) { return (dir / rel).string(); };

  const std::vector<std::string> synth = {"synth", "--frames", "6", "--components", "8",
                                          "--width", "160", "--height", "120", "--min-size",
                                          "8", "--max-size", "20", "--seed", "808"};
  auto with = [](std::vector<std::string> base, std::initializer_list<std::string> extra) {
    base.insert(base.end(), extra);
    return base;
  };
  check(run_cli(with(synth, {"--out", path("s1")})) == 0, "synth");
  check(run_cli(with(synth, {"--out", path("s2")})) == 0, "synth rerun");
  check(run_cli(with(synth, {"--out", path("s3"), "--jobs", "4"})) == 0, "synth --jobs 4");
  const auto s1 = snapshot(dir / "s1");
  check(snapshot(dir / "s2") == s1, "synth rerun bytes");
  check(snapshot(dir / "s3") == s1, "synth --jobs bytes");

  const std::string manifest = path("s1/manifest.json");
  for (const char* out : {"i1", "i2"}) {
    check(run_cli({"infer", "--no-clamp", "--manifest", manifest, "--out", path(out)}) == 0,
          "infer");
  }
  check(run_cli({"infer", "--no-clamp", "--jobs", "3", "--manifest", manifest, "--out",
                 path("i3")}) == 0,
        "infer --jobs 3");
  const auto i1 = snapshot(dir / "i1");
  check(snapshot(dir / "i2") == i1 && snapshot(dir / "i3") == i1, "infer bytes");

  check(run_cli({"generalize-labels", "--manifest", manifest, "--out", path("g1")}) == 0 &&
            run_cli({"generalize-labels", "--jobs", "2", "--manifest", manifest, "--out",
                     path("g2")}) == 0,
        "generalize-labels");
  check(snapshot(dir / "g1") == snapshot(dir / "g2"), "generalize-labels bytes");

  check(run_cli({"export-view", "--manifest", manifest, "--out", path("gt")}) == 0, "export");
  for (const char* report : {"r1.json", "r2.json"}) {
    check(run_cli({"evaluate", "--pred", path("i1"), "--gt", path("gt"), "--classes", manifest,
                   "--report", path(report)}) == 0,
          "evaluate");
  }
  check(read_text_file(dir / "r1.json") == read_text_file(dir / "r2.json"), "report bytes");
  check(run_cli({"split", "--k", "3", "--seed", "9", "--manifest", manifest, "--out",
                 path("k1")}) == 0 &&
            run_cli({"split", "--k", "3", "--seed", "9", "--manifest", manifest, "--out",
                     path("k2")}) == 0,
        "split");
  check(snapshot(dir / "k1") == snapshot(dir / "k2"), "split bytes");

  // round trips
  Rng rng(880);
  const ImageSize size{640, 416};
  std::vector<Detection> dets;
  for (int i = 0; i < 100; ++i) {
    const double w = rng.uniform(1, 100), h = rng.uniform(1, 100);
    dets.push_back(testing::det(static_cast<int>(rng.uniform_index(11)),
                                rng.uniform(w / 2, size.width - w / 2),
                                rng.uniform(h / 2, size.height - h / 2), w, h,
                                i % 2 ? std::optional<double>(rng.uniform()) : std::nullopt));
  }
  const WriteContext ctx{"shot", 4, size};
  check(parse_detections(format_detections(dets, DetectionFormat::kJsonLines, ctx),
                         DetectionFormat::kJsonLines) == dets,
        "json_lines round trip");
  const auto yolo = parse_detections(format_detections(dets, DetectionFormat::kYoloTxt, ctx),
                                     DetectionFormat::kYoloTxt, {size, 11});
  double yolo_err = 0.0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    yolo_err = std::max({yolo_err, std::abs(yolo[i].box.x - dets[i].box.x) / size.width,
                         std::abs(yolo[i].box.y - dets[i].box.y) / size.height,
                         std::abs(yolo[i].box.w - dets[i].box.w) / size.width,
                         std::abs(yolo[i].box.h - dets[i].box.h) / size.height});
  }
  check(yolo.size() == dets.size() && yolo_err <= 1e-6, "yolo_txt round trip");

  const DatasetManifest m = read_manifest(manifest);
  check(dump_manifest(parse_manifest(dump_manifest(m), m.base_dir)) == dump_manifest(m) &&
            dump_manifest(m) == read_text_file(manifest),
        "manifest round trip");

  std::vector<float> values(53 * 17);
  for (float& v : values) v = static_cast<float>(rng.uniform(-30, 30));
  const Raster raster(53, 17, values);
  write_pfm(raster, dir / "r.pfm");
  check(read_disparity(dir / "r.pfm") == raster, "PFM round trip");

  const Raster flip(3, 2, std::vector<float>{1, 2, 3, 4, 5, 6});
  const std::string bytes = encode_pfm(flip);
  const std::size_t header = std::string("Pf\n3 2\n-1\n").size();
  float stored[6];
  std::memcpy(stored, bytes.data() + header, sizeof(stored));
  check(stored[0] == 4 && stored[3] == 1 && decode_pfm(bytes) == flip, "PFM row flip");

  std::string detail = failures.empty() ? "reruns and --jobs 1/2/3/4 byte-identical for "
                                          "synth, infer, generalize-labels, evaluate, split; "
                                          "JSON-lines, yolo_txt, manifest, PFM round trips and "
                                          "row flip pass"
                                        : "failed:";
  for (const std::string& f : failures) detail += " [" + f + "]";
  return {failures.empty(), detail};
}

// ------------------------------------------------------------------ 9

Outcome split_integrity() {
  Rng rng(909);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(400);
    const int k = 2 + static_cast<int>(rng.uniform_index(std::min<std::size_t>(n - 1, 19)));
    DatasetManifest m = testing::stub_manifest(n);
    for (FrameEntry& f : m.frames) f.shot_id = "pcb" + std::to_string(rng.next_u64());
    const FoldSpec spec = kfold_split(m, k, rng.next_u64());
    // every view image of a shot must land in its shot's fold
    std::map<std::string, std::set<int>> folds_of_shot;
    for (const FrameEntry& f : m.frames) {
      for (ViewpointId v : all_views()) {
        (void)v;
        folds_of_shot[f.shot_id].insert(spec.assignment.at(f.shot_id));
      }
    }
    std::size_t lo = n, hi = 0, total = 0;
    std::set<std::string> seen;
    bool ok = spec.assignment.size() == n;
    for (const auto& fold : spec.folds()) {
      lo = std::min(lo, fold.size());
      hi = std::max(hi, fold.size());
      total += fold.size();
      for (const std::string& id : fold) ok = ok && seen.insert(id).second;
    }
    for (const auto& [shot, folds] : folds_of_shot) ok = ok && folds.size() == 1;
    ok = ok && total == n && hi - lo <= 1;
    violations += !ok;
  }
  std::multiset<std::size_t> sizes;
  for (const auto& fold : kfold_split(testing::stub_manifest(262), 10, 2024).folds()) {
    sizes.insert(fold.size());
  }
  const bool paper = sizes.count(26) == 8 && sizes.count(27) == 2;
  return {violations == 0 && paper,
          fmt("100 random manifests: %d partition violations; 262 shots / k=10 -> "
              "%zu folds of 26, %zu of 27",
              violations, sizes.count(26), sizes.count(27))};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> fn;
};

}  // namespace
}  // namespace kfuse

int main() {
  using namespace kfuse;
  const std::vector<Criterion> criteria = {
      {1, "manifest arithmetic", 1, manifest_arithmetic},
      {2, "warp identity and round trip", 10, warp_round_trip},
      {3, "label generalization oracle", 10, label_generalization},
      {4, "fusion vs brute force", 30, fusion_oracle},
      {5, "mAP vs brute force", 30, map_oracle},
      {6, "multi-view uplift", 60, multiview_uplift},
      {7, "fusion method ordering", 60, fusion_ordering},
      {8, "determinism and formats", 10, determinism_and_formats},
      {9, "grouped split integrity", 5, split_integrity},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("%s  [%d] %s: %s (%.2f s of %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_s, in_time ? "" : " over time budget");
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
