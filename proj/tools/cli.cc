#include "cli.h"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>

#include "kfuse/error.h"
#include "kfuse/eval.h"
#include "kfuse/fusion.h"
#include "kfuse/io.h"
#include "kfuse/model.h"
#include "kfuse/parallel.h"
#include "kfuse/synthgen.h"
#include "kfuse/warp.h"

namespace kfuse::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::shared_ptr<spdlog::logger> logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> log;
  std::call_once(once, [] {
    log = std::make_shared<spdlog::logger>("kfuse",
                                           std::make_shared<spdlog::sinks::stderr_sink_mt>());
    log->set_pattern("kfuse: %l: %v");
  });
  return log;
}

struct Globals {
  std::string manifest;
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string log_level = "warn";
  bool lenient = false;
};

// Bad flag values or combinations found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void configure_logging(const Globals& g) {
  std::string level = g.log_level;
  if (const char* env = std::getenv("KFUSE_LOG"); env && *env) level = env;
  static const std::map<std::string, spdlog::level::level_enum> levels = {
      {"error", spdlog::level::err},
      {"warn", spdlog::level::warn},
      {"info", spdlog::level::info},
      {"debug", spdlog::level::debug}};
  auto it = levels.find(level);
  if (it == levels.end()) {
    logger()->set_level(spdlog::level::warn);
    logger()->warn("ignoring unknown log level '{}'", level);
    return;
  }
  logger()->set_level(it->second);
}

const std::string& require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
  return value;
}

DatasetManifest load_manifest(const Globals& g) {
  std::vector<std::string> warnings;
  DatasetManifest m = read_manifest(require(g.manifest, "--manifest"),
                                    g.lenient ? ManifestMode::kLenient : ManifestMode::kStrict,
                                    &warnings);
  for (const std::string& w : warnings) logger()->warn("{}", w);
  return m;
}

std::string extension(DetectionFormat format) {
  return format == DetectionFormat::kYoloTxt ? ".txt" : ".jsonl";
}

// Path of `p` (relative to the input manifest) as seen from `out_dir`.
std::string rebase(const DatasetManifest& in, const std::string& p, const fs::path& out_dir) {
  if (p.empty()) return p;
  const fs::path target = fs::absolute(in.resolve(p)).lexically_normal();
  const fs::path rel = target.lexically_relative(fs::absolute(out_dir).lexically_normal());
  return rel.empty() ? target.generic_string() : rel.generic_string();
}

bool report_issues(const ManifestStats& stats) {
  for (const ManifestIssue& issue : stats.issues) {
    logger()->error("[{}] {}: {}", error_code_name(issue.code),
                    issue.shot_id.empty() ? "manifest" : issue.shot_id, issue.message);
  }
  return stats.ok();
}

// ---------------------------------------------------------------- validate

int cmd_validate(const Globals& g) {
  const DatasetManifest m = load_manifest(g);
  const ManifestStats stats = validate_manifest(m);
  std::cout << "frames: " << stats.frames << "\n"
            << "view_images: " << stats.view_images << "\n"
            << "disparity_maps: " << stats.disparity_maps << "\n"
            << "disparity_channels: " << stats.disparity_channels << "\n";
  if (!report_issues(stats)) {
    std::cout << "issues: " << stats.issues.size() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

// ------------------------------------------------------- generalize-labels

struct GeneralizeOptions {
  bool clamp = true;
  bool no_clamp = false;
  std::string border = "clip";
};

int cmd_generalize(const Globals& g, const GeneralizeOptions& opt) {
  const fs::path out = require(g.out, "--out");
  WarpPolicy policy = WarpPolicy::labeling();
  policy.clamp_nonnegative = !opt.no_clamp;
  policy.border_mode =
      opt.border == "drop" ? BorderMode::kDropIfCenterOutside : BorderMode::kClipToFrame;

  const DatasetManifest in = load_manifest(g);
  ManifestStats stats = validate_manifest(in);
  for (const FrameEntry& f : in.frames) {
    if (!f.labels.contains(5)) {
      stats.issues.push_back({ErrorCode::kMissingFile, f.shot_id, "no center-view labels"});
    }
  }
  if (!report_issues(stats)) {
    throw Error(ErrorCode::kInvalidArgument,
                "manifest failed validation with " + std::to_string(stats.issues.size()) +
                    " issue(s)");
  }

  const DetectionFormat format = in.detection_format;
  std::vector<std::vector<ordered_json>> flags(in.frames.size());
  parallel_for(in.frames.size(), g.jobs, [&](std::size_t i) {
    const FrameEntry& entry = in.frames[i];
    ReadOptions ro{entry.image_size, in.class_table.size()};
    const std::vector<Detection> center = read_detections(in.resolve(entry.labels.at(5)), format, ro);
    KaleidoFrame frame;
    frame.shot_id = entry.shot_id;
    frame.image_size = entry.image_size;
    for (ViewpointId v : surrounding_views()) {
      const DisparityPaths& p = entry.disparity.at(v.index());
      DisparityField field{v, entry.image_size, std::nullopt, std::nullopt};
      if (!p.x.empty()) field.dx = read_disparity(in.resolve(p.x));
      if (!p.y.empty()) field.dy = read_disparity(in.resolve(p.y));
      field.validate();
      frame.disparities.emplace(v, std::move(field));
    }
    const fs::path dir = out / "labels" / entry.shot_id;
    for (ViewpointId v : all_views()) {
      const WriteContext ctx{entry.shot_id, v.index(), entry.image_size};
      const fs::path path = dir / ("v" + std::to_string(v.index()) + extension(format));
      if (v.is_center()) {
        write_detections(center, path, format, ctx);
        continue;
      }
      const WarpedSet warped = forward_warp_set(center, frame.disparity(v), entry.image_size, policy);
      write_detections(warped.boxes, path, format, ctx);
      for (const BorderFlag& flag : warped.flags) {
        const BBox& b = flag.warped.box;
        ordered_json j;
        j["frame"] = entry.shot_id;
        j["view"] = v.index();
        j["index"] = flag.index;
        j["action"] = flag.action == BorderAction::kDropped ? "dropped" : "clipped";
        j["class"] = flag.warped.class_id;
        j["x"] = b.x;
        j["y"] = b.y;
        j["w"] = b.w;
        j["h"] = b.h;
        flags[i].push_back(std::move(j));
      }
    }
  });

  std::string report;
  std::size_t flagged = 0;
  for (const auto& frame_flags : flags) {
    for (const ordered_json& j : frame_flags) {
      report += j.dump() + "\n";
      ++flagged;
    }
  }
  write_text_file(out / "border_flags.jsonl", report);

  DatasetManifest result;
  result.class_table = in.class_table;
  result.detection_format = format;
  for (const FrameEntry& f : in.frames) {
    FrameEntry e;
    e.shot_id = f.shot_id;
    e.image_size = f.image_size;
    for (ViewpointId v : all_views()) {
      e.labels[v.index()] =
          "labels/" + f.shot_id + "/v" + std::to_string(v.index()) + extension(format);
    }
    for (const auto& [v, p] : f.detections) e.detections[v] = rebase(in, p, out);
    for (const auto& [v, p] : f.disparity) {
      e.disparity[v] = {rebase(in, p.x, out), rebase(in, p.y, out)};
    }
    result.frames.push_back(std::move(e));
  }
  write_manifest(result, out / "manifest.json");
  logger()->info("generalized {} frame(s): {} label files, {} box(es) flagged for review",
                 in.frames.size(), 8 * in.frames.size(), flagged);
  return kExitOk;
}

// ------------------------------------------------------------------- infer

struct InferOptions {
  std::string method = "wbf";
  double iou = 0.55;
  double conf = 0.0;
  std::string backward = "add";
  std::string rescale = "min";
  double match_iou = 0.5;
  bool clamp = true;
  bool no_clamp = false;
};

void check_detection_files(const DatasetManifest& m, const FrameEntry& entry) {
  for (ViewpointId v : all_views()) {
    auto it = entry.detections.find(v.index());
    const std::string where = "frame '" + entry.shot_id + "' view " + std::to_string(v.index());
    if (it == entry.detections.end() || it->second.empty()) {
      throw Error(ErrorCode::kMissingFile, where + ": no detections file declared");
    }
    if (!fs::exists(m.resolve(it->second))) {
      throw Error(ErrorCode::kMissingFile,
                  where + ": detections file not found: " + m.resolve(it->second).string());
    }
  }
}

int cmd_infer(const Globals& g, const InferOptions& opt) {
  const fs::path out = require(g.out, "--out");
  MvInferParams params;
  params.method = *parse_method_name(opt.method);
  params.fusion.iou_threshold = opt.iou;
  params.fusion.skip_score_threshold = opt.conf;
  params.fusion.intermix_match_iou = opt.match_iou;
  params.fusion.conf_rescale = opt.rescale == "count"  ? ConfRescale::kCountOverN
                               : opt.rescale == "none" ? ConfRescale::kNone
                                                       : ConfRescale::kMinCountOverN;
  params.warp.backward_mode =
      opt.backward == "fixed" ? BackwardMode::kFixedPoint : BackwardMode::kDirectAdd;
  params.warp.clamp_nonnegative = !opt.no_clamp;
  try {
    params.fusion.validate();
  } catch (const Error& e) {
    throw UsageError(e.message());
  }

  const DatasetManifest m = load_manifest(g);
  for (const FrameEntry& entry : m.frames) check_detection_files(m, entry);

  std::vector<std::size_t> counts(m.frames.size());
  parallel_for(m.frames.size(), g.jobs, [&](std::size_t i) {
    const FrameEntry& entry = m.frames[i];
    KaleidoFrame frame;
    try {
      frame = load_frame(m, entry, ViewSource::kDetections);
      frame.validate();
    } catch (const Error& e) {
      throw Error(e.code(), "frame '" + entry.shot_id + "': " + e.message(), e.line(), e.field());
    }
    const std::vector<Detection> fused = mv_infer(frame, params);
    counts[i] = fused.size();
    write_detections(fused, out / (entry.shot_id + ".jsonl"), DetectionFormat::kJsonLines,
                     {entry.shot_id, 5, entry.image_size});
  });
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  logger()->info("fused {} frame(s) with {}: {} detection(s)", m.frames.size(), opt.method, total);
  return kExitOk;
}

// ------------------------------------------------------------- export-view

struct ExportOptions {
  int view = 5;
  std::string source = "labels";
};

int cmd_export_view(const Globals& g, const ExportOptions& opt) {
  const fs::path out = require(g.out, "--out");
  const DatasetManifest m = load_manifest(g);
  const bool labels = opt.source == "labels";
  parallel_for(m.frames.size(), g.jobs, [&](std::size_t i) {
    const FrameEntry& entry = m.frames[i];
    const auto& files = labels ? entry.labels : entry.detections;
    auto it = files.find(opt.view);
    if (it == files.end() || it->second.empty()) {
      throw Error(ErrorCode::kMissingFile, "frame '" + entry.shot_id + "' view " +
                                               std::to_string(opt.view) + ": no " + opt.source +
                                               " file declared");
    }
    const std::vector<Detection> dets =
        read_detections(m.resolve(it->second), m.detection_format,
                        {entry.image_size, m.class_table.size()});
    write_detections(dets, out / (entry.shot_id + ".jsonl"), DetectionFormat::kJsonLines,
                     {entry.shot_id, opt.view, entry.image_size});
  });
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string pred;
  std::string gt;
  std::string classes;
  std::optional<double> conf;
  std::string report;
  std::string split;
};

ClassTable read_class_table(const fs::path& path) {
  if (path.extension() == ".json") {
    return parse_manifest(read_text_file(path), path.parent_path(), ManifestMode::kLenient)
        .class_table;
  }
  std::vector<std::string> names;
  std::istringstream in(read_text_file(path));
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    names.push_back(line.substr(first, last - first + 1));
  }
  if (names.empty()) throw Error(ErrorCode::kInvalidArgument, "class list " + path.string() + " is empty");
  return ClassTable(std::move(names));
}

std::map<std::string, fs::path> list_frames(const fs::path& dir, const char* flag) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kMissingFile, std::string(flag) + " directory not found: " + dir.string());
  }
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") {
      out[e.path().stem().string()] = e.path();
    }
  }
  return out;
}

std::map<std::string, int> read_split(const fs::path& path) {
  const nlohmann::json j = nlohmann::json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded() || !j.contains("folds") || !j["folds"].is_array()) {
    throw Error(ErrorCode::kParseError, "not a folds file: " + path.string());
  }
  std::map<std::string, int> assignment;
  int fold = 0;
  for (const auto& ids : j["folds"]) {
    for (const auto& id : ids) {
      if (!assignment.emplace(id.get<std::string>(), fold).second) {
        throw Error(ErrorCode::kDuplicateShotId,
                    "shot '" + id.get<std::string>() + "' appears in two folds");
      }
    }
    ++fold;
  }
  return assignment;
}

int cmd_evaluate(const Globals& g, const EvaluateOptions& opt) {
  fs::path report_path = opt.report;
  if (report_path.empty()) {
    if (g.out.empty()) throw UsageError("--report or --out is required");
    report_path = fs::path(g.out) / "report.json";
  }
  const ClassTable classes = read_class_table(require(opt.classes, "--classes"));
  const auto preds = list_frames(require(opt.pred, "--pred"), "--pred");
  const auto gts = list_frames(require(opt.gt, "--gt"), "--gt");
  for (const auto& [id, path] : gts) {
    if (!preds.contains(id)) {
      throw Error(ErrorCode::kFrameIdMismatch, "frame '" + id + "' has ground truth but no predictions");
    }
  }
  for (const auto& [id, path] : preds) {
    if (!gts.contains(id)) {
      throw Error(ErrorCode::kFrameIdMismatch, "frame '" + id + "' has predictions but no ground truth");
    }
  }

  std::vector<std::string> ids;
  for (const auto& [id, path] : gts) ids.push_back(id);
  std::vector<FrameDetections> pred_frames(ids.size()), gt_frames(ids.size());
  const ReadOptions ro{std::nullopt, classes.size()};
  parallel_for(ids.size(), g.jobs, [&](std::size_t i) {
    pred_frames[i] = {ids[i], read_detections(preds.at(ids[i]), DetectionFormat::kJsonLines, ro)};
    gt_frames[i] = {ids[i], read_detections(gts.at(ids[i]), DetectionFormat::kJsonLines, ro)};
  });

  EvalConfig config;
  config.conf = opt.conf;
  EvalReport report;
  if (opt.split.empty()) {
    report = evaluate(pred_frames, gt_frames, classes, config);
  } else {
    const auto assignment = read_split(opt.split);
    int k = 0;
    for (const auto& [id, fold] : assignment) k = std::max(k, fold + 1);
    std::vector<std::vector<FrameDetections>> fold_preds(k), fold_gts(k);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto it = assignment.find(ids[i]);
      if (it == assignment.end()) {
        throw Error(ErrorCode::kFrameIdMismatch, "frame '" + ids[i] + "' is in no fold");
      }
      fold_preds[it->second].push_back(pred_frames[i]);
      fold_gts[it->second].push_back(gt_frames[i]);
    }
    std::vector<EvalReport> reports;
    for (int f = 0; f < k; ++f) {
      if (fold_gts[f].empty()) {
        logger()->warn("fold {} has no frames to evaluate", f);
        continue;
      }
      reports.push_back(evaluate(fold_preds[f], fold_gts[f], classes, config));
    }
    if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "no fold has frames");
    report = aggregate_folds(reports);
  }

  write_text_file(report_path, report_to_json(report));
  const std::string table = report_table(report);
  fs::path table_path = report_path;
  table_path.replace_extension(".txt");
  write_text_file(table_path, table);
  std::cout << table;
  return kExitOk;
}

// ------------------------------------------------------------------- split

int cmd_split(const Globals& g, int k) {
  const fs::path out = require(g.out, "--out");
  const DatasetManifest m = load_manifest(g);
  const FoldSpec spec = kfold_split(m, k, g.seed);
  const auto folds = spec.folds();

  ordered_json j;
  j["k"] = spec.k;
  j["seed"] = spec.seed;
  j["folds"] = ordered_json::array();
  for (const auto& f : folds) j["folds"].push_back(f);
  write_text_file(out / "folds.json", j.dump(2) + "\n");

  for (std::size_t f = 0; f < folds.size(); ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "fold_%02zu", f);
    std::string train, val;
    for (const auto& [id, assigned] : spec.assignment) {
      (static_cast<std::size_t>(assigned) == f ? val : train) += id + "\n";
    }
    write_text_file(out / name / "train.txt", train);
    write_text_file(out / name / "val.txt", val);
    std::cout << name << ": " << folds[f].size() << " val, "
              << m.frames.size() - folds[f].size() << " train\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------------- synth

struct SynthOptions {
  std::size_t frames = 10;
  SceneParams scene;
  DetectorNoise noise;
  std::string signs = "signed";
  bool no_detections = false;
};

int cmd_synth(const Globals& g, SynthOptions opt) {
  const fs::path out = require(g.out, "--out");
  opt.scene.seed = g.seed;
  opt.scene.signs = opt.signs == "folded" ? SignConvention::kFolded : SignConvention::kSigned;
  try {
    opt.scene.validate();
    opt.noise.validate();
  } catch (const Error& e) {
    throw UsageError(e.message());
  }
  std::optional<DetectorNoise> noise;
  if (!opt.no_detections) noise = opt.noise;
  const DatasetManifest m = generate_dataset(out, opt.frames, opt.scene, noise, {g.jobs});
  logger()->info("wrote {} synthetic frame(s) to {}", m.frames.size(), out.string());
  return kExitOk;
}

// ----------------------------------------------------------------- parsing

int dispatch(int argc, char** argv) {
  CLI::App app{"Multi-view detection fusion for kaleidoscopic imaging", "kfuse"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "kfuse 0.1.0");

  Globals g;
  app.add_option("--manifest", g.manifest, "Dataset manifest (JSON)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Master random seed");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--log-level", g.log_level, "error, warn, info or debug (KFUSE_LOG overrides)")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  app.add_flag("--lenient", g.lenient, "Warn about unknown manifest fields instead of failing");

  auto* validate = app.add_subcommand("validate", "Check a manifest and print its counts");

  GeneralizeOptions gen;
  auto* generalize = app.add_subcommand(
      "generalize-labels", "Forward-warp center labels into the eight surrounding views");
  auto* clamp_flag = generalize->add_flag("--clamp", gen.clamp, "Clamp displacements at zero (default)");
  auto* no_clamp_flag = generalize->add_flag("--no-clamp", gen.no_clamp, "Use signed displacements");
  clamp_flag->excludes(no_clamp_flag);
  generalize->add_option("--border", gen.border, "Border policy")
      ->check(CLI::IsMember({"drop", "clip"}));

  InferOptions inf;
  auto* infer = app.add_subcommand("infer", "Fuse nine-view detections into center-view results");
  infer->add_option("--method", inf.method, "Fusion method")->check(CLI::IsMember({"wbf", "nmw", "nms"}));
  infer->add_option("--iou", inf.iou, "Clustering IoU threshold");
  infer->add_option("--conf", inf.conf, "Discard detections scoring below this");
  infer->add_option("--backward", inf.backward, "Backward warp")->check(CLI::IsMember({"add", "fixed"}));
  infer->add_option("--rescale", inf.rescale, "WBF confidence rescaling")
      ->check(CLI::IsMember({"min", "count", "none"}));
  infer->add_option("--match-iou", inf.match_iou, "Intermix matching IoU");
  auto* inf_clamp = infer->add_flag("--clamp", inf.clamp, "Clamp displacements at zero (default)");
  auto* inf_no_clamp = infer->add_flag("--no-clamp", inf.no_clamp, "Use signed displacements");
  inf_clamp->excludes(inf_no_clamp);

  EvaluateOptions ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate_cmd->add_option("--pred", ev.pred, "Directory of <frame>.jsonl predictions");
  evaluate_cmd->add_option("--gt", ev.gt, "Directory of <frame>.jsonl ground truth");
  evaluate_cmd->add_option("--classes", ev.classes, "Class list (one per line) or manifest");
  evaluate_cmd->add_option("--conf", ev.conf, "Confidence cutoff for precision and recall");
  evaluate_cmd->add_option("--report", ev.report, "Report JSON path (table goes next to it)");
  evaluate_cmd->add_option("--split", ev.split, "folds.json: evaluate each fold and average");

  int k = 10;
  auto* split = app.add_subcommand("split", "Shot-grouped k-fold split");
  split->add_option("--k", k, "Number of folds");

  SynthOptions syn;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--frames", syn.frames, "Number of frames");
  synth->add_option("--components", syn.scene.n_components, "Components per frame");
  synth->add_option("--width", syn.scene.image_size.width, "Image width");
  synth->add_option("--height", syn.scene.image_size.height, "Image height");
  synth->add_option("--min-size", syn.scene.size_range.min, "Smallest component side");
  synth->add_option("--max-size", syn.scene.size_range.max, "Largest component side");
  synth->add_option("--min-height", syn.scene.height_range.min, "Lowest component height");
  synth->add_option("--max-height", syn.scene.height_range.max, "Tallest component height");
  synth->add_option("--gain", syn.scene.disparity_gain, "Pixels of disparity per height unit");
  synth->add_option("--classes", syn.scene.num_classes, "Number of classes");
  synth->add_option("--signs", syn.signs, "Displacement sign convention")
      ->check(CLI::IsMember({"signed", "folded"}));
  synth->add_option("--jitter", syn.noise.jitter_sigma, "Detector center jitter sigma (px)");
  synth->add_option("--miss", syn.noise.miss_prob, "Detector miss probability");
  synth->add_option("--fp-rate", syn.noise.fp_rate, "Expected false positives per view");
  synth->add_option("--confusion", syn.noise.confusion_prob, "Class confusion probability");
  synth->add_flag("--no-detections", syn.no_detections, "Write labels and disparity only");

  ExportOptions ex;
  auto* export_view = app.add_subcommand("export-view", "Write one view's boxes as <frame>.jsonl");
  export_view->add_option("--view", ex.view, "View index 1-9")->check(CLI::Range(1, 9));
  export_view->add_option("--source", ex.source, "labels or detections")
      ->check(CLI::IsMember({"labels", "detections"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  configure_logging(g);

  try {
    if (*validate) return cmd_validate(g);
    if (*generalize) return cmd_generalize(g, gen);
    if (*infer) return cmd_infer(g, inf);
    if (*evaluate_cmd) return cmd_evaluate(g, ev);
    if (*split) return cmd_split(g, k);
    if (*synth) return cmd_synth(g, syn);
    if (*export_view) return cmd_export_view(g, ex);
  } catch (const UsageError& e) {
    logger()->error("{}", e.what());
    return kExitInput;
  } catch (const Error& e) {
    logger()->error("{}", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    logger()->critical("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace

int run(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "kfuse: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("kfuse");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data());
}

}  // namespace kfuse::cli
