#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "seedo/config.hpp"
#include "seedo/evaluator.hpp"
#include "seedo/keyframe_select.hpp"
#include "seedo/report_io.hpp"
#include "seedo/step_parser.hpp"
#include "seedo/trace_ingest.hpp"
#include "seedo/visual_prompt.hpp"
#include "seedo/vlm_interpreter.hpp"

namespace fs = std::filesystem;

namespace seedo::cli {
namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError: return kConfig;
    case ErrorKind::ParseError:
    case ErrorKind::CountMismatch:
    case ErrorKind::UnknownObject:
    case ErrorKind::UnknownRelation:
    case ErrorKind::SelfReference:
    case ErrorKind::EmptyPlan:
    case ErrorKind::Transport:
    case ErrorKind::FixtureMissing: return kPipelineFailure;
    default: return kDataError;
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::MissingFile, "cannot write " + path.string());
  out << text;
}

struct BatchEntry {
  std::string video_id;
  fs::path bundle;
};

/// batch.v1: {"schema":"batch.v1","videos":[{"video_id":..,"bundle":..}]};
/// bundle paths are relative to the batch file.
std::vector<BatchEntry> load_batch(const fs::path& path) {
  std::vector<BatchEntry> out;
  try {
    const auto j = nlohmann::json::parse(read_text(path));
    if (j.at("schema") != "batch.v1") throw Error(ErrorKind::SchemaError, path.string() + ": expected schema 'batch.v1'");
    for (const auto& v : j.at("videos")) {
      BatchEntry e{v.at("video_id").get<std::string>(), {}};
      if (v.contains("bundle")) {
        fs::path b = v.at("bundle").get<std::string>();
        e.bundle = b.is_absolute() ? b : path.parent_path() / b;
      }
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
  }
  return out;
}

Config config_from(const std::string& path) { return path.empty() ? Config{} : load_config(path); }

// ---------------------------------------------------------------- keyframes

struct KeyframesArgs {
  std::string trace, meta, out, speed_csv, config, edge;
  std::optional<int> window, separation;
  std::optional<double> prominence, confidence;
};

int cmd_keyframes(const KeyframesArgs& a, std::ostream& out) {
  if (a.window && (*a.window < 1 || *a.window % 2 == 0)) {
    throw CLI::ValidationError("--window", "must be an odd integer >= 1");
  }
  if (a.separation && *a.separation < 1) throw CLI::ValidationError("--separation", "must be >= 1");
  if (a.prominence && *a.prominence < 0) throw CLI::ValidationError("--prominence", "must be >= 0");

  Config config = config_from(a.config);
  SelectionOverrides sel = config.selection;
  if (a.window) sel.smooth_window = a.window;
  if (a.prominence) sel.min_prominence = a.prominence;
  if (a.separation) sel.min_separation = a.separation;
  if (!a.edge.empty()) sel.edge_policy = a.edge == "include-ends" ? EdgePolicy::IncludeEnds : EdgePolicy::ExcludeEnds;

  const HandTrace trace = load_hand_trace(a.trace, LoadOptions{a.confidence.value_or(config.min_confidence)});
  const VideoMeta meta = a.meta.empty() ? trace.meta : load_video_meta(a.meta);
  if (meta.video_id != trace.meta.video_id) {
    throw Error(ErrorKind::SchemaError, "meta video_id '" + meta.video_id + "' does not match trace '" +
                                            trace.meta.video_id + "'");
  }

  const SpeedSeries raw = compute_speed_series(trace, meta);
  const SelectionParams params = sel.resolve(raw);
  const SpeedSeries smoothed = interpolate_and_smooth(raw, params);
  const KeyframeSet keyframes = detect_troughs(smoothed, params);

  write_text(a.out, keyframes_to_json(keyframes) + "\n");
  if (!a.speed_csv.empty()) write_text(a.speed_csv, speed_csv(raw, smoothed));
  out << meta.video_id << ": " << keyframes.frames.size() << " keyframes\n";
  return kOk;
}

// ---------------------------------------------------------------- prompt

struct PromptArgs {
  std::string keyframes, tracks, frames, out, config;
  std::optional<int> parallelism;
};

int cmd_prompt(const PromptArgs& a, std::ostream& out) {
  const Config config = config_from(a.config);
  const KeyframeSet keyframes = load_keyframes(a.keyframes);
  const TrackSet tracks = load_object_tracks(a.tracks);
  if (tracks.meta.video_id != keyframes.video_id) {
    throw Error(ErrorKind::SchemaError, "tracks video_id '" + tracks.meta.video_id + "' does not match keyframes '" +
                                            keyframes.video_id + "'");
  }
  const PromptBundle bundle =
      build_bundle(keyframes, tracks.tracks, a.frames, config.overlay, a.parallelism.value_or(config.parallelism));
  const fs::path manifest = write_bundle(bundle, a.out);
  out << bundle.video_id << ": " << bundle.items.size() << " annotated keyframes -> " << manifest.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- interpret

struct InterpretArgs {
  std::string bundle, batch, out, config, fixtures, model;
  std::optional<int> parallelism;
};

struct VideoOutcome {
  int code = kOk;
  std::string message;
};

int cmd_interpret(const InterpretArgs& a, std::ostream& out, std::ostream& err) {
  Config config = config_from(a.config);
  if (!a.fixtures.empty()) config.fixtures_dir = fs::path(a.fixtures);
  if (!a.model.empty()) config.model_name = a.model;
  if (a.parallelism) config.parallelism = *a.parallelism;
  config.validate();
  const auto client = make_chat_client(config);

  std::vector<BatchEntry> videos;
  if (!a.batch.empty()) {
    videos = load_batch(a.batch);
  } else {
    videos.push_back({{}, a.bundle});
  }

  InterpreterOptions options;
  options.model_name = config.model_name;
  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);

  std::vector<VideoOutcome> outcomes(videos.size());
  const auto work = [&](std::size_t i) {
    const BatchEntry& entry = videos[i];
    VideoOutcome& result = outcomes[i];
    PromptBundle bundle;
    try {
      bundle = load_bundle(entry.bundle);
      if (!entry.video_id.empty() && entry.video_id != bundle.video_id) {
        throw Error(ErrorKind::SchemaError, "batch lists '" + entry.video_id + "' but bundle holds '" + bundle.video_id + "'");
      }
    } catch (const Error& e) {
      result = {exit_code_for(e.kind()), (entry.video_id.empty() ? entry.bundle.string() : entry.video_id) + ": " + e.what()};
      return;
    }
    CoTTranscript transcript;
    try {
      const Plan plan = interpret_video(bundle, *client, transcript, options);
      write_text(out_dir / (bundle.video_id + ".plan.txt"), render_plan(plan));
      result.message = bundle.video_id + ": " + std::to_string(plan.size()) + " steps";
    } catch (const Error& e) {
      result = {exit_code_for(e.kind()), bundle.video_id + ": " + e.what()};
    }
    write_text(out_dir / (bundle.video_id + ".transcript.jsonl"), transcript.to_jsonl());
  };

  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), videos.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < videos.size(); i = next++) work(i);
    });
  }
  for (auto& t : pool) t.join();

  int code = kOk;
  for (const auto& o : outcomes) {
    (o.code == kOk ? out : err) << o.message << '\n';
    if (o.code == kDataError || (o.code != kOk && code == kOk)) code = o.code;
  }
  return code;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred_dir, gt_dir, batch, videos, out, model = "seedo";
  bool fuzzy = false;
};

std::vector<ModelReport> single(const std::string& model, const std::vector<EvalRecord>& records) {
  return {ModelReport{model, aggregate(records)}};
}

void write_reports(const fs::path& out_dir, const std::vector<ModelReport>& reports, std::ostream& out) {
  write_text(out_dir / "report.csv", report_csv(reports));
  write_text(out_dir / "errors.csv", errors_csv(reports));
  write_text(out_dir / "report.svg", report_svg(reports));
  out << report_csv(reports);
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> ids;
  if (!a.batch.empty()) {
    for (const auto& e : load_batch(a.batch)) ids.push_back(e.video_id);
  } else if (!a.videos.empty()) {
    std::istringstream in(a.videos);
    std::string id;
    while (std::getline(in, id, ',')) {
      if (!id.empty()) ids.push_back(id);
    }
  } else {
    if (!fs::is_directory(a.gt_dir)) throw Error(ErrorKind::MissingFile, a.gt_dir);
    for (const auto& entry : fs::directory_iterator(a.gt_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > 8 && name.ends_with(".gt.json")) ids.push_back(name.substr(0, name.size() - 8));
    }
    std::sort(ids.begin(), ids.end());
  }
  if (ids.empty()) throw Error(ErrorKind::MissingFile, "no videos to evaluate");

  std::vector<EvalRecord> records;
  for (const auto& id : ids) {
    const fs::path gt_path = fs::path(a.gt_dir) / (id + ".gt.json");
    if (!fs::exists(gt_path)) throw Error(ErrorKind::MissingFile, "no ground truth for '" + id + "' at " + gt_path.string());
    GroundTruth gt;
    try {
      gt = load_ground_truth(gt_path);
    } catch (const Error& e) {
      throw Error(e.kind(), gt_path.string() + ": " + e.detail());
    }
    if (gt.video_id != id) throw Error(ErrorKind::SchemaError, gt_path.string() + ": holds video_id '" + gt.video_id + "'");

    const fs::path pred_path = fs::path(a.pred_dir) / (id + ".plan.txt");
    Plan pred;
    if (fs::exists(pred_path)) {
      pred = load_plan(pred_path);
    } else {
      err << id << ": no predicted plan, scored as empty\n";
    }
    if (a.fuzzy) pred = canonicalize_names(pred, gt.steps);
    records.push_back(evaluate(id, gt.task_category, pred, gt.steps));
  }

  const fs::path out_dir = a.out;
  write_text(out_dir / "records.csv", records_csv(records));
  write_reports(out_dir, single(a.model, records), out);
  return kOk;
}

// ---------------------------------------------------------------- compare / report

struct CompareArgs {
  std::string automated, manual, column = "score", out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const auto automated = parse_score_csv(read_text(a.automated), a.column);
  const auto manual = parse_score_csv(read_text(a.manual), a.column);
  const ComparisonOutput result = compare_score_tables(automated, manual);
  if (!a.out.empty()) {
    write_text(fs::path(a.out) / "diffs.csv", result.diffs_csv);
    write_text(fs::path(a.out) / "summary.csv", result.summary_csv);
  }
  out << result.summary_csv;
  return kOk;
}

struct ReportArgs {
  std::vector<std::string> records;
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::vector<ModelReport> reports;
  for (const auto& spec : a.records) {
    const auto eq = spec.find('=');
    const std::string model = eq == std::string::npos ? fs::path(spec).stem().string() : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const auto records = parse_records_csv(read_text(path));
    reports.push_back({model, aggregate(records)});
  }
  write_reports(a.out, reports, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Turn pick-and-place demonstration videos into robot task plans and score them."};
  app.name(args.empty() ? "seedo" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  KeyframesArgs kf;
  auto* keyframes = app.add_subcommand("keyframes", "Select keyframes at hand-speed troughs");
  keyframes->add_option("--trace", kf.trace, "handtrace.v1 file")->required();
  keyframes->add_option("--meta", kf.meta, "meta.v1 file (defaults to the trace header)");
  keyframes->add_option("--window", kf.window, "Moving-average window (odd frames)");
  keyframes->add_option("--prominence", kf.prominence, "Minimum trough prominence (px/s)");
  keyframes->add_option("--separation", kf.separation, "Minimum keyframe separation (frames)");
  keyframes->add_option("--edge", kf.edge, "Edge policy")->check(CLI::IsMember({"include-ends", "exclude-ends"}));
  keyframes->add_option("--confidence", kf.confidence, "Drop hand detections below this confidence");
  keyframes->add_option("--out", kf.out, "Output keyframes.v1 file")->required();
  keyframes->add_option("--speed-csv", kf.speed_csv, "Also write the raw and smoothed speed series");
  keyframes->add_option("--config", kf.config, "Config file");

  PromptArgs pr;
  auto* prompt = app.add_subcommand("prompt", "Render visual prompts onto keyframes");
  prompt->add_option("--keyframes", pr.keyframes, "keyframes.v1 file")->required();
  prompt->add_option("--tracks", pr.tracks, "tracks.v1 file")->required();
  prompt->add_option("--frames", pr.frames, "Directory of frame_{index}.png images")->required();
  prompt->add_option("--out", pr.out, "Output directory for the bundle")->required();
  prompt->add_option("--config", pr.config, "Config file");
  prompt->add_option("--parallelism", pr.parallelism, "Frames rendered concurrently")->check(CLI::PositiveNumber);

  InterpretArgs in;
  auto* interpret = app.add_subcommand("interpret", "Run the chain-of-thought interpreter");
  auto* bundle_opt = interpret->add_option("--bundle", in.bundle, "bundle.v1 manifest");
  auto* batch_opt = interpret->add_option("--batch", in.batch, "batch.v1 manifest listing bundles");
  bundle_opt->excludes(batch_opt);
  interpret->add_option("--out", in.out, "Output directory for plans and transcripts")->required();
  interpret->add_option("--config", in.config, "Config file");
  interpret->add_option("--fixtures", in.fixtures, "Replay responses from this fixtures directory");
  interpret->add_option("--model", in.model, "Model name");
  interpret->add_option("--parallelism", in.parallelism, "Videos interpreted concurrently")->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score predicted plans against ground truth");
  eval->add_option("--pred-dir", ev.pred_dir, "Directory of <video_id>.plan.txt")->required();
  eval->add_option("--gt-dir", ev.gt_dir, "Directory of <video_id>.gt.json")->required();
  eval->add_option("--batch", ev.batch, "batch.v1 manifest selecting the videos");
  eval->add_option("--videos", ev.videos, "Comma-separated video ids");
  eval->add_option("--out", ev.out, "Output directory")->required();
  eval->add_option("--model", ev.model, "Model label in the report");
  eval->add_flag("--fuzzy", ev.fuzzy, "Snap predicted names onto ground-truth names (edit distance <= 2)");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Compare automated and manual scores");
  compare->add_option("--auto", cmp.automated, "Automated score CSV")->required();
  compare->add_option("--manual", cmp.manual, "Manual score CSV")->required();
  compare->add_option("--column", cmp.column, "Score column name");
  compare->add_option("--out", cmp.out, "Output directory for diffs.csv and summary.csv");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Combine per-video records of several models");
  report->add_option("--records", rep.records, "model=records.csv (repeatable)")->required();
  report->add_option("--out", rep.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
    if (interpret->parsed() && in.bundle.empty() && in.batch.empty()) {
      throw CLI::RequiredError("--bundle or --batch");
    }
    if (keyframes->parsed()) return cmd_keyframes(kf, out);
    if (prompt->parsed()) return cmd_prompt(pr, out);
    if (interpret->parsed()) return cmd_interpret(in, out, err);
    if (eval->parsed()) return cmd_eval(ev, out, err);
    if (compare->parsed()) return cmd_compare(cmp, out);
    if (report->parsed()) return cmd_report(rep, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace seedo::cli
