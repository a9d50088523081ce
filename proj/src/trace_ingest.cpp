#include "seedo/trace_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "seedo/error.hpp"
#include "seedo/step_parser.hpp"

namespace seedo {
namespace {

using nlohmann::json;

struct Record {
  std::size_t line = 0;
  json value;
};

/// Integral floats print as integers so that 30 and 30.0 serialize alike.
json canonical(const json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 9.0e15) return json(static_cast<std::int64_t>(v));
    return j;
  }
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto& item : out) item = canonical(item);
    return out;
  }
  return j;
}

std::string emit(const json& j) { return canonical(j).dump(); }

[[noreturn]] void schema_error(std::size_t line, const std::string& what) {
  throw PositionedError(ErrorKind::SchemaError, line, "line " + std::to_string(line) + ": " + what);
}

std::vector<Record> read_records(std::istream& in) {
  std::vector<Record> records;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back({line, json::parse(text)});
    } catch (const json::parse_error& e) {
      schema_error(line, std::string("malformed record: ") + e.what());
    }
    if (!records.back().value.is_object()) schema_error(line, "record is not an object");
  }
  return records;
}

std::ifstream open_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  return in;
}

const json& field(const Record& r, const char* name) {
  auto it = r.value.find(name);
  if (it == r.value.end()) schema_error(r.line, std::string("missing field '") + name + "'");
  return *it;
}

double number(const Record& r, const char* name) {
  const json& v = field(r, name);
  if (!v.is_number()) schema_error(r.line, std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

int integer(const Record& r, const char* name) {
  const json& v = field(r, name);
  if (!v.is_number_integer()) schema_error(r.line, std::string("field '") + name + "' must be an integer");
  return v.get<int>();
}

std::string string_field(const Record& r, const char* name) {
  const json& v = field(r, name);
  if (!v.is_string()) schema_error(r.line, std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

PointListd point_list(const Record& r, const json& v, const char* name) {
  if (!v.is_array()) schema_error(r.line, std::string("field '") + name + "' must be a list of [x, y]");
  PointListd pts(static_cast<Eigen::Index>(v.size()), 2);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& p = v[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      schema_error(r.line, std::string("field '") + name + "' entry " + std::to_string(i) + " is not [x, y]");
    }
    pts(static_cast<Eigen::Index>(i), 0) = p[0].get<double>();
    pts(static_cast<Eigen::Index>(i), 1) = p[1].get<double>();
  }
  return pts;
}

Point2d point(const Record& r, const json& v, const char* name) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    schema_error(r.line, std::string("field '") + name + "' must be [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

json to_json(const PointListd& pts) {
  json out = json::array();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) out.push_back({pts(i, 0), pts(i, 1)});
  return out;
}

void expect_schema(const Record& header, std::string_view schema) {
  const std::string got = string_field(header, "schema");
  if (got != schema) schema_error(header.line, "expected schema '" + std::string(schema) + "', got '" + got + "'");
}

VideoMeta parse_meta(const Record& header) {
  VideoMeta meta;
  meta.video_id = string_field(header, "video_id");
  meta.fps = number(header, "fps");
  meta.frame_count = integer(header, "frame_count");
  meta.width = integer(header, "width");
  meta.height = integer(header, "height");
  if (!(meta.fps > 0)) schema_error(header.line, "fps must be positive");
  if (meta.frame_count < 1) schema_error(header.line, "frame_count must be >= 1");
  if (meta.width < 1 || meta.height < 1) schema_error(header.line, "width and height must be >= 1");
  return meta;
}

json meta_json(const VideoMeta& meta, std::string_view schema) {
  return {{"schema", schema},          {"video_id", meta.video_id}, {"fps", meta.fps},
          {"frame_count", meta.frame_count}, {"width", meta.width},       {"height", meta.height}};
}

void check_frame(const Record& r, int frame, const VideoMeta& meta) {
  if (frame < 0 || frame >= meta.frame_count) {
    schema_error(r.line, "frame " + std::to_string(frame) + " outside [0, " + std::to_string(meta.frame_count) + ")");
  }
}

}  // namespace

std::string_view category_name(TaskCategory category) {
  switch (category) {
    case TaskCategory::Vegetable: return "vegetable";
    case TaskCategory::Garment: return "garment";
    case TaskCategory::Block: return "block";
  }
  return "?";
}

std::optional<TaskCategory> category_from_name(std::string_view name) {
  for (auto c : kAllCategories) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

HandTrace parse_hand_trace(std::istream& in, const LoadOptions& options) {
  const auto records = read_records(in);
  if (records.empty()) throw Error(ErrorKind::SchemaError, "empty trace");
  expect_schema(records.front(), kHandTraceSchema);

  HandTrace trace;
  trace.meta = parse_meta(records.front());
  if (records.size() == 1) throw Error(ErrorKind::SchemaError, "empty trace");

  int previous = -1;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const Record& r = records[i];
    HandObservation obs;
    obs.frame = integer(r, "frame");
    check_frame(r, obs.frame, trace.meta);
    if (obs.frame <= previous) {
      throw PositionedError(ErrorKind::OrderError, r.line,
                            "line " + std::to_string(r.line) + ": frame " + std::to_string(obs.frame) +
                                " does not follow frame " + std::to_string(previous));
    }
    previous = obs.frame;
    obs.keypoints = point_list(r, field(r, "keypoints"), "keypoints");
    if (obs.keypoints.rows() == 0) schema_error(r.line, "observation has no keypoints");
    obs.confidence = number(r, "confidence");
    if (obs.confidence < 0 || obs.confidence > 1) schema_error(r.line, "confidence outside [0, 1]");
    if (obs.confidence < options.min_confidence) continue;
    trace.observations.push_back(std::move(obs));
  }
  return trace;
}

HandTrace load_hand_trace(const std::filesystem::path& path, const LoadOptions& options) {
  auto in = open_file(path);
  return parse_hand_trace(in, options);
}

TrackSet parse_object_tracks(std::istream& in) {
  const auto records = read_records(in);
  if (records.empty()) throw Error(ErrorKind::SchemaError, "empty tracks file");
  expect_schema(records.front(), kTracksSchema);

  TrackSet set;
  set.meta = parse_meta(records.front());
  std::set<int> seen;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const Record& r = records[i];
    ObjectTrack track;
    track.track_id = integer(r, "track_id");
    if (track.track_id < 0) schema_error(r.line, "track_id must be >= 0");
    if (!seen.insert(track.track_id).second) {
      throw PositionedError(ErrorKind::DuplicateTrackId, r.line,
                            "line " + std::to_string(r.line) + ": track_id " + std::to_string(track.track_id) +
                                " appears twice");
    }
    track.name = normalize_name(string_field(r, "name"));
    if (track.name.empty()) schema_error(r.line, "track name is empty");

    const json& frames = field(r, "frames");
    if (!frames.is_array()) schema_error(r.line, "field 'frames' must be a list");
    for (const json& f : frames) {
      if (!f.is_object()) schema_error(r.line, "frame entry is not an object");
      Record fr{r.line, f};
      const int index = integer(fr, "frame");
      check_frame(fr, index, set.meta);
      TrackFrame tf;
      tf.contour = point_list(fr, field(fr, "contour"), "contour");
      if (tf.contour.rows() < 3) {
        throw PositionedError(ErrorKind::DegenerateContour, r.line,
                              "line " + std::to_string(r.line) + ": track " + std::to_string(track.track_id) +
                                  " frame " + std::to_string(index) + " contour has fewer than 3 vertices");
      }
      const BBoxd hull = bounding_box(tf.contour);
      if (auto it = f.find("bbox"); it != f.end()) {
        const json& b = *it;
        if (!b.is_array() || b.size() != 4 || !std::all_of(b.begin(), b.end(), [](const json& x) { return x.is_number(); })) {
          schema_error(r.line, "bbox must be [x0, y0, x1, y1]");
        }
        tf.bbox = {{b[0].get<double>(), b[1].get<double>()}, {b[2].get<double>(), b[3].get<double>()}};
        if (!tf.bbox.contains(hull.min) || !tf.bbox.contains(hull.max)) {
          schema_error(r.line, "bbox does not contain every contour vertex");
        }
      } else {
        tf.bbox = hull;
      }
      if (auto it = f.find("centroid"); it != f.end()) {
        tf.centroid = point(fr, *it, "centroid");
      } else {
        tf.centroid = centroid_of_contour(tf.contour);
      }
      if (!tf.bbox.contains(tf.centroid)) schema_error(r.line, "centroid lies outside bbox");
      if (!track.frames.emplace(index, std::move(tf)).second) {
        schema_error(r.line, "frame " + std::to_string(index) + " listed twice for one track");
      }
    }
    set.tracks.push_back(std::move(track));
  }
  std::sort(set.tracks.begin(), set.tracks.end(),
            [](const ObjectTrack& a, const ObjectTrack& b) { return a.track_id < b.track_id; });
  return set;
}

TrackSet load_object_tracks(const std::filesystem::path& path) {
  auto in = open_file(path);
  return parse_object_tracks(in);
}

GroundTruth parse_ground_truth(std::istream& in) {
  const auto records = read_records(in);
  if (records.empty()) throw Error(ErrorKind::SchemaError, "empty ground-truth file");
  if (records.size() > 1) schema_error(records[1].line, "ground truth holds exactly one record");
  const Record& r = records.front();
  expect_schema(r, kGroundTruthSchema);

  GroundTruth gt;
  gt.video_id = string_field(r, "video_id");
  const std::string category = string_field(r, "task_category");
  auto parsed = category_from_name(category);
  if (!parsed) schema_error(r.line, "unknown task_category '" + category + "'");
  gt.task_category = *parsed;

  const json& steps = field(r, "steps");
  if (!steps.is_array()) schema_error(r.line, "field 'steps' must be a list of sentences");
  if (steps.empty()) schema_error(r.line, "steps list is empty");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!steps[i].is_string()) schema_error(r.line, "step " + std::to_string(i) + " is not a string");
    try {
      gt.steps.steps.push_back(parse_step_sentence(steps[i].get<std::string>()));
    } catch (const Error& e) {
      throw PositionedError(ErrorKind::StepParseError, i, "step " + std::to_string(i) + ": " + e.detail());
    }
  }
  return gt;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  auto in = open_file(path);
  return parse_ground_truth(in);
}

VideoMeta load_video_meta(const std::filesystem::path& path) {
  auto in = open_file(path);
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    Record r{line, {}};
    try {
      r.value = json::parse(text);
    } catch (const json::parse_error& e) {
      schema_error(line, std::string("malformed record: ") + e.what());
    }
    if (!r.value.is_object()) schema_error(line, "record is not an object");
    const std::string schema = string_field(r, "schema");
    if (schema != kMetaSchema && schema != kHandTraceSchema && schema != kTracksSchema) {
      schema_error(line, "schema '" + schema + "' carries no video metadata");
    }
    return parse_meta(r);
  }
  throw Error(ErrorKind::SchemaError, "empty metadata file");
}

void write_hand_trace(std::ostream& out, const HandTrace& trace) {
  out << emit(meta_json(trace.meta, kHandTraceSchema)) << '\n';
  for (const auto& obs : trace.observations) {
    json rec = {{"frame", obs.frame}, {"keypoints", to_json(obs.keypoints)}, {"confidence", obs.confidence}};
    out << emit(rec) << '\n';
  }
}

void write_object_tracks(std::ostream& out, const TrackSet& tracks) {
  out << emit(meta_json(tracks.meta, kTracksSchema)) << '\n';
  for (const auto& track : tracks.tracks) {
    json frames = json::array();
    for (const auto& [index, tf] : track.frames) {
      frames.push_back({{"frame", index},
                        {"contour", to_json(tf.contour)},
                        {"bbox", {tf.bbox.min.x(), tf.bbox.min.y(), tf.bbox.max.x(), tf.bbox.max.y()}},
                        {"centroid", {tf.centroid.x(), tf.centroid.y()}}});
    }
    json rec = {{"track_id", track.track_id}, {"name", track.name}, {"frames", std::move(frames)}};
    out << emit(rec) << '\n';
  }
}

void write_ground_truth(std::ostream& out, const GroundTruth& gt) {
  json steps = json::array();
  for (const auto& s : gt.steps.steps) steps.push_back(render_step(s));
  json rec = {{"schema", kGroundTruthSchema},
              {"video_id", gt.video_id},
              {"task_category", category_name(gt.task_category)},
              {"steps", std::move(steps)}};
  out << emit(rec) << '\n';
}

void write_video_meta(std::ostream& out, const VideoMeta& meta) {
  out << emit(meta_json(meta, kMetaSchema)) << '\n';
}

std::string normalize_records(std::istream& in) {
  std::ostringstream out;
  for (const auto& r : read_records(in)) out << emit(r.value) << '\n';
  return out.str();
}

}  // namespace seedo
