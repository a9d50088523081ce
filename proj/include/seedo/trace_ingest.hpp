#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seedo/geometry.hpp"
#include "seedo/plan_model.hpp"

namespace seedo {

inline constexpr std::string_view kHandTraceSchema = "handtrace.v1";
inline constexpr std::string_view kTracksSchema = "tracks.v1";
inline constexpr std::string_view kGroundTruthSchema = "gt.v1";
inline constexpr std::string_view kMetaSchema = "meta.v1";

struct VideoMeta {
  std::string video_id;
  double fps = 30.0;
  int frame_count = 1;
  int width = 1;
  int height = 1;

  bool operator==(const VideoMeta&) const = default;
};

struct HandObservation {
  int frame = 0;
  PointListd keypoints;
  double confidence = 1.0;
};

struct HandTrace {
  VideoMeta meta;
  /// Strictly increasing frame indices; frames without a detection are absent.
  std::vector<HandObservation> observations;
};

struct TrackFrame {
  PointListd contour;
  BBoxd bbox;
  Point2d centroid;
};

struct ObjectTrack {
  int track_id = 0;
  std::string name;
  std::map<int, TrackFrame> frames;
};

struct TrackSet {
  VideoMeta meta;
  /// Sorted by track_id, IDs unique.
  std::vector<ObjectTrack> tracks;
};

enum class TaskCategory { Vegetable, Garment, Block };

inline constexpr std::array<TaskCategory, 3> kAllCategories = {
    TaskCategory::Vegetable, TaskCategory::Garment, TaskCategory::Block};

std::string_view category_name(TaskCategory category);
std::optional<TaskCategory> category_from_name(std::string_view name);

struct GroundTruth {
  std::string video_id;
  Plan steps;
  TaskCategory task_category = TaskCategory::Vegetable;
};

struct LoadOptions {
  /// Observations below this confidence are dropped as detector misses.
  double min_confidence = 0.5;
};

HandTrace load_hand_trace(const std::filesystem::path& path, const LoadOptions& options = {});
HandTrace parse_hand_trace(std::istream& in, const LoadOptions& options = {});

TrackSet load_object_tracks(const std::filesystem::path& path);
TrackSet parse_object_tracks(std::istream& in);

GroundTruth load_ground_truth(const std::filesystem::path& path);
GroundTruth parse_ground_truth(std::istream& in);

/// Reads the VideoMeta header from a meta.v1, handtrace.v1, or tracks.v1 file.
VideoMeta load_video_meta(const std::filesystem::path& path);

/// Canonical serializers; keys are emitted in sorted order, one record per line.
void write_hand_trace(std::ostream& out, const HandTrace& trace);
void write_object_tracks(std::ostream& out, const TrackSet& tracks);
void write_ground_truth(std::ostream& out, const GroundTruth& gt);
void write_video_meta(std::ostream& out, const VideoMeta& meta);

/// Rewrites every record of a schema file with sorted keys, for comparing
/// files independent of field order.
std::string normalize_records(std::istream& in);

}  // namespace seedo
