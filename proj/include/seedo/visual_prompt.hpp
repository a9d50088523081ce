#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "seedo/geometry.hpp"
#include "seedo/image.hpp"
#include "seedo/keyframe_select.hpp"
#include "seedo/trace_ingest.hpp"

namespace seedo {

struct OverlayStyle {
  int stroke_width = 1;
  /// Track k is drawn in palette[k % palette.size()].
  std::vector<Rgb> palette = default_palette();
  Eigen::Vector2i label_offset{4, -12};
  /// Bitmap glyphs are 7 px tall; the label is scaled by font_size / 7 (at least 1).
  int font_size = 7;

  void validate() const;
  static std::vector<Rgb> default_palette();
};

struct TrackAtFrame {
  int track_id = 0;
  std::string name;
  PointListd contour;
  Point2d centroid;
};

struct VisibleTrack {
  int track_id = 0;
  std::string name;
  Point2d centroid;

  bool operator==(const VisibleTrack&) const = default;
};

struct PromptItem {
  int frame_index = 0;
  Image annotated;
  std::string coordinate_text;
  std::vector<VisibleTrack> visible_tracks;
};

struct PromptBundle {
  std::string video_id;
  std::vector<PromptItem> items;
};

/// Copy of `image` with each contour drawn as a closed polyline and an
/// "ID:k" label at centroid + label_offset. Out-of-bounds geometry is clipped.
Image render_overlay(const Image& image, std::span<const TrackAtFrame> tracks, const OverlayStyle& style);

/// "ID:{k} {name} center=({x},{y})" lines, sorted by track_id, coordinates
/// rounded to integers.
std::string coordinate_text(std::vector<VisibleTrack> visible);

/// Tracks with an entry at `frame`, in track_id order.
std::vector<TrackAtFrame> tracks_at_frame(std::span<const ObjectTrack> tracks, int frame);

/// Reads frame_{index}.png for every keyframe and annotates it. Frames are
/// processed on up to `parallelism` threads; items come back in frame order.
PromptBundle build_bundle(const KeyframeSet& keyframes, std::span<const ObjectTrack> tracks,
                          const std::filesystem::path& frames_dir, const OverlayStyle& style,
                          int parallelism = 1);

/// Writes kf_{index}_annotated.png per item and a bundle.json manifest.
/// Returns the manifest path.
std::filesystem::path write_bundle(const PromptBundle& bundle, const std::filesystem::path& out_dir);
PromptBundle load_bundle(const std::filesystem::path& manifest);

}  // namespace seedo
