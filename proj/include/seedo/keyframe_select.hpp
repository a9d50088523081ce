#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "seedo/trace_ingest.hpp"

namespace seedo {

/// Per-frame hand speed in pixels/second. NaN marks a frame with no
/// measurement.
struct SpeedSeries {
  std::string video_id;
  double fps = 30.0;
  Eigen::VectorXd speed;

  static constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  Eigen::Index size() const { return speed.size(); }
  bool present(Eigen::Index i) const { return !std::isnan(speed[i]); }
  Eigen::Index present_count() const { return (speed.array() == speed.array()).count(); }
};

enum class EdgePolicy { IncludeEnds, ExcludeEnds };

struct SelectionParams {
  int smooth_window = 9;
  double min_prominence = 0.0;
  int min_separation = 1;
  EdgePolicy edge_policy = EdgePolicy::ExcludeEnds;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;

  /// Window 9, prominence 10% of the series' peak speed, separation fps/2.
  static SelectionParams defaults_for(const SpeedSeries& series);
};

struct KeyframeSet {
  std::string video_id;
  std::vector<int> frames;
  SelectionParams params;
};

SpeedSeries compute_speed_series(const HandTrace& trace, const VideoMeta& meta);

/// Fills gaps linearly (ends extended with the nearest value), then applies
/// a centered moving average truncated at the array edges.
SpeedSeries interpolate_and_smooth(const SpeedSeries& series, const SelectionParams& params);

/// Prominence-filtered local minima with plateau collapsing and
/// deepest-wins separation.
KeyframeSet detect_troughs(const SpeedSeries& smoothed, const SelectionParams& params);

/// compute -> interpolate/smooth -> detect, returning the smoothed series too.
struct KeyframeResult {
  SpeedSeries raw;
  SpeedSeries smoothed;
  KeyframeSet keyframes;
};
KeyframeResult select_keyframes(const HandTrace& trace, const VideoMeta& meta, const SelectionParams& params);

/// keyframes.v1 record (single line).
std::string keyframes_to_json(const KeyframeSet& set);
KeyframeSet keyframes_from_json(const std::string& text);
KeyframeSet load_keyframes(const std::filesystem::path& path);

/// "frame,raw_speed,smoothed_speed" CSV; missing raw speeds are empty cells.
std::string speed_csv(const SpeedSeries& raw, const SpeedSeries& smoothed);

}  // namespace seedo
