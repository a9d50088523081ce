#include "seedo/keyframe_select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seedo/error.hpp"

namespace seedo {
namespace {

const char* edge_policy_name(EdgePolicy p) {
  return p == EdgePolicy::IncludeEnds ? "include-ends" : "exclude-ends";
}

struct Trough {
  int frame;
  double value;
};

}  // namespace

void SelectionParams::validate() const {
  if (smooth_window < 1 || smooth_window % 2 == 0) {
    throw Error(ErrorKind::ConfigError, "smooth_window must be an odd integer >= 1, got " + std::to_string(smooth_window));
  }
  if (!(min_prominence >= 0)) throw Error(ErrorKind::ConfigError, "min_prominence must be >= 0");
  if (min_separation < 1) throw Error(ErrorKind::ConfigError, "min_separation must be >= 1");
}

SelectionParams SelectionParams::defaults_for(const SpeedSeries& series) {
  SelectionParams p;
  double peak = 0.0;
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    if (series.present(i)) peak = std::max(peak, series.speed[i]);
  }
  p.min_prominence = 0.1 * peak;
  p.min_separation = std::max(1, static_cast<int>(std::lround(series.fps / 2.0)));
  return p;
}

SpeedSeries compute_speed_series(const HandTrace& trace, const VideoMeta& meta) {
  if (!(meta.fps > 0)) throw Error(ErrorKind::SchemaError, "fps must be positive");
  SpeedSeries series;
  series.video_id = meta.video_id;
  series.fps = meta.fps;
  series.speed = Eigen::VectorXd::Constant(meta.frame_count, SpeedSeries::kMissing);

  const HandObservation* prev = nullptr;
  Point2d prev_center;
  for (const auto& obs : trace.observations) {
    if (obs.frame < 0 || obs.frame >= meta.frame_count) {
      throw Error(ErrorKind::SchemaError, "observation frame " + std::to_string(obs.frame) + " outside video");
    }
    const Point2d center = center_of_keypoints(obs.keypoints);
    if (prev) {
      const double dt = (obs.frame - prev->frame) / meta.fps;
      series.speed[obs.frame] = (center - prev_center).norm() / dt;
    }
    prev = &obs;
    prev_center = center;
  }
  return series;
}

SpeedSeries interpolate_and_smooth(const SpeedSeries& series, const SelectionParams& params) {
  params.validate();
  const Eigen::Index n = series.size();
  std::vector<Eigen::Index> known;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (series.present(i)) known.push_back(i);
  }
  if (known.size() < 2) {
    throw Error(ErrorKind::TooSparse, "need at least 2 speed samples, have " + std::to_string(known.size()));
  }

  Eigen::VectorXd filled = series.speed;
  filled.head(known.front()).setConstant(series.speed[known.front()]);
  filled.tail(n - 1 - known.back()).setConstant(series.speed[known.back()]);
  for (std::size_t k = 0; k + 1 < known.size(); ++k) {
    const Eigen::Index a = known[k], b = known[k + 1];
    for (Eigen::Index i = a + 1; i < b; ++i) {
      const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
      filled[i] = (1.0 - t) * series.speed[a] + t * series.speed[b];
    }
  }

  SpeedSeries out{series.video_id, series.fps, Eigen::VectorXd(n)};
  const Eigen::Index half = params.smooth_window / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
    const auto window = filled.segment(lo, hi - lo + 1);
    // Mean of deviations from the first sample keeps constant runs exact.
    out.speed[i] = window[0] + (window.array() - window[0]).mean();
  }
  return out;
}

KeyframeSet detect_troughs(const SpeedSeries& smoothed, const SelectionParams& params) {
  params.validate();
  const Eigen::VectorXd& x = smoothed.speed;
  const Eigen::Index n = x.size();
  if (smoothed.present_count() != n) throw Error(ErrorKind::TooSparse, "trough detection needs a gap-free series");

  std::vector<Trough> candidates;
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start;
    while (end + 1 < n && x[end + 1] == x[start]) ++end;
    const double v = x[start];
    const bool has_left = start > 0, has_right = end + 1 < n;
    const bool left_higher = has_left && x[start - 1] > v;
    const bool right_higher = has_right && x[end + 1] > v;

    bool is_min = left_higher && right_higher;
    if (params.edge_policy == EdgePolicy::IncludeEnds && (has_left || has_right)) {
      is_min = is_min || (!has_left && right_higher) || (!has_right && left_higher);
    }
    if (is_min) {
      double left_peak = -1.0, right_peak = -1.0;
      for (Eigen::Index k = start - 1; k >= 0 && x[k] >= v; --k) left_peak = std::max(left_peak, x[k]);
      for (Eigen::Index k = end + 1; k < n && x[k] >= v; ++k) right_peak = std::max(right_peak, x[k]);
      double peak;
      if (has_left && has_right) {
        peak = std::min(left_peak, right_peak);
      } else {
        peak = has_left ? left_peak : right_peak;
      }
      if (peak - v >= params.min_prominence) {
        candidates.push_back({static_cast<int>((start + end) / 2), v});
      }
    }
    start = end + 1;
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const Trough& a, const Trough& b) {
    return a.value < b.value || (a.value == b.value && a.frame < b.frame);
  });
  KeyframeSet result{smoothed.video_id, {}, params};
  for (const auto& c : candidates) {
    const bool clear = std::all_of(result.frames.begin(), result.frames.end(),
                                   [&](int f) { return std::abs(f - c.frame) >= params.min_separation; });
    if (clear) result.frames.push_back(c.frame);
  }
  std::sort(result.frames.begin(), result.frames.end());
  return result;
}

KeyframeResult select_keyframes(const HandTrace& trace, const VideoMeta& meta, const SelectionParams& params) {
  KeyframeResult r;
  r.raw = compute_speed_series(trace, meta);
  r.smoothed = interpolate_and_smooth(r.raw, params);
  r.keyframes = detect_troughs(r.smoothed, params);
  return r;
}

std::string keyframes_to_json(const KeyframeSet& set) {
  nlohmann::json j = {{"schema", "keyframes.v1"},
                      {"video_id", set.video_id},
                      {"frames", set.frames},
                      {"params",
                       {{"smooth_window", set.params.smooth_window},
                        {"min_prominence", set.params.min_prominence},
                        {"min_separation", set.params.min_separation},
                        {"edge_policy", edge_policy_name(set.params.edge_policy)}}}};
  return j.dump();
}

KeyframeSet keyframes_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    if (j.at("schema") != "keyframes.v1") throw Error(ErrorKind::SchemaError, "expected schema 'keyframes.v1'");
    KeyframeSet set;
    set.video_id = j.at("video_id").get<std::string>();
    set.frames = j.at("frames").get<std::vector<int>>();
    const auto& p = j.at("params");
    set.params.smooth_window = p.at("smooth_window").get<int>();
    set.params.min_prominence = p.at("min_prominence").get<double>();
    set.params.min_separation = p.at("min_separation").get<int>();
    set.params.edge_policy =
        p.at("edge_policy").get<std::string>() == "include-ends" ? EdgePolicy::IncludeEnds : EdgePolicy::ExcludeEnds;
    for (std::size_t i = 0; i < set.frames.size(); ++i) {
      if (set.frames[i] < 0 || (i > 0 && set.frames[i] <= set.frames[i - 1])) {
        throw Error(ErrorKind::SchemaError, "keyframe indices must be non-negative and strictly increasing");
      }
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("keyframes.v1: ") + e.what());
  }
}

KeyframeSet load_keyframes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return keyframes_from_json(ss.str());
}

std::string speed_csv(const SpeedSeries& raw, const SpeedSeries& smoothed) {
  std::ostringstream os;
  os << "frame,raw_speed,smoothed_speed\n";
  char buf[64];
  for (Eigen::Index i = 0; i < smoothed.size(); ++i) {
    os << i << ',';
    if (i < raw.size() && raw.present(i)) {
      std::snprintf(buf, sizeof buf, "%.4f", raw.speed[i]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.4f", smoothed.speed[i]);
    os << ',' << buf << '\n';
  }
  return os.str();
}

}  // namespace seedo
