#include "testkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "seedo/chat_client.hpp"
#include "seedo/image.hpp"
#include "seedo/trace_ingest.hpp"

namespace fs = std::filesystem;
using namespace seedo;

namespace testkit {

TempDir::TempDir() {
  std::random_device rd;
  std::mt19937_64 rng(rd());
  for (;;) {
    path_ = fs::temp_directory_path() / ("seedo-test-" + std::to_string(rng()));
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ObjectRef obj(const std::string& name) { return {name, std::nullopt}; }
ObjectRef obj(const std::string& name, int id) { return {name, id}; }

PlanStep step(const std::string& picked, SpatialRelation relation, const std::string& reference) {
  return {obj(picked), relation, obj(reference)};
}

Plan plan(std::vector<PlanStep> steps) { return Plan{std::move(steps)}; }

Plan random_plan(std::mt19937& rng, int max_steps, int objects) {
  static const char* names[] = {"red chili", "white bowl", "orange carrot", "yellow corn", "green pepper"};
  std::uniform_int_distribution<int> len(0, max_steps);
  std::uniform_int_distribution<int> pick(0, objects - 1);
  std::uniform_int_distribution<int> other(0, objects - 2);
  std::uniform_int_distribution<int> rel(0, 5);
  Plan p;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    const int a = pick(rng);
    int b = other(rng);
    if (b >= a) ++b;
    p.steps.push_back(step(names[a], kAllRelations[static_cast<std::size_t>(rel(rng))], names[b]));
  }
  return p;
}

namespace oracle {

namespace {
bool same(const PlanStep& a, const PlanStep& b) {
  return a.picked.name == b.picked.name && a.picked.track_id == b.picked.track_id && a.relation == b.relation &&
         a.reference.name == b.reference.name && a.reference.track_id == b.reference.track_id;
}
}  // namespace

std::size_t greedy_matches(const Plan& pred, const Plan& gt) {
  std::size_t cursor = 0, matched = 0;
  for (std::size_t p = 0; p < pred.steps.size(); ++p) {
    std::size_t g = cursor;
    while (g < gt.steps.size() && !same(pred.steps[p], gt.steps[g])) ++g;
    if (g < gt.steps.size()) {
      ++matched;
      cursor = g + 1;
    }
  }
  return matched;
}

std::size_t lcs_length(const Plan& pred, const Plan& gt) {
  const std::size_t n = pred.steps.size(), m = gt.steps.size();
  std::vector<std::vector<std::size_t>> t(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      t[i][j] = same(pred.steps[i - 1], gt.steps[j - 1]) ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[n][m];
}

std::vector<double> truncated_mean(const std::vector<double>& values, int window) {
  const int n = static_cast<int>(values.size());
  const int half = window / 2;
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    int count = 0;
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
      sum += values[static_cast<std::size_t>(j)];
      ++count;
    }
    out[static_cast<std::size_t>(i)] = sum / count;
  }
  return out;
}

Eigen::Vector2d pixel_mass_centroid(const PointListd& polygon, int samples_per_unit) {
  const double x0 = polygon.col(0).minCoeff(), x1 = polygon.col(0).maxCoeff();
  const double y0 = polygon.col(1).minCoeff(), y1 = polygon.col(1).maxCoeff();
  const double step = 1.0 / samples_per_unit;
  const auto inside = [&](double x, double y) {
    bool in = false;
    for (Eigen::Index i = 0, j = polygon.rows() - 1; i < polygon.rows(); j = i++) {
      const double xi = polygon(i, 0), yi = polygon(i, 1), xj = polygon(j, 0), yj = polygon(j, 1);
      if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
    }
    return in;
  };
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  double mass = 0.0;
  for (double y = y0 + step / 2; y < y1; y += step) {
    for (double x = x0 + step / 2; x < x1; x += step) {
      if (inside(x, y)) {
        sum += Eigen::Vector2d(x, y);
        mass += 1.0;
      }
    }
  }
  return sum / mass;
}

std::vector<int> brute_force_minima(const std::vector<double>& v) {
  std::vector<int> out;
  const int n = static_cast<int>(v.size());
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[static_cast<std::size_t>(j + 1)] == v[static_cast<std::size_t>(i)]) ++j;
    const bool left = i > 0 && v[static_cast<std::size_t>(i - 1)] > v[static_cast<std::size_t>(i)];
    const bool right = j < n - 1 && v[static_cast<std::size_t>(j + 1)] > v[static_cast<std::size_t>(i)];
    if (left && right) out.push_back((i + j) / 2);
    i = j + 1;
  }
  return out;
}

}  // namespace oracle

PlantedSeries planted_dips(std::uint32_t seed, int k, int frames) {
  std::mt19937 rng(seed);
  PlantedSeries out;
  out.params.smooth_window = 9;
  out.params.min_prominence = 20.0;
  out.params.min_separation = 10;
  out.params.edge_policy = EdgePolicy::ExcludeEnds;

  const double base = 100.0, floor = 10.0;
  const int half_width = 8;
  const int margin = 20;
  const int gap = 2 * out.params.min_separation + 2 * half_width;

  // Spread k dips with at least `gap` frames between neighbours.
  const int slack = frames - 2 * margin - (k - 1) * gap;
  std::vector<int> offsets(static_cast<std::size_t>(k));
  std::uniform_int_distribution<int> spread(0, slack);
  for (auto& o : offsets) o = spread(rng);
  std::sort(offsets.begin(), offsets.end());
  for (int i = 0; i < k; ++i) out.dips.push_back(margin + i * gap + offsets[static_cast<std::size_t>(i)]);

  std::uniform_real_distribution<double> noise(-3.0, 3.0);
  std::vector<double> speed(static_cast<std::size_t>(frames));
  for (int f = 0; f < frames; ++f) {
    double v = base + noise(rng);
    for (int d : out.dips) {
      const double t = 1.0 - std::abs(f - d) / static_cast<double>(half_width);
      if (t > 0) v = std::min(v, base - (base - floor) * t);
    }
    speed[static_cast<std::size_t>(f)] = v;
  }

  std::vector<int> order(static_cast<std::size_t>(frames));
  for (int f = 0; f < frames; ++f) order[static_cast<std::size_t>(f)] = f;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < frames / 10; ++i) speed[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = SpeedSeries::kMissing;

  out.series.video_id = "planted-" + std::to_string(seed);
  out.series.fps = 30.0;
  out.series.speed = Eigen::Map<Eigen::VectorXd>(speed.data(), frames);
  return out;
}

namespace prompt1 {
namespace {

constexpr int kPickFrame = 10;
constexpr int kPlaceFrame = 40;

PointListd rect(double x0, double y0, double x1, double y1) {
  PointListd c(4, 2);
  c << x0, y0, x1, y0, x1, y1, x0, y1;
  return c;
}

std::vector<ObjectTrack> tracks() {
  std::vector<ObjectTrack> out;
  const auto add = [&](int id, const std::string& name, const PointListd& pick, const PointListd& place) {
    ObjectTrack t;
    t.track_id = id;
    t.name = name;
    for (auto [frame, contour] : {std::pair{kPickFrame, pick}, std::pair{kPlaceFrame, place}}) {
      t.frames[frame] = TrackFrame{contour, bounding_box(contour), centroid_of_contour(contour)};
    }
    out.push_back(std::move(t));
  };
  add(0, "red chili", rect(6, 30, 16, 36), rect(40, 22, 48, 28));
  add(1, "orange carrot", rect(20, 44, 34, 50), rect(20, 44, 34, 50));
  add(2, "white bowl", rect(36, 16, 56, 36), rect(36, 16, 56, 36));
  return out;
}

Image frame(int index) {
  Image img(64, 64, {200, 200, 190});
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      if ((x + y + index) % 17 == 0) img.set(x, y, {180, 170, 160});
    }
  }
  return img;
}

KeyframeSet keyframes(const std::string& video_id) {
  KeyframeSet set;
  set.video_id = video_id;
  set.frames = {kPickFrame, kPlaceFrame};
  set.params.smooth_window = 9;
  set.params.min_prominence = 5.0;
  set.params.min_separation = 15;
  return set;
}

}  // namespace

PromptBundle bundle(const std::string& video_id) {
  PromptBundle b;
  b.video_id = video_id;
  const auto all = tracks();
  for (int index : keyframes(video_id).frames) {
    PromptItem item;
    item.frame_index = index;
    const auto visible = tracks_at_frame(all, index);
    item.annotated = render_overlay(frame(index), visible, OverlayStyle{});
    for (const auto& t : visible) item.visible_tracks.push_back({t.track_id, t.name, t.centroid});
    item.coordinate_text = coordinate_text(item.visible_tracks);
    b.items.push_back(std::move(item));
  }
  return b;
}

std::map<std::string, std::string> responses(const PromptBundle& b, const InterpreterOptions& options) {
  const ObjectList objects{3, {"red chili", "orange carrot", "white bowl"}};
  const ObjectRef chili{"red chili", std::nullopt};
  const ObjectRef bowl{"white bowl", std::nullopt};
  const PromptItem& pick = b.items.at(0);
  const PromptItem& place = b.items.at(1);
  return {
      {request_digest(prompts::object_list(pick.annotated, options)),
       "Number: 3\nObjects: red chili, orange carrot, white bowl"},
      {request_digest(prompts::filter(pick, options)), "Hand is manipulating an object"},
      {request_digest(prompts::filter(place, options)), "Hand is manipulating an object"},
      {request_digest(prompts::picked(pick, objects, options)), "Object Picked: red chili"},
      {request_digest(prompts::reference(place, objects, chili, options)), "Reference Object: white bowl"},
      {request_digest(prompts::relation(place, objects, chili, bowl, options)), "Drop red chili in the white bowl"},
  };
}

Plan ground_truth() { return plan({step("red chili", SpatialRelation::In, "white bowl")}); }

OnDisk write_inputs(const fs::path& root, const std::string& video_id) {
  OnDisk d{root / (video_id + "_frames"), root / (video_id + ".keyframes.json"), root / (video_id + ".tracks.jsonl"),
           root / "fixtures", root / "gt" / (video_id + ".gt.json")};
  fs::create_directories(d.frames_dir);
  fs::create_directories(d.fixtures_dir);
  for (int index : {kPickFrame, kPlaceFrame}) {
    write_png(d.frames_dir / ("frame_" + std::to_string(index) + ".png"), frame(index));
  }
  write_file(d.keyframes, keyframes_to_json(keyframes(video_id)) + "\n");

  TrackSet set{VideoMeta{video_id, 30.0, 60, 64, 64}, tracks()};
  std::ostringstream tracks_out;
  write_object_tracks(tracks_out, set);
  write_file(d.tracks, tracks_out.str());

  for (const auto& [digest, response] : responses(bundle(video_id))) {
    write_file(d.fixtures_dir / (digest + ".txt"), response);
  }

  std::ostringstream gt_out;
  write_ground_truth(gt_out, GroundTruth{video_id, ground_truth(), TaskCategory::Vegetable});
  write_file(d.gt, gt_out.str());
  return d;
}

}  // namespace prompt1

}  // namespace testkit
