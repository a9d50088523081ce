#include "seedo/visual_prompt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "seedo/bitmap_font.hpp"
#include "seedo/error.hpp"

namespace seedo {
namespace {

class Canvas {
 public:
  Canvas(Image& image, Rgb color, int stroke) : image_(image), color_(color), stroke_(stroke) {}

  void stamp(long x, long y) {
    const long lo = -(stroke_ - 1) / 2;
    for (long dy = lo; dy < lo + stroke_; ++dy) {
      for (long dx = lo; dx < lo + stroke_; ++dx) plot(x + dx, y + dy);
    }
  }

  void plot(long x, long y) {
    if (x >= 0 && y >= 0 && x < image_.width() && y < image_.height()) {
      image_.set(static_cast<int>(x), static_cast<int>(y), color_);
    }
  }

  // Bresenham between integer endpoints.
  void line(long x0, long y0, long x1, long y1) {
    const long dx = std::labs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const long dy = -std::labs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    long err = dx + dy;
    for (;;) {
      stamp(x0, y0);
      if (x0 == x1 && y0 == y1) break;
      const long e2 = 2 * err;
      if (e2 >= dy) err += dy, x0 += sx;
      if (e2 <= dx) err += dx, y0 += sy;
    }
  }

 private:
  Image& image_;
  Rgb color_;
  int stroke_;
};

// Liang-Barsky clip of a real segment to [lo, hi]^2; false when fully outside.
bool clip_segment(Point2d& a, Point2d& b, const Point2d& lo, const Point2d& hi) {
  double t0 = 0.0, t1 = 1.0;
  const Point2d d = b - a;
  for (int axis = 0; axis < 2; ++axis) {
    const double p[2] = {-d[axis], d[axis]};
    const double q[2] = {a[axis] - lo[axis], hi[axis] - a[axis]};
    for (int k = 0; k < 2; ++k) {
      if (p[k] == 0.0) {
        if (q[k] < 0) return false;
        continue;
      }
      const double t = q[k] / p[k];
      if (p[k] < 0) t0 = std::max(t0, t);
      else t1 = std::min(t1, t);
    }
  }
  if (t0 > t1) return false;
  const Point2d start = a;
  a = start + t0 * d;
  b = start + t1 * d;
  return true;
}

void draw_contour(Image& image, const PointListd& contour, Rgb color, int stroke) {
  Canvas canvas(image, color, stroke);
  // Segments that stay near the canvas are rasterized from their own
  // vertices; only far-flung ones are clipped first.
  const double margin = 2.0 + stroke;
  const Point2d lo(-margin, -margin);
  const Point2d hi(image.width() - 1 + margin, image.height() - 1 + margin);
  const Eigen::Index n = contour.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    Point2d a = contour.row(i).transpose();
    Point2d b = contour.row((i + 1) % n).transpose();
    const double limit = 4.0 * (image.width() + image.height());
    const bool far = (a.array().abs() > limit).any() || (b.array().abs() > limit).any();
    if (far && !clip_segment(a, b, lo, hi)) continue;
    canvas.line(std::lround(a.x()), std::lround(a.y()), std::lround(b.x()), std::lround(b.y()));
  }
}

void draw_text(Image& image, const std::string& text, long left, long top, int scale, Rgb color) {
  Canvas canvas(image, color, 1);
  long pen = left;
  for (char c : text) {
    if (auto g = font::glyph(c)) {
      for (int row = 0; row < font::kGlyphHeight; ++row) {
        for (int col = 0; col < font::kGlyphWidth; ++col) {
          if (!((*g)[row] & (1u << (font::kGlyphWidth - 1 - col)))) continue;
          for (int sy = 0; sy < scale; ++sy) {
            for (int sx = 0; sx < scale; ++sx) {
              canvas.plot(pen + col * scale + sx, top + row * scale + sy);
            }
          }
        }
      }
    }
    pen += font::kAdvance * scale;
  }
}

std::string format_center(const Point2d& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "center=(%.0f,%.0f)", p.x(), p.y());
  return buf;
}

}  // namespace

std::vector<Rgb> OverlayStyle::default_palette() {
  return {{230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},
          {245, 130, 48}, {145, 30, 180}, {70, 240, 240}, {240, 50, 230}};
}

void OverlayStyle::validate() const {
  if (stroke_width < 1) throw Error(ErrorKind::ConfigError, "stroke_width must be >= 1");
  if (palette.empty()) throw Error(ErrorKind::ConfigError, "palette must not be empty");
  if (font_size < 1) throw Error(ErrorKind::ConfigError, "font_size must be >= 1");
}

Image render_overlay(const Image& image, std::span<const TrackAtFrame> tracks, const OverlayStyle& style) {
  if (image.empty()) throw Error(ErrorKind::EmptyImage, "cannot annotate an empty image");
  style.validate();
  Image out = image;
  const auto color_of = [&](int id) { return style.palette[static_cast<std::size_t>(id) % style.palette.size()]; };
  for (const auto& t : tracks) draw_contour(out, t.contour, color_of(t.track_id), style.stroke_width);

  const int scale = std::max(1, style.font_size / font::kGlyphHeight);
  for (const auto& t : tracks) {
    const long left = std::lround(t.centroid.x()) + style.label_offset.x();
    const long top = std::lround(t.centroid.y()) + style.label_offset.y();
    draw_text(out, "ID:" + std::to_string(t.track_id), left, top, scale, color_of(t.track_id));
  }
  return out;
}

std::string coordinate_text(std::vector<VisibleTrack> visible) {
  std::stable_sort(visible.begin(), visible.end(),
                   [](const VisibleTrack& a, const VisibleTrack& b) { return a.track_id < b.track_id; });
  std::string out;
  for (const auto& v : visible) {
    if (!out.empty()) out += '\n';
    out += "ID:" + std::to_string(v.track_id) + ' ' + v.name + ' ' + format_center(v.centroid);
  }
  return out;
}

std::vector<TrackAtFrame> tracks_at_frame(std::span<const ObjectTrack> tracks, int frame) {
  std::vector<TrackAtFrame> out;
  for (const auto& track : tracks) {
    auto it = track.frames.find(frame);
    if (it == track.frames.end()) continue;
    out.push_back({track.track_id, track.name, it->second.contour, it->second.centroid});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.track_id < b.track_id; });
  return out;
}

PromptBundle build_bundle(const KeyframeSet& keyframes, std::span<const ObjectTrack> tracks,
                          const std::filesystem::path& frames_dir, const OverlayStyle& style, int parallelism) {
  style.validate();
  // Fail on a missing frame before spending time on the others.
  for (int index : keyframes.frames) {
    if (!std::filesystem::exists(frames_dir / ("frame_" + std::to_string(index) + ".png"))) {
      throw PositionedError(ErrorKind::MissingFrameImage, static_cast<std::size_t>(index),
                            "no image frame_" + std::to_string(index) + ".png in " + frames_dir.string());
    }
  }

  const auto make_item = [&](int index) {
    PromptItem item;
    item.frame_index = index;
    const Image frame = read_png(frames_dir / ("frame_" + std::to_string(index) + ".png"));
    const auto visible = tracks_at_frame(tracks, index);
    item.annotated = render_overlay(frame, visible, style);
    for (const auto& t : visible) item.visible_tracks.push_back({t.track_id, t.name, t.centroid});
    item.coordinate_text = coordinate_text(item.visible_tracks);
    return item;
  };

  PromptBundle bundle;
  bundle.video_id = keyframes.video_id;
  bundle.items.resize(keyframes.frames.size());
  const std::size_t workers = static_cast<std::size_t>(std::max(1, parallelism));
  for (std::size_t begin = 0; begin < keyframes.frames.size(); begin += workers) {
    const std::size_t end = std::min(keyframes.frames.size(), begin + workers);
    std::vector<std::future<PromptItem>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, make_item,
                                 keyframes.frames[i]));
    }
    for (std::size_t i = begin; i < end; ++i) bundle.items[i] = batch[i - begin].get();
  }
  return bundle;
}

std::filesystem::path write_bundle(const PromptBundle& bundle, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : bundle.items) {
    const std::string image_name = "kf_" + std::to_string(item.frame_index) + "_annotated.png";
    write_png(out_dir / image_name, item.annotated);
    nlohmann::json visible = nlohmann::json::array();
    for (const auto& v : item.visible_tracks) {
      visible.push_back({{"track_id", v.track_id}, {"name", v.name}, {"centroid", {v.centroid.x(), v.centroid.y()}}});
    }
    items.push_back({{"frame", item.frame_index},
                     {"image", image_name},
                     {"coordinate_text", item.coordinate_text},
                     {"visible_tracks", std::move(visible)}});
  }
  const nlohmann::json manifest = {{"schema", "bundle.v1"}, {"video_id", bundle.video_id}, {"items", std::move(items)}};
  const auto path = out_dir / "bundle.json";
  std::ofstream(path) << manifest.dump(2) << '\n';
  return path;
}

PromptBundle load_bundle(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorKind::MissingFile, manifest.string());
  PromptBundle bundle;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("schema") != "bundle.v1") throw Error(ErrorKind::SchemaError, "expected schema 'bundle.v1'");
    bundle.video_id = j.at("video_id").get<std::string>();
    int previous = -1;
    for (const auto& it : j.at("items")) {
      PromptItem item;
      item.frame_index = it.at("frame").get<int>();
      if (item.frame_index <= previous) throw Error(ErrorKind::SchemaError, "bundle items must be in frame order");
      previous = item.frame_index;
      item.annotated = read_png(manifest.parent_path() / it.at("image").get<std::string>());
      for (const auto& v : it.at("visible_tracks")) {
        const auto& c = v.at("centroid");
        item.visible_tracks.push_back(
            {v.at("track_id").get<int>(), v.at("name").get<std::string>(), {c.at(0).get<double>(), c.at(1).get<double>()}});
      }
      item.coordinate_text = it.at("coordinate_text").get<std::string>();
      if (item.coordinate_text != coordinate_text(item.visible_tracks)) {
        throw Error(ErrorKind::SchemaError, "coordinate_text of frame " + std::to_string(item.frame_index) +
                                                " does not match its visible_tracks");
      }
      bundle.items.push_back(std::move(item));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, manifest.string() + ": " + e.what());
  }
  return bundle;
}

}  // namespace seedo
