#include <doctest.h>

#include <sstream>

#include "seedo/trace_ingest.hpp"
#include "testkit.hpp"

using namespace seedo;

namespace {

const std::string kHeader =
    R"({"schema":"handtrace.v1","video_id":"v1","fps":30,"frame_count":10,"width":640,"height":480})";
const std::string kTracksHeader =
    R"({"schema":"tracks.v1","video_id":"v1","fps":30,"frame_count":10,"width":640,"height":480})";

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::ConfigError;
}

HandTrace trace_from(const std::string& text, LoadOptions options = {}) {
  std::istringstream in(text);
  return parse_hand_trace(in, options);
}

TrackSet tracks_from(const std::string& text) {
  std::istringstream in(text);
  return parse_object_tracks(in);
}

GroundTruth gt_from(const std::string& text) {
  std::istringstream in(text);
  return parse_ground_truth(in);
}

std::string track_line(int id, const std::string& contour) {
  return R"({"track_id":)" + std::to_string(id) + R"(,"name":"white bowl","frames":[{"frame":0,"contour":)" +
         contour + "}]}";
}

}  // namespace

TEST_CASE("hand trace: empty file is a schema error") {
  CHECK(kind_of([] { trace_from(""); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { trace_from(kHeader + "\n"); }) == ErrorKind::SchemaError);
}

TEST_CASE("hand trace: three sparse records load") {
  const auto trace = trace_from(kHeader + "\n" +
                                R"({"frame":0,"keypoints":[[1,2]],"confidence":0.9})" "\n"
                                R"({"frame":5,"keypoints":[[3,4]],"confidence":0.9})" "\n"
                                R"({"frame":9,"keypoints":[[5,6]],"confidence":0.9})" "\n");
  REQUIRE(trace.observations.size() == 3);
  CHECK(trace.observations[1].frame == 5);
  CHECK(trace.observations[2].keypoints(0, 1) == 6);
  CHECK(trace.meta.video_id == "v1");
  CHECK(trace.meta.width == 640);
}

TEST_CASE("hand trace: repeated frame index is an order error") {
  try {
    trace_from(kHeader + "\n" + R"({"frame":4,"keypoints":[[1,2]],"confidence":1})" "\n" +
               R"({"frame":4,"keypoints":[[1,2]],"confidence":1})" "\n");
    FAIL("expected OrderError");
  } catch (const PositionedError& e) {
    CHECK(e.kind() == ErrorKind::OrderError);
    // Second record, which sits on physical line 3 after the header.
    CHECK(e.position() == 3);
  }
}

TEST_CASE("hand trace: low confidence rows become gaps") {
  const std::string text = kHeader + "\n" + R"({"frame":0,"keypoints":[[1,2]],"confidence":0.9})" "\n" +
                           R"({"frame":1,"keypoints":[[1,2]],"confidence":0.3})" "\n";
  CHECK(trace_from(text).observations.size() == 1);
  CHECK(trace_from(text, LoadOptions{0.2}).observations.size() == 2);
}

TEST_CASE("hand trace: schema violations") {
  CHECK(kind_of([] { trace_from(R"({"schema":"tracks.v1","video_id":"v"})" "\n"); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { trace_from(kHeader + "\n{not json\n"); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { trace_from(kHeader + "\n" + R"({"frame":0,"keypoints":[],"confidence":1})" "\n"); }) ==
        ErrorKind::SchemaError);
  CHECK(kind_of([] { trace_from(kHeader + "\n" + R"({"frame":12,"keypoints":[[1,2]],"confidence":1})" "\n"); }) ==
        ErrorKind::SchemaError);
  CHECK(kind_of([] { load_hand_trace("/nonexistent/trace.jsonl"); }) == ErrorKind::MissingFile);
}

TEST_CASE("hand trace: round trip through the canonical writer") {
  const std::string text = R"({"width":640,"video_id":"v1","schema":"handtrace.v1","height":480,"frame_count":10,"fps":30})"
                           "\n"
                           R"({"keypoints":[[1.5,2],[3,4]],"frame":2,"confidence":0.75})"
                           "\n";
  const auto trace = trace_from(text);
  std::ostringstream out;
  write_hand_trace(out, trace);
  std::istringstream original(text);
  CHECK(out.str() == normalize_records(original));
}

TEST_CASE("object tracks: load, sort and derive geometry") {
  const auto set = tracks_from(kTracksHeader + "\n" + track_line(1, "[[0,0],[4,0],[4,4],[0,4]]") + "\n" +
                               track_line(0, "[[10,10],[20,10],[20,20],[10,20]]") + "\n");
  REQUIRE(set.tracks.size() == 2);
  CHECK(set.tracks[0].track_id == 0);
  CHECK(set.tracks[1].track_id == 1);
  const auto& f = set.tracks[0].frames.at(0);
  CHECK(f.centroid.isApprox(Point2d(15, 15)));
  CHECK(f.bbox.min == Point2d(10, 10));
  CHECK(f.bbox.max == Point2d(20, 20));
}

TEST_CASE("object tracks: geometric invariants are enforced at load") {
  CHECK(kind_of([] { tracks_from(kTracksHeader + "\n" + track_line(0, "[[0,0],[4,0]]") + "\n"); }) ==
        ErrorKind::DegenerateContour);
  CHECK(kind_of([] {
          tracks_from(kTracksHeader + "\n" + track_line(0, "[[0,0],[4,0],[4,4]]") + "\n" +
                      track_line(0, "[[0,0],[4,0],[4,4]]") + "\n");
        }) == ErrorKind::DuplicateTrackId);
}

TEST_CASE("object tracks: round trip through the canonical writer") {
  const std::string text = kTracksHeader + "\n" + track_line(3, "[[0,0],[4,0],[4,4],[0,4]]") + "\n";
  const auto set = tracks_from(text);
  std::ostringstream out;
  write_object_tracks(out, set);
  const auto again = tracks_from(out.str());
  REQUIRE(again.tracks.size() == 1);
  CHECK(again.tracks[0].frames.at(0).centroid == set.tracks[0].frames.at(0).centroid);
  std::ostringstream twice;
  write_object_tracks(twice, again);
  CHECK(twice.str() == out.str());
}

TEST_CASE("ground truth") {
  const auto gt = gt_from(
      R"({"schema":"gt.v1","video_id":"v1","task_category":"vegetable","steps":["Drop red chili in the white bowl"]})");
  REQUIRE(gt.steps.size() == 1);
  CHECK(gt.steps.steps[0] == testkit::step("red chili", SpatialRelation::In, "white bowl"));
  CHECK(gt.task_category == TaskCategory::Vegetable);

  CHECK(kind_of([] { gt_from(R"({"schema":"gt.v1","video_id":"v1","task_category":"block","steps":[]})"); }) ==
        ErrorKind::SchemaError);
  try {
    gt_from(R"({"schema":"gt.v1","video_id":"v1","task_category":"block","steps":["move chili somewhere"]})");
    FAIL("expected StepParseError");
  } catch (const PositionedError& e) {
    CHECK(e.kind() == ErrorKind::StepParseError);
    CHECK(e.position() == 0);
  }
  CHECK(kind_of([] { gt_from(R"({"schema":"gt.v1","video_id":"v1","task_category":"soup","steps":["Drop a in b"]})"); }) ==
        ErrorKind::SchemaError);
}

TEST_CASE("ground truth round trip") {
  const GroundTruth gt{"v9", testkit::plan({testkit::step("wooden block", SpatialRelation::OnTopOf, "red block")}),
                       TaskCategory::Block};
  std::ostringstream out;
  write_ground_truth(out, gt);
  const auto back = gt_from(out.str());
  CHECK(back.video_id == "v9");
  CHECK(back.steps == gt.steps);
  CHECK(back.task_category == TaskCategory::Block);
}

TEST_CASE("video meta from any header") {
  testkit::TempDir dir;
  testkit::write_file(dir / "meta.json", R"({"schema":"meta.v1","video_id":"m","fps":25,"frame_count":3,"width":8,"height":6})");
  testkit::write_file(dir / "trace.jsonl", kHeader + "\n" + R"({"frame":0,"keypoints":[[1,2]],"confidence":1})" "\n");
  CHECK(load_video_meta(dir / "meta.json") == VideoMeta{"m", 25, 3, 8, 6});
  CHECK(load_video_meta(dir / "trace.jsonl").video_id == "v1");
  std::ostringstream out;
  write_video_meta(out, VideoMeta{"m", 25, 3, 8, 6});
  testkit::write_file(dir / "again.json", out.str());
  CHECK(load_video_meta(dir / "again.json") == VideoMeta{"m", 25, 3, 8, 6});
}
