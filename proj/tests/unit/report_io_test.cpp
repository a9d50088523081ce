#include <doctest.h>

#include "seedo/report_io.hpp"
#include "testkit.hpp"

using namespace seedo;

namespace {

EvalRecord record(const std::string& id, TaskCategory c, int t, std::size_t matched, std::size_t total,
                  ErrorFlags e = {}) {
  EvalRecord r;
  r.video_id = id;
  r.category = c;
  r.tsr = t;
  r.fsr = t;
  r.ssr = {matched, total};
  r.errors = e;
  return r;
}

std::vector<EvalRecord> sample() {
  return {record("a", TaskCategory::Vegetable, 1, 2, 2), record("b", TaskCategory::Vegetable, 0, 1, 2, {true, false, true}),
          record("c", TaskCategory::Garment, 0, 0, 1, {false, true, false}), record("d", TaskCategory::Block, 1, 3, 3)};
}

}  // namespace

TEST_CASE("csv reader") {
  const auto rows = parse_csv("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,2,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "say \"hi\""});
  CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("q\"") == "\"q\"\"\"");
}

TEST_CASE("records csv round trip") {
  const auto text = records_csv(sample());
  CHECK(text.starts_with("video_id,task_category,tsr,fsr,ssr,matched_steps,gt_steps,vision,spatial,temporal\n"));
  const auto back = parse_records_csv(text);
  REQUIRE(back.size() == 4);
  CHECK(back[1].video_id == "b");
  CHECK(back[1].ssr.matched == 1);
  CHECK(back[1].ssr.total == 2);
  CHECK(back[1].errors == ErrorFlags{true, false, true});
  CHECK(back[2].category == TaskCategory::Garment);
  CHECK(records_csv(back) == text);
}

TEST_CASE("report csv has the task by metric layout") {
  const std::vector<ModelReport> reports{{"seedo", aggregate(sample())}};
  const auto text = report_csv(reports);
  CHECK(text ==
        "model,vegetable_tsr,vegetable_fsr,vegetable_ssr,garment_tsr,garment_fsr,garment_ssr,block_tsr,block_fsr,block_ssr\n"
        "seedo,50.00,50.00,75.00,0.00,0.00,0.00,100.00,100.00,100.00\n");

  const std::vector<EvalRecord> only_block{record("d", TaskCategory::Block, 1, 3, 3)};
  CHECK(report_csv({{"m", aggregate(only_block)}}).ends_with("m,,,,,,,100.00,100.00,100.00\n"));
}

TEST_CASE("errors csv has one row per category plus all") {
  const std::vector<ModelReport> reports{{"seedo", aggregate(sample())}};
  CHECK(errors_csv(reports) ==
        "model,category,failures,vision,spatial,temporal\n"
        "seedo,vegetable,1,100.00,0.00,100.00\n"
        "seedo,garment,1,0.00,100.00,0.00\n"
        "seedo,block,0,0.00,0.00,0.00\n"
        "seedo,all,2,50.00,50.00,50.00\n");
}

TEST_CASE("svg chart") {
  const std::vector<ModelReport> reports{{"seedo", aggregate(sample())}, {"baseline", aggregate(sample())}};
  const auto svg = report_svg(reports);
  CHECK(svg.starts_with("<svg"));
  CHECK(svg.ends_with("</svg>\n"));
  CHECK(svg.find("seedo vegetable TSR 50.00") != std::string::npos);
  CHECK(svg.find("baseline block SSR 100.00") != std::string::npos);
  CHECK(report_svg(reports) == svg);
}

TEST_CASE("score tables") {
  const auto automated = parse_score_csv("video_id,task_category,score\nv1,vegetable,1\nv2,garment,0.5\n");
  const auto manual = parse_score_csv("video_id,ssr\nv2,0.5\nv1,0.5\n", "ssr");
  REQUIRE(automated.size() == 2);
  CHECK(automated[1].category == "garment");
  const auto out = compare_score_tables(automated, manual);
  CHECK(out.overall.mean_abs_diff == 0.25);
  CHECK(out.overall.identical_count == 1);
  CHECK(out.diffs_csv ==
        "video_id,task_category,automated,manual,abs_diff\n"
        "v1,vegetable,1.000000,0.500000,0.500000\n"
        "v2,garment,0.500000,0.500000,0.000000\n");
  CHECK(out.summary_csv ==
        "scope,n,mean_abs_diff,identical_count\n"
        "garment,1,0.000000,1\n"
        "vegetable,1,0.500000,0\n"
        "all,2,0.250000,1\n");

  const auto short_manual = parse_score_csv("video_id,score\nv1,1\n");
  CHECK_THROWS_AS(compare_score_tables(automated, short_manual), Error);
  const auto other_ids = parse_score_csv("video_id,score\nv1,1\nv3,1\n");
  CHECK_THROWS_AS(compare_score_tables(automated, other_ids), Error);
  CHECK_THROWS_AS(parse_score_csv("video_id,score\nv1,abc\n"), Error);
  CHECK_THROWS_AS(parse_score_csv("video_id,score\nv1,1\nv1,0\n"), Error);
  CHECK_THROWS_AS(parse_score_csv("id,score\nv1,1\n"), Error);
}
