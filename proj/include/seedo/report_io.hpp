#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seedo/evaluator.hpp"

namespace seedo {

/// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_field(const std::string& value);

/// video_id,task_category,tsr,fsr,ssr,matched_steps,gt_steps,vision,spatial,temporal
std::string records_csv(const std::vector<EvalRecord>& records);
std::vector<EvalRecord> parse_records_csv(const std::string& text);

struct ModelReport {
  std::string model;
  EvalReport report;
};

/// One row per model; TSR/FSR/SSR columns for vegetable, garment, block.
/// Categories without records leave empty cells.
std::string report_csv(const std::vector<ModelReport>& reports);
/// model,category,failures,vision,spatial,temporal rows; category "all"
/// pools every failure case of the model.
std::string errors_csv(const std::vector<ModelReport>& reports);
/// Grouped bar chart: one group per (category, metric), one bar per model.
std::string report_svg(const std::vector<ModelReport>& reports);

/// A score column keyed by video: header must hold video_id and the named
/// column; task_category is picked up when present.
struct ScoreRow {
  std::string video_id;
  std::string category;
  double score = 0.0;
};
std::vector<ScoreRow> parse_score_csv(const std::string& text, const std::string& column = "score");

struct ComparisonOutput {
  std::string diffs_csv;
  std::string summary_csv;
  ScoreComparison overall;
};
/// Joins the two score tables on video_id (LengthMismatch when the video
/// sets differ) and summarizes per category and overall.
ComparisonOutput compare_score_tables(const std::vector<ScoreRow>& automated, const std::vector<ScoreRow>& manual);

}  // namespace seedo
