#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seedo/plan_model.hpp"
#include "seedo/trace_ingest.hpp"

namespace seedo {

struct ErrorFlags {
  bool vision = false;
  bool spatial = false;
  bool temporal = false;

  bool any() const { return vision || spatial || temporal; }
  bool operator==(const ErrorFlags&) const = default;
};

/// Exact greedy in-order match count against |gt|.
struct StepScore {
  std::size_t matched = 0;
  std::size_t total = 0;

  double value() const { return total ? static_cast<double>(matched) / static_cast<double>(total) : 0.0; }
};

int tsr(const Plan& pred, const Plan& gt);
int fsr(const Plan& pred, const Plan& gt);
/// Scans predicted steps once; each searches gt from the cursor and, on a
/// match, moves the cursor past the matched index.
StepScore step_score(const Plan& pred, const Plan& gt);
double ssr(const Plan& pred, const Plan& gt);
/// Meant for failures (tsr = 0); returns no flags for an exact match.
ErrorFlags classify_errors(const Plan& pred, const Plan& gt);

struct EvalRecord {
  std::string video_id;
  TaskCategory category = TaskCategory::Vegetable;
  int tsr = 0;
  int fsr = 0;
  StepScore ssr;
  ErrorFlags errors;
};

/// Snaps predicted object names onto the ground-truth vocabulary within the
/// parser's edit-distance budget; names that do not resolve are left as-is.
Plan canonicalize_names(const Plan& pred, const Plan& gt);

EvalRecord evaluate(const std::string& video_id, TaskCategory category, const Plan& pred, const Plan& gt);

/// Percentages are stored as integer hundredths, rounded half-up.
struct CategoryScores {
  std::size_t count = 0;
  std::int64_t tsr = 0;
  std::int64_t fsr = 0;
  std::int64_t ssr = 0;
};

struct ErrorScores {
  std::size_t failures = 0;
  std::int64_t vision = 0;
  std::int64_t spatial = 0;
  std::int64_t temporal = 0;
};

struct EvalReport {
  std::map<TaskCategory, CategoryScores> scores;
  /// Failure-case error percentages per category; failures are tsr = 0.
  std::map<TaskCategory, ErrorScores> errors;
  ErrorScores overall_errors;
};

/// Aggregates every category present in `records`, or exactly `categories`
/// when given (EmptyCategory if one of them has no record).
EvalReport aggregate(std::span<const EvalRecord> records,
                     std::optional<std::vector<TaskCategory>> categories = std::nullopt);

/// "60.53" from 6053.
std::string format_hundredths(std::int64_t hundredths);
/// Half-up rounding of 100 * num / den to hundredths, exact.
std::int64_t percent_hundredths(std::uint64_t num, std::uint64_t den);

struct ScoreComparison {
  std::vector<double> diffs;
  double mean_abs_diff = 0.0;
  std::size_t identical_count = 0;
};

ScoreComparison compare_scores(std::span<const double> automated, std::span<const double> manual);

}  // namespace seedo
