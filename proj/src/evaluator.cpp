#include "seedo/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "seedo/error.hpp"
#include "seedo/step_parser.hpp"

namespace seedo {
namespace {

void require_gt(const Plan& gt) {
  if (gt.empty()) throw Error(ErrorKind::EmptyGroundTruth, "ground-truth plan has no steps");
}

/// Size of the multiset intersection of the two step lists.
std::size_t common_steps(const Plan& pred, const Plan& gt) {
  std::map<PlanStep, std::size_t> remaining;
  for (const auto& s : gt.steps) ++remaining[s];
  std::size_t common = 0;
  for (const auto& s : pred.steps) {
    auto it = remaining.find(s);
    if (it != remaining.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return common;
}

std::int64_t mean_hundredths(long double sum, std::size_t count) {
  // Guard against representation error sitting just below a .5 boundary.
  const long double scaled = sum * 10000.0L / static_cast<long double>(count);
  return static_cast<std::int64_t>(std::floor(scaled + 0.5L + 1e-9L));
}

}  // namespace

int tsr(const Plan& pred, const Plan& gt) {
  require_gt(gt);
  if (pred.size() != gt.size()) return 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!step_eq(pred.steps[i], gt.steps[i])) return 0;
  }
  return 1;
}

int fsr(const Plan& pred, const Plan& gt) {
  require_gt(gt);
  return final_state(pred) == final_state(gt) ? 1 : 0;
}

StepScore step_score(const Plan& pred, const Plan& gt) {
  require_gt(gt);
  StepScore score{0, gt.size()};
  std::size_t cursor = 0;
  for (const auto& p : pred.steps) {
    for (std::size_t g = cursor; g < gt.size(); ++g) {
      if (step_eq(p, gt.steps[g])) {
        ++score.matched;
        cursor = g + 1;
        break;
      }
    }
  }
  return score;
}

double ssr(const Plan& pred, const Plan& gt) { return step_score(pred, gt).value(); }

ErrorFlags classify_errors(const Plan& pred, const Plan& gt) {
  require_gt(gt);
  ErrorFlags flags;
  flags.temporal = pred.size() != gt.size() || step_score(pred, gt).matched < common_steps(pred, gt);

  const std::size_t n = std::min(pred.size(), gt.size());
  for (std::size_t i = 0; i < n; ++i) {
    const PlanStep& p = pred.steps[i];
    const PlanStep& g = gt.steps[i];
    if (step_eq(p, g)) continue;
    const bool demonstrated = std::any_of(gt.steps.begin(), gt.steps.end(), [&](const PlanStep& s) { return step_eq(s, p); });
    if (demonstrated) {
      // A correct step in the wrong slot is an ordering problem.
      flags.temporal = true;
    } else if (p.picked != g.picked || p.reference != g.reference) {
      flags.vision = true;
    } else {
      flags.spatial = true;
    }
  }
  return flags;
}

Plan canonicalize_names(const Plan& pred, const Plan& gt) {
  std::vector<std::string> vocabulary;
  for (const auto& s : gt.steps) {
    vocabulary.push_back(s.picked.name);
    vocabulary.push_back(s.reference.name);
  }
  const auto snap = [&](const ObjectRef& ref) {
    try {
      return resolve_object(ref, vocabulary);
    } catch (const Error&) {
      return ref;
    }
  };
  Plan out = pred;
  for (auto& s : out.steps) {
    s.picked = snap(s.picked);
    s.reference = snap(s.reference);
  }
  return out;
}

EvalRecord evaluate(const std::string& video_id, TaskCategory category, const Plan& pred, const Plan& gt) {
  EvalRecord r;
  r.video_id = video_id;
  r.category = category;
  r.tsr = tsr(pred, gt);
  r.fsr = fsr(pred, gt);
  r.ssr = step_score(pred, gt);
  if (r.tsr == 0) r.errors = classify_errors(pred, gt);
  return r;
}

std::int64_t percent_hundredths(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return 0;
  // floor(10000 * num / den + 1/2) in integers.
  return static_cast<std::int64_t>((20000ULL * num + den) / (2ULL * den));
}

std::string format_hundredths(std::int64_t hundredths) {
  char buf[32];
  const char* sign = hundredths < 0 ? "-" : "";
  const std::int64_t v = hundredths < 0 ? -hundredths : hundredths;
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", sign, static_cast<long long>(v / 100), static_cast<long long>(v % 100));
  return buf;
}

EvalReport aggregate(std::span<const EvalRecord> records, std::optional<std::vector<TaskCategory>> categories) {
  std::map<TaskCategory, std::vector<const EvalRecord*>> by_category;
  for (const auto& r : records) by_category[r.category].push_back(&r);
  if (categories) {
    for (auto c : *categories) {
      if (!by_category.count(c)) {
        throw Error(ErrorKind::EmptyCategory, "no records for category '" + std::string(category_name(c)) + "'");
      }
    }
    std::erase_if(by_category, [&](const auto& kv) {
      return std::find(categories->begin(), categories->end(), kv.first) == categories->end();
    });
  }
  if (by_category.empty()) throw Error(ErrorKind::EmptyCategory, "no records to aggregate");

  EvalReport report;
  std::size_t all_failures = 0, all_vision = 0, all_spatial = 0, all_temporal = 0;
  for (const auto& [category, rs] : by_category) {
    std::uint64_t tsr_sum = 0, fsr_sum = 0;
    long double ssr_sum = 0;
    std::size_t failures = 0, vision = 0, spatial = 0, temporal = 0;
    for (const EvalRecord* r : rs) {
      tsr_sum += static_cast<std::uint64_t>(r->tsr);
      fsr_sum += static_cast<std::uint64_t>(r->fsr);
      ssr_sum += static_cast<long double>(r->ssr.matched) / static_cast<long double>(r->ssr.total);
      if (r->tsr == 0) {
        ++failures;
        vision += r->errors.vision;
        spatial += r->errors.spatial;
        temporal += r->errors.temporal;
      }
    }
    report.scores[category] = {rs.size(), percent_hundredths(tsr_sum, rs.size()), percent_hundredths(fsr_sum, rs.size()),
                               mean_hundredths(ssr_sum, rs.size())};
    report.errors[category] = {failures, percent_hundredths(vision, failures), percent_hundredths(spatial, failures),
                               percent_hundredths(temporal, failures)};
    all_failures += failures;
    all_vision += vision;
    all_spatial += spatial;
    all_temporal += temporal;
  }
  report.overall_errors = {all_failures, percent_hundredths(all_vision, all_failures),
                           percent_hundredths(all_spatial, all_failures), percent_hundredths(all_temporal, all_failures)};
  return report;
}

ScoreComparison compare_scores(std::span<const double> automated, std::span<const double> manual) {
  if (automated.size() != manual.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(automated.size()) + " automated scores vs " +
                                               std::to_string(manual.size()) + " manual scores");
  }
  if (automated.empty()) throw Error(ErrorKind::LengthMismatch, "no scores to compare");
  ScoreComparison out;
  double sum = 0.0;
  for (std::size_t i = 0; i < automated.size(); ++i) {
    const double d = std::abs(automated[i] - manual[i]);
    out.diffs.push_back(d);
    sum += d;
    if (automated[i] == manual[i]) ++out.identical_count;
  }
  out.mean_abs_diff = sum / static_cast<double>(automated.size());
  return out;
}

}  // namespace seedo
