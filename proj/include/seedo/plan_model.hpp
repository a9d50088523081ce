#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seedo {

/// An object mention: normalized name plus an optional tracking ID. An
/// ID-less ref only ever equals another ID-less ref.
struct ObjectRef {
  std::string name;
  std::optional<int> track_id;

  auto operator<=>(const ObjectRef&) const = default;
  bool operator==(const ObjectRef&) const = default;
};

/// "name" or "name (ID:k)".
std::string to_string(const ObjectRef& ref);

enum class SpatialRelation { In, OnTopOf, AtBackOf, InFrontOf, LeftOf, RightOf };

inline constexpr std::array<SpatialRelation, 6> kAllRelations = {
    SpatialRelation::In,       SpatialRelation::OnTopOf, SpatialRelation::AtBackOf,
    SpatialRelation::InFrontOf, SpatialRelation::LeftOf, SpatialRelation::RightOf};

/// Enum identifier, e.g. "LeftOf".
std::string_view relation_name(SpatialRelation relation);
/// Sentence phrase, e.g. "to the left of".
std::string_view relation_phrase(SpatialRelation relation);
std::optional<SpatialRelation> relation_from_name(std::string_view name);

struct PlanStep {
  ObjectRef picked;
  SpatialRelation relation = SpatialRelation::In;
  ObjectRef reference;

  auto operator<=>(const PlanStep&) const = default;
  bool operator==(const PlanStep&) const = default;
};

struct Plan {
  std::vector<PlanStep> steps;

  bool operator==(const Plan&) const = default;
  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
};

struct Placement {
  SpatialRelation relation;
  ObjectRef reference;

  auto operator<=>(const Placement&) const = default;
  bool operator==(const Placement&) const = default;
};

/// Latest placement of every manipulated object. Keyed by subject, so at
/// most one pair per subject and equality is order-insensitive.
struct WorldState {
  std::map<ObjectRef, Placement> pairs;

  bool operator==(const WorldState&) const = default;
  std::size_t size() const { return pairs.size(); }
  /// Triples in ascending (subject, relation, reference) order.
  std::vector<PlanStep> triples() const;
};

WorldState apply_step(const WorldState& state, const PlanStep& step);
WorldState final_state(const Plan& plan);
bool step_eq(const PlanStep& a, const PlanStep& b);

/// Canonical "Drop <picked> <relation phrase> the <reference>" sentence.
std::string render_step(const PlanStep& step);
/// One rendered step per line, each line newline-terminated.
std::string render_plan(const Plan& plan);
/// One "subject|Relation|reference" line per pair, sorted.
std::string render_world_state(const WorldState& state);

}  // namespace seedo
