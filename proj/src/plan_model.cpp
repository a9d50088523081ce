#include "seedo/plan_model.hpp"

#include <sstream>

namespace seedo {

std::string to_string(const ObjectRef& ref) {
  if (!ref.track_id) return ref.name;
  return ref.name + " (ID:" + std::to_string(*ref.track_id) + ")";
}

std::string_view relation_name(SpatialRelation relation) {
  switch (relation) {
    case SpatialRelation::In: return "In";
    case SpatialRelation::OnTopOf: return "OnTopOf";
    case SpatialRelation::AtBackOf: return "AtBackOf";
    case SpatialRelation::InFrontOf: return "InFrontOf";
    case SpatialRelation::LeftOf: return "LeftOf";
    case SpatialRelation::RightOf: return "RightOf";
  }
  return "?";
}

std::string_view relation_phrase(SpatialRelation relation) {
  switch (relation) {
    case SpatialRelation::In: return "in";
    case SpatialRelation::OnTopOf: return "on top of";
    case SpatialRelation::AtBackOf: return "at the back of";
    case SpatialRelation::InFrontOf: return "in front of";
    case SpatialRelation::LeftOf: return "to the left of";
    case SpatialRelation::RightOf: return "to the right of";
  }
  return "?";
}

std::optional<SpatialRelation> relation_from_name(std::string_view name) {
  for (auto r : kAllRelations) {
    if (relation_name(r) == name) return r;
  }
  return std::nullopt;
}

std::vector<PlanStep> WorldState::triples() const {
  std::vector<PlanStep> out;
  out.reserve(pairs.size());
  for (const auto& [subject, placement] : pairs) {
    out.push_back({subject, placement.relation, placement.reference});
  }
  return out;
}

WorldState apply_step(const WorldState& state, const PlanStep& step) {
  WorldState next = state;
  next.pairs.insert_or_assign(step.picked, Placement{step.relation, step.reference});
  return next;
}

WorldState final_state(const Plan& plan) {
  WorldState state;
  for (const auto& step : plan.steps) {
    state.pairs.insert_or_assign(step.picked, Placement{step.relation, step.reference});
  }
  return state;
}

bool step_eq(const PlanStep& a, const PlanStep& b) {
  return a.picked == b.picked && a.relation == b.relation && a.reference == b.reference;
}

std::string render_step(const PlanStep& step) {
  std::string out = "Drop ";
  out += to_string(step.picked);
  out += ' ';
  out += relation_phrase(step.relation);
  out += " the ";
  out += to_string(step.reference);
  return out;
}

std::string render_plan(const Plan& plan) {
  std::string out;
  for (const auto& step : plan.steps) {
    out += render_step(step);
    out += '\n';
  }
  return out;
}

std::string render_world_state(const WorldState& state) {
  std::ostringstream os;
  for (const auto& t : state.triples()) {
    os << to_string(t.picked) << '|' << relation_name(t.relation) << '|'
       << to_string(t.reference) << '\n';
  }
  return os.str();
}

}  // namespace seedo
