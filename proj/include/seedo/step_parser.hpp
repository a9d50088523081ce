#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "seedo/plan_model.hpp"

namespace seedo {

/// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_name(std::string_view text);

/// Parses "name" or "name (ID:k)" (case-insensitive "ID"), normalizing the name.
ObjectRef parse_object_ref(std::string_view text);

/// Parses `Drop <obj> <relation phrase> [the] <obj>`. Accepts an optional
/// leading "- " bullet and trailing period. Throws ParseError when the
/// sentence is not a drop sentence, UnknownRelation when no relation phrase
/// is found.
PlanStep parse_step_sentence(std::string_view text);

/// Levenshtein distance over bytes.
std::size_t edit_distance(std::string_view a, std::string_view b);

inline constexpr std::size_t kMaxNameEditDistance = 2;

/// Maps a free-text object mention onto one of `vocabulary` (already
/// normalized names, duplicates allowed). Exact match first, else the unique
/// name within kMaxNameEditDistance. Ties throw ParseError; nothing close
/// enough throws UnknownObject. The track ID qualifier is kept.
ObjectRef resolve_object(const ObjectRef& mention, std::span<const std::string> vocabulary);

/// One step sentence per non-blank line. Failures throw StepParseError
/// positioned at the 1-based line.
Plan parse_plan_text(std::string_view text);
Plan load_plan(const std::filesystem::path& path);

}  // namespace seedo
