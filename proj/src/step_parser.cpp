#include "seedo/step_parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <regex>
#include <vector>

#include "seedo/error.hpp"

namespace seedo {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::string join(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

struct PhraseTokens {
  SpatialRelation relation;
  std::vector<std::string> tokens;
};

// Longest phrases first so "in front of" wins over "in".
const std::vector<PhraseTokens>& phrase_table() {
  static const std::vector<PhraseTokens> table = [] {
    std::vector<PhraseTokens> t;
    for (auto r : kAllRelations) t.push_back({r, split_words(relation_phrase(r))});
    std::stable_sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
      return a.tokens.size() > b.tokens.size();
    });
    return t;
  }();
  return table;
}

}  // namespace

std::string normalize_name(std::string_view text) {
  const auto words = split_words(lower(text));
  return join(words, 0, words.size());
}

ObjectRef parse_object_ref(std::string_view text) {
  static const std::regex qualified(R"(^(.*?)\s*\(\s*id\s*:\s*(\d+)\s*\)$)", std::regex::icase);
  const std::string trimmed = normalize_name(text);
  std::smatch m;
  ObjectRef ref;
  if (std::regex_match(trimmed, m, qualified)) {
    ref.name = normalize_name(m[1].str());
    ref.track_id = std::stoi(m[2].str());
  } else {
    ref.name = trimmed;
  }
  if (ref.name.empty()) throw Error(ErrorKind::ParseError, "empty object name in '" + std::string(text) + "'");
  return ref;
}

PlanStep parse_step_sentence(std::string_view text) {
  std::string s = normalize_name(text);
  if (s.starts_with("- ")) s.erase(0, 2);
  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();

  auto words = split_words(s);
  if (words.empty() || words.front() != "drop") {
    throw Error(ErrorKind::ParseError, "not a drop sentence: '" + std::string(text) + "'");
  }

  const auto& phrases = phrase_table();
  for (std::size_t pos = 2; pos < words.size(); ++pos) {
    for (const auto& phrase : phrases) {
      const std::size_t len = phrase.tokens.size();
      if (pos + len >= words.size()) continue;
      if (!std::equal(phrase.tokens.begin(), phrase.tokens.end(), words.begin() + static_cast<long>(pos))) continue;

      std::size_t ref_begin = pos + len;
      if (words[ref_begin] == "the" && ref_begin + 1 < words.size()) ++ref_begin;
      PlanStep step;
      step.picked = parse_object_ref(join(words, 1, pos));
      step.relation = phrase.relation;
      step.reference = parse_object_ref(join(words, ref_begin, words.size()));
      return step;
    }
  }
  if (words.size() < 4) throw Error(ErrorKind::ParseError, "incomplete drop sentence: '" + std::string(text) + "'");
  throw Error(ErrorKind::UnknownRelation, "no known relation in '" + std::string(text) + "'");
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

ObjectRef resolve_object(const ObjectRef& mention, std::span<const std::string> vocabulary) {
  if (std::find(vocabulary.begin(), vocabulary.end(), mention.name) != vocabulary.end()) return mention;

  std::size_t best = kMaxNameEditDistance + 1;
  std::vector<std::string> best_names;
  for (const auto& name : vocabulary) {
    const std::size_t d = edit_distance(mention.name, name);
    if (d < best) {
      best = d;
      best_names = {name};
    } else if (d == best && std::find(best_names.begin(), best_names.end(), name) == best_names.end()) {
      best_names.push_back(name);
    }
  }
  if (best_names.empty()) {
    throw Error(ErrorKind::UnknownObject, "'" + mention.name + "' is not in the object list");
  }
  if (best_names.size() > 1) {
    throw Error(ErrorKind::ParseError, "'" + mention.name + "' is equally close to '" + best_names[0] +
                                           "' and '" + best_names[1] + "'");
  }
  return ObjectRef{best_names.front(), mention.track_id};
}

Plan parse_plan_text(std::string_view text) {
  Plan plan;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      plan.steps.push_back(parse_step_sentence(line));
    } catch (const Error& e) {
      throw PositionedError(ErrorKind::StepParseError, number, "line " + std::to_string(number) + ": " + e.detail());
    }
  }
  return plan;
}

Plan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_plan_text(ss.str());
  } catch (const PositionedError& e) {
    throw PositionedError(e.kind(), e.position(), path.string() + ": " + e.detail());
  }
}

}  // namespace seedo
