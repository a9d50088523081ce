#include "seedo/vlm_interpreter.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "seedo/step_parser.hpp"

namespace seedo {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.starts_with("-") || line.starts_with("*")) line = trim(line.substr(1));
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

/// Value after "<key>:" on the first line that starts with key (case-insensitive).
std::optional<std::string> keyed_value(const std::string& response, const std::string& key) {
  const std::string want = lower(key) + ":";
  for (const auto& line : lines_of(response)) {
    if (lower(line).starts_with(want)) {
      std::string value = trim(line.substr(want.size()));
      while (!value.empty() && value.back() == '.') value.pop_back();
      return trim(value);
    }
  }
  return std::nullopt;
}

ChatRequest make_request(std::string system_text, std::string user_text, const Image& image,
                         const InterpreterOptions& options) {
  ChatRequest r;
  r.system_text = std::move(system_text);
  r.user_text = std::move(user_text);
  r.images.push_back(image);
  r.temperature = options.temperature;
  r.model_name = options.model_name;
  return r;
}

std::string with_coordinates(std::string user_text, const PromptItem& item) {
  if (!item.coordinate_text.empty()) {
    user_text += "\n- The center coordinates of the labeled objects in the picture are:\n" + item.coordinate_text;
  }
  return user_text;
}

}  // namespace

std::string ObjectList::bracketed() const {
  std::string out = "[";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out + "]";
}

std::string CoTTranscript::to_jsonl() const {
  std::string out;
  for (const auto& r : records) {
    nlohmann::json j = {{"type", "request"}, {"stage", r.stage},       {"frame", r.frame_index},
                        {"attempt", r.attempt}, {"digest", r.digest},   {"user_text", r.user_text},
                        {"response", r.response}, {"parsed", r.parsed}};
    out += j.dump() + '\n';
  }
  for (const auto& w : warnings) out += nlohmann::json{{"type", "warning"}, {"message", w}}.dump() + '\n';
  nlohmann::json summary = {{"type", "summary"},
                            {"video_id", video_id},
                            {"requests", request_count()},
                            {"prompt_chars", prompt_chars},
                            {"response_chars", response_chars}};
  out += summary.dump() + '\n';
  return out;
}

namespace prompts {

ChatRequest object_list(const Image& first_frame, const InterpreterOptions& options) {
  return make_request(
      "- You are a visual object detector. Your task is to count and identify the objects in the provided image that "
      "are on the desk. Focus on objects classified as grasped_objects and containers.\n"
      "- Do not include hand or gripper in your answer.",
      "- There are two kinds of objects, grasped_objects and containers in the environment. We only care about "
      "objects on the desk.\n"
      "- You must strictly follow the rules below: Even if there are multiple objects that appear identical, you must "
      "repeat their names in your answer according to their quantity. For example, if there are three wooden blocks, "
      "you must mention 'wooden block' three times in your answer.\n"
      "- Be careful and accurate with the number. Do not miss or add additional object in your answer.\n"
      "- Based on the input picture, answer:\n"
      "1. How many objects are there in the environment?\n"
      "2. What are these objects?\n"
      "- You should respond in the format of the following example:\n"
      "- Number: 4\n"
      "- Objects: red pepper, red tomato, white bowl, white bowl",
      first_frame, options);
}

ChatRequest filter(const PromptItem& item, const InterpreterOptions& options) {
  return make_request(
      "- You are an operations inspector. You need to check whether the hand in operation is holding an object. The "
      "objects have been outlined with contours of different colors and labeled with indexes for easier distinction.",
      "- This is a picture from a pick-and-drop task. Please determine if the hand is manipulating an object.\n"
      "- Respond with 'Hand is manipulating an object' or 'Hand is not manipulating an object'.",
      item.annotated, options);
}

ChatRequest picked(const PromptItem& item, const ObjectList& objects, const InterpreterOptions& options) {
  return make_request(
      "- You are an operation inspector. You need to check which object is being picked in a pick-and-drop task. "
      "Some of the objects have been outlined with contours of different colors and labeled with indexes for easier "
      "distinction.\n"
      "- The contour and index is only used to help. Due to limitation of vision models, the contours and index "
      "labels might not cover every objects in the environment. If you notice any unannotated objects in the demo or "
      "in the object list, make sure you name it and handle them properly.",
      with_coordinates("- This is a picture describing the pick state of a pick-and-drop task. The objects in the "
                       "environment are " +
                           objects.bracketed() +
                           ". One of the objects is being picked by a human hand or robot gripper now. The objects "
                           "have been outlined with contours of different colors and labeled with indexes for easier "
                           "distinction.\n"
                           "- Based on the input picture and object list, answer:\n"
                           "1. Which object is being picked\n"
                           "- You should respond in the format of the following example:\n"
                           "- Object Picked: red block",
                       item),
      item.annotated, options);
}

ChatRequest reference(const PromptItem& item, const ObjectList& objects, const ObjectRef& picked,
                      const InterpreterOptions& options) {
  const std::string picked_name = to_string(picked);
  return make_request(
      "- You are an operation inspector. You need to find the reference object for the placement location of the "
      "picked object in the pick-and-place process. Notice that the reference object can vary based on the task. If "
      "this is a storage task, the reference object should be the container into which the items are stored. If this "
      "is a stacking task, the reference object should be the object that best expresses the orientation of the "
      "arrangement.",
      with_coordinates("- This is a picture describing the drop state of a pick-and-place task. The objects in the "
                       "environment are " +
                           objects.bracketed() + ". " + picked_name +
                           " is being dropped by a human hand or robot gripper now.\n"
                           "- Based on the input picture and object list, answer:\n"
                           "1. Which object in the rest of object list do you choose as a reference object to " +
                           picked_name +
                           "\n"
                           "- You should respond in the format of the following example without any additional "
                           "information or reason steps:\n"
                           "- Reference Object: red block",
                       item),
      item.annotated, options);
}

ChatRequest relation(const PromptItem& item, const ObjectList& objects, const ObjectRef& picked,
                     const ObjectRef& reference, const InterpreterOptions& options) {
  const std::string p = to_string(picked);
  const std::string r = to_string(reference);
  return make_request(
      "- You are a VLMTutor. You will describe the drop state of a pick-and-drop task from a demo picture. You must "
      "pay specific attention to the spatial relationship between picked object and reference object in the picture "
      "and be correct and accurate with directions.",
      with_coordinates(
          "- This is a picture describing the drop state of a pick-and-drop task. The objects in the environment are "
          "object list: " +
              objects.bracketed() + ". " + p +
              " is said to be being dropped by a human hand or robot gripper now.\n"
              "- However, the object being dropped might be wrong due to bad visual prompt. If you feel that object "
              "being picked is not " +
              p +
              " but some other object, red chili is said to be the object picked but you feel it is an orange "
              "carrot, you MUST modify it and change the name.\n"
              "- The object picked is being dropped somewhere near " +
              r +
              ". Based on the input picture, object list answer:\n"
              "- Drop object picked to which relative position to the " +
              r +
              "? You need to mention the name of objects in your answer.\n"
              "- There are totally six kinds of relative position, and the direction means the visual direction of "
              "the picture. You must choose one relative position.\n"
              "1. In ((object picked is contained in the reference object)\n"
              "2. On top of (object picked is stacked on the reference object, reference object supports object "
              "picked)\n"
              "3. At the back of (in demo it means object picked is positioned farther to the viewer relative to the "
              "reference object)\n"
              "4. In front of (in demo it means object picked is positioned closer to the viewer or relative to the "
              "reference object)\n"
              "5. to the left\n"
              "6. to the right\n"
              "- You should respond in the format of the following example without any additional information or "
              "reason steps, be sure to mention the object picked and reference object.\n"
              "- Drop yellow corn to the left of the red chili.\n"
              "- Drop wooden block (ID:1) to the right of the wooden block (ID:0)",
          item),
      item.annotated, options);
}

}  // namespace prompts

namespace parse {

ObjectList object_list(const std::string& response) {
  const auto number = keyed_value(response, "number");
  const auto objects = keyed_value(response, "objects");
  if (!number || !objects) throw Error(ErrorKind::ParseError, "expected 'Number:' and 'Objects:' lines");
  ObjectList list;
  try {
    std::size_t used = 0;
    list.count = std::stoi(*number, &used);
    if (used != number->size() || list.count < 0) throw std::invalid_argument("count");
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "'Number:' is not a non-negative integer: '" + *number + "'");
  }
  std::string text = *objects;
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') text = text.substr(1, text.size() - 2);
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    auto name = normalize_name(part);
    if (!name.empty()) list.names.push_back(std::move(name));
  }
  if (static_cast<std::size_t>(list.count) != list.names.size()) {
    throw Error(ErrorKind::CountMismatch, "Number: " + std::to_string(list.count) + " but " +
                                              std::to_string(list.names.size()) + " object names");
  }
  return list;
}

bool filter(const std::string& response) {
  const std::string text = lower(response);
  if (text.find("hand is not manipulating an object") != std::string::npos) return false;
  if (text.find("hand is manipulating an object") != std::string::npos) return true;
  throw Error(ErrorKind::ParseError, "response states neither manipulation phrase");
}

ObjectRef picked(const std::string& response, const ObjectList& objects) {
  const auto value = keyed_value(response, "object picked");
  if (!value) throw Error(ErrorKind::ParseError, "expected an 'Object Picked:' line");
  return resolve_object(parse_object_ref(*value), objects.names);
}

ObjectRef reference(const std::string& response, const ObjectList& objects, const ObjectRef& picked) {
  const auto value = keyed_value(response, "reference object");
  if (!value) throw Error(ErrorKind::ParseError, "expected a 'Reference Object:' line");
  ObjectRef ref = resolve_object(parse_object_ref(*value), objects.names);
  if (ref == picked) throw Error(ErrorKind::SelfReference, "reference object '" + to_string(ref) + "' is the picked object");
  return ref;
}

PlanStep relation(const std::string& response, const ObjectList& objects) {
  for (const auto& line : lines_of(response)) {
    if (!lower(line).starts_with("drop ")) continue;
    PlanStep step = parse_step_sentence(line);
    step.picked = resolve_object(step.picked, objects.names);
    step.reference = resolve_object(step.reference, objects.names);
    return step;
  }
  throw Error(ErrorKind::ParseError, "expected a 'Drop ...' sentence");
}

}  // namespace parse

Interpreter::Interpreter(ChatClient& client, CoTTranscript& transcript, InterpreterOptions options)
    : client_(client), transcript_(transcript), options_(std::move(options)) {}

template <typename Parse>
auto Interpreter::ask(const std::string& stage, int frame, ChatRequest request, Parse parse_fn) {
  for (int attempt = 0;; ++attempt) {
    TranscriptRecord record{stage, frame, attempt, request_digest(request), request.user_text, {}, {}};
    transcript_.prompt_chars += request.system_text.size() + request.user_text.size();
    record.response = client_.send(request);
    transcript_.response_chars += record.response.size();
    try {
      auto [value, shown] = parse_fn(record.response);
      record.parsed = std::move(shown);
      transcript_.records.push_back(std::move(record));
      return value;
    } catch (const Error& e) {
      record.parsed = std::string("error: ") + e.what();
      transcript_.records.push_back(std::move(record));
      const bool format_problem = e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::CountMismatch;
      if (!format_problem || attempt >= 1) throw;
    }
    request.user_text += prompts::kFormatCorrection;
  }
}

ObjectList Interpreter::extract_object_list(const Image& first_frame) {
  if (first_frame.empty()) throw Error(ErrorKind::EmptyImage, "first frame is empty");
  return ask("object_list", -1, prompts::object_list(first_frame, options_), [](const std::string& r) {
    ObjectList list = parse::object_list(r);
    return std::pair{list, list.bracketed()};
  });
}

bool Interpreter::filter_keyframe(const PromptItem& item) {
  return ask("filter", item.frame_index, prompts::filter(item, options_), [](const std::string& r) {
    const bool valid = parse::filter(r);
    return std::pair{valid, std::string(valid ? "valid" : "invalid")};
  });
}

ObjectRef Interpreter::identify_picked(const PromptItem& item, const ObjectList& objects) {
  if (objects.names.empty()) throw Error(ErrorKind::UnknownObject, "object list is empty");
  return ask("picked", item.frame_index, prompts::picked(item, objects, options_), [&](const std::string& r) {
    ObjectRef ref = parse::picked(r, objects);
    return std::pair{ref, to_string(ref)};
  });
}

ObjectRef Interpreter::identify_reference(const PromptItem& item, const ObjectList& objects, const ObjectRef& picked) {
  return ask("reference", item.frame_index, prompts::reference(item, objects, picked, options_),
             [&](const std::string& r) {
               ObjectRef ref = parse::reference(r, objects, picked);
               return std::pair{ref, to_string(ref)};
             });
}

PlanStep Interpreter::reason_relation(const PromptItem& item, const ObjectList& objects, const ObjectRef& picked,
                                      const ObjectRef& reference) {
  PlanStep step = ask("relation", item.frame_index, prompts::relation(item, objects, picked, reference, options_),
                      [&](const std::string& r) {
                        PlanStep s = parse::relation(r, objects);
                        return std::pair{s, render_step(s)};
                      });
  if (step.picked != picked) {
    transcript_.warnings.push_back("frame " + std::to_string(item.frame_index) + ": picked object corrected from '" +
                                   to_string(picked) + "' to '" + to_string(step.picked) + "'");
  }
  if (step.reference != reference) {
    transcript_.warnings.push_back("frame " + std::to_string(item.frame_index) + ": relation answer names reference '" +
                                   to_string(step.reference) + "', keeping '" + to_string(reference) + "'");
    step.reference = reference;
  }
  if (step.picked == step.reference) {
    throw Error(ErrorKind::SelfReference, "picked object '" + to_string(step.picked) + "' equals the reference");
  }
  return step;
}

Plan interpret_video(const PromptBundle& bundle, ChatClient& client, CoTTranscript& transcript,
                     const InterpreterOptions& options) {
  transcript.video_id = bundle.video_id;
  if (bundle.items.empty()) throw Error(ErrorKind::EmptyPlan, "bundle has no keyframes");
  Interpreter interpreter(client, transcript, options);

  const auto at_frame = [](int frame, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw PositionedError(e.kind(), static_cast<std::size_t>(std::max(frame, 0)),
                            "keyframe " + std::to_string(frame) + ": " + e.detail());
    }
  };

  const ObjectList objects =
      at_frame(bundle.items.front().frame_index, [&] { return interpreter.extract_object_list(bundle.items.front().annotated); });

  std::vector<const PromptItem*> valid;
  for (const auto& item : bundle.items) {
    if (at_frame(item.frame_index, [&] { return interpreter.filter_keyframe(item); })) valid.push_back(&item);
  }
  if (valid.size() % 2 == 1) {
    transcript.warnings.push_back("frame " + std::to_string(valid.back()->frame_index) +
                                  ": trailing pick keyframe has no place keyframe; dropped");
  }

  Plan plan;
  for (std::size_t i = 0; i + 1 < valid.size(); i += 2) {
    const PromptItem& pick = *valid[i];
    const PromptItem& place = *valid[i + 1];
    const ObjectRef picked = at_frame(pick.frame_index, [&] { return interpreter.identify_picked(pick, objects); });
    const ObjectRef reference =
        at_frame(place.frame_index, [&] { return interpreter.identify_reference(place, objects, picked); });
    plan.steps.push_back(
        at_frame(place.frame_index, [&] { return interpreter.reason_relation(place, objects, picked, reference); }));
  }
  if (plan.empty()) throw Error(ErrorKind::EmptyPlan, "no valid pick/place keyframe pair in " + bundle.video_id);
  return plan;
}

}  // namespace seedo
