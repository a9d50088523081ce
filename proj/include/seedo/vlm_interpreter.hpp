#pragma once

#include <string>
#include <vector>

#include "seedo/chat_client.hpp"
#include "seedo/plan_model.hpp"
#include "seedo/visual_prompt.hpp"

namespace seedo {

struct ObjectList {
  int count = 0;
  /// Normalized names; duplicates kept, one entry per physical object.
  std::vector<std::string> names;

  /// "[a, b, c]" as embedded in the prompts.
  std::string bracketed() const;
};

/// One issued request and what came of it.
struct TranscriptRecord {
  std::string stage;  ///< object_list | filter | picked | reference | relation
  int frame_index = -1;
  int attempt = 0;
  std::string digest;
  std::string user_text;
  std::string response;
  std::string parsed;  ///< parsed value, or "error: ..." when parsing failed
};

struct CoTTranscript {
  std::string video_id;
  std::vector<TranscriptRecord> records;
  std::vector<std::string> warnings;
  std::size_t prompt_chars = 0;
  std::size_t response_chars = 0;

  std::size_t request_count() const { return records.size(); }
  /// JSON lines: one per record, then one per warning, then a summary line.
  std::string to_jsonl() const;
};

struct InterpreterOptions {
  std::string model_name = "gpt-4o-2024-08-06";
  double temperature = 0.0;
};

/// Prompt text for each chain-of-thought stage.
namespace prompts {
ChatRequest object_list(const Image& first_frame, const InterpreterOptions& options);
ChatRequest filter(const PromptItem& item, const InterpreterOptions& options);
ChatRequest picked(const PromptItem& item, const ObjectList& objects, const InterpreterOptions& options);
ChatRequest reference(const PromptItem& item, const ObjectList& objects, const ObjectRef& picked,
                      const InterpreterOptions& options);
ChatRequest relation(const PromptItem& item, const ObjectList& objects, const ObjectRef& picked,
                     const ObjectRef& reference, const InterpreterOptions& options);
/// Appended to the user prompt on the single format retry.
inline constexpr const char* kFormatCorrection =
    "\n- Your previous answer did not follow the required format. Respond exactly in the required format.";
}  // namespace prompts

/// Response parsers, exposed for testing.
namespace parse {
ObjectList object_list(const std::string& response);
bool filter(const std::string& response);
ObjectRef picked(const std::string& response, const ObjectList& objects);
ObjectRef reference(const std::string& response, const ObjectList& objects, const ObjectRef& picked);
PlanStep relation(const std::string& response, const ObjectList& objects);
}  // namespace parse

/// Drives one video's chain of thought. Not thread-safe; one per video.
class Interpreter {
 public:
  Interpreter(ChatClient& client, CoTTranscript& transcript, InterpreterOptions options = {});

  ObjectList extract_object_list(const Image& first_frame);
  bool filter_keyframe(const PromptItem& item);
  ObjectRef identify_picked(const PromptItem& item, const ObjectList& objects);
  ObjectRef identify_reference(const PromptItem& item, const ObjectList& objects, const ObjectRef& picked);
  /// May replace the picked object (the relation prompt invites the model to
  /// correct it); the reference found earlier is kept.
  PlanStep reason_relation(const PromptItem& item, const ObjectList& objects, const ObjectRef& picked,
                           const ObjectRef& reference);

 private:
  template <typename Parse>
  auto ask(const std::string& stage, int frame, ChatRequest request, Parse parse_fn);

  ChatClient& client_;
  CoTTranscript& transcript_;
  InterpreterOptions options_;
};

/// Object list from the first item, validity filter on every item, then
/// positional pick/place pairing of the survivors. Throws EmptyPlan when no
/// pair survives; stage errors are rethrown with the keyframe index. The
/// transcript is filled as requests are issued, so it survives a throw.
Plan interpret_video(const PromptBundle& bundle, ChatClient& client, CoTTranscript& transcript,
                     const InterpreterOptions& options = {});

}  // namespace seedo
