#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "seedo/chat_client.hpp"
#include "seedo/keyframe_select.hpp"
#include "seedo/visual_prompt.hpp"

namespace seedo {

/// Keyframe parameters left unset fall back to SelectionParams::defaults_for.
struct SelectionOverrides {
  std::optional<int> smooth_window;
  std::optional<double> min_prominence;
  std::optional<int> min_separation;
  std::optional<EdgePolicy> edge_policy;

  SelectionParams resolve(const SpeedSeries& raw) const;
};

struct Config {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4o-2024-08-06";
  std::string api_key_env = "SEEDO_API_KEY";
  std::optional<std::filesystem::path> fixtures_dir;
  SelectionOverrides selection;
  OverlayStyle overlay;
  double min_confidence = 0.5;
  RetryPolicy retry;
  int parallelism = 1;

  void validate() const;
};

/// JSON config file; unknown keys are rejected. Relative fixtures_dir is
/// resolved against the config file's directory.
Config load_config(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

/// ScriptedClient when fixtures_dir is set, otherwise HttpChatClient with the
/// key from `api_key_env`. ConfigError when neither is usable.
std::unique_ptr<ChatClient> make_chat_client(const Config& config, const EnvLookup& env = process_env);

}  // namespace seedo
