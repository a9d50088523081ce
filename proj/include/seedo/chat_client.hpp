#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "seedo/error.hpp"
#include "seedo/image.hpp"

namespace seedo {

struct ChatRequest {
  std::string system_text;
  std::string user_text;
  std::vector<Image> images;
  double temperature = 0.0;
  std::string model_name;

  void validate() const;
};

/// Hex SHA-256 over (system_text, user_text, image content hashes). Model
/// name and temperature are deliberately not part of the key.
std::string request_digest(const ChatRequest& request);

class TransportError : public Error {
 public:
  TransportError(const std::string& message, bool retryable)
      : Error(ErrorKind::Transport, message), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds backoff{500};
  double multiplier = 2.0;
};

/// Request/response chat backend. send() retries retryable transport
/// failures per the policy and never returns an empty response.
class ChatClient {
 public:
  explicit ChatClient(RetryPolicy policy = {}) : policy_(policy) {}
  virtual ~ChatClient() = default;
  ChatClient(const ChatClient&) = delete;
  ChatClient& operator=(const ChatClient&) = delete;

  std::string send(const ChatRequest& request);

  std::size_t request_count() const { return requests_.load(); }

 protected:
  virtual std::string do_send(const ChatRequest& request) = 0;

 private:
  RetryPolicy policy_;
  std::atomic<std::size_t> requests_{0};
};

/// Replays canned responses keyed by request_digest. Fixtures are
/// `<digest>.txt` files in a directory, or an in-memory map. On a miss the
/// request is written next to the fixtures as `<digest>.request.json` (when
/// a directory is configured) so the missing answer can be filled in.
class ScriptedClient : public ChatClient {
 public:
  explicit ScriptedClient(std::filesystem::path fixtures_dir);
  explicit ScriptedClient(std::map<std::string, std::string> responses);

  /// Writes `<digest>.txt` holding `response` into `fixtures_dir`.
  static std::filesystem::path add_fixture(const std::filesystem::path& fixtures_dir, const ChatRequest& request,
                                           const std::string& response);

 protected:
  std::string do_send(const ChatRequest& request) override;

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> responses_;
};

struct HttpClientOptions {
  std::string endpoint;  ///< e.g. https://api.openai.com/v1/chat/completions
  std::string api_key;
  std::chrono::seconds timeout{120};
  RetryPolicy retry;
};

/// OpenAI-style chat-completions backend; images go as base64 PNG data URLs.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpClientOptions options);

  /// The JSON body that would be POSTed for `request`.
  static std::string payload(const ChatRequest& request);
  /// Extracts choices[0].message.content from a response body.
  static std::string parse_response(const std::string& body);

 protected:
  std::string do_send(const ChatRequest& request) override;

 private:
  HttpClientOptions options_;
  std::string base_url_;
  std::string path_;
};

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

}  // namespace seedo
