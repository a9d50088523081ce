#include "seedo/chat_client.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

namespace seedo {
namespace {

std::string hex(const unsigned char* data, unsigned int len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += digits[data[i] >> 4];
    out += digits[data[i] & 0xf];
  }
  return out;
}

void update_field(EVP_MD_CTX* ctx, const std::string& field) {
  const std::uint64_t size = field.size();
  EVP_DigestUpdate(ctx, &size, sizeof size);
  EVP_DigestUpdate(ctx, field.data(), field.size());
}

}  // namespace

void ChatRequest::validate() const {
  if (system_text.empty()) throw Error(ErrorKind::ConfigError, "chat request has an empty system prompt");
  if (user_text.empty()) throw Error(ErrorKind::ConfigError, "chat request has an empty user prompt");
  if (!(temperature >= 0)) throw Error(ErrorKind::ConfigError, "temperature must be >= 0");
}

std::string request_digest(const ChatRequest& request) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  update_field(ctx, request.system_text);
  update_field(ctx, request.user_text);
  for (const auto& image : request.images) update_field(ctx, content_hash(image));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  return hex(digest, len);
}

std::string ChatClient::send(const ChatRequest& request) {
  request.validate();
  requests_.fetch_add(1);
  auto delay = policy_.backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      std::string response = do_send(request);
      if (response.empty()) throw TransportError("backend returned an empty response", true);
      return response;
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= policy_.max_retries) throw;
    }
    std::this_thread::sleep_for(delay);
    delay = std::chrono::milliseconds(static_cast<long>(delay.count() * policy_.multiplier));
  }
}

ScriptedClient::ScriptedClient(std::filesystem::path fixtures_dir)
    : ChatClient(RetryPolicy{0, {}, 1.0}), dir_(std::move(fixtures_dir)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw Error(ErrorKind::ConfigError, "fixtures directory " + dir_.string() + " does not exist");
  }
}

ScriptedClient::ScriptedClient(std::map<std::string, std::string> responses)
    : ChatClient(RetryPolicy{0, {}, 1.0}), responses_(std::move(responses)) {}

std::filesystem::path ScriptedClient::add_fixture(const std::filesystem::path& fixtures_dir, const ChatRequest& request,
                                                  const std::string& response) {
  std::filesystem::create_directories(fixtures_dir);
  const auto path = fixtures_dir / (request_digest(request) + ".txt");
  std::ofstream(path, std::ios::binary) << response;
  return path;
}

std::string ScriptedClient::do_send(const ChatRequest& request) {
  const std::string digest = request_digest(request);
  if (auto it = responses_.find(digest); it != responses_.end()) return it->second;
  if (!dir_.empty()) {
    std::ifstream in(dir_ / (digest + ".txt"), std::ios::binary);
    if (in) {
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }
    nlohmann::json stub = {{"digest", digest}, {"system_text", request.system_text}, {"user_text", request.user_text}};
    for (const auto& image : request.images) stub["image_hashes"].push_back(content_hash(image));
    std::ofstream(dir_ / (digest + ".request.json")) << stub.dump(2) << '\n';
  }
  throw Error(ErrorKind::FixtureMissing, "no scripted response for request " + digest);
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace seedo
