#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <json.hpp>

#include <regex>

#include "seedo/chat_client.hpp"

namespace seedo {

HttpChatClient::HttpChatClient(HttpClientOptions options) : ChatClient(options.retry), options_(std::move(options)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(options_.endpoint, m, url)) {
    throw Error(ErrorKind::ConfigError, "endpoint must be an http(s) URL, got '" + options_.endpoint + "'");
  }
  base_url_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
  if (options_.api_key.empty()) throw Error(ErrorKind::ConfigError, "API key is empty");
}

std::string HttpChatClient::payload(const ChatRequest& request) {
  nlohmann::json user = nlohmann::json::array();
  user.push_back({{"type", "text"}, {"text", request.user_text}});
  for (const auto& image : request.images) {
    user.push_back({{"type", "image_url"},
                    {"image_url", {{"url", "data:image/png;base64," + base64_encode(encode_png(image))}}}});
  }
  nlohmann::json body = {
      {"model", request.model_name},
      {"temperature", request.temperature},
      {"messages",
       {{{"role", "system"}, {"content", request.system_text}}, {{"role", "user"}, {"content", std::move(user)}}}}};
  return body.dump();
}

std::string HttpChatClient::parse_response(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw TransportError("response content is not text", false);
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat-completions response: ") + e.what(), false);
  }
}

std::string HttpChatClient::do_send(const ChatRequest& request) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  client.set_bearer_token_auth(options_.api_key);

  auto result = client.Post(path_, payload(request), "application/json");
  if (!result) throw TransportError("HTTP request failed: " + httplib::to_string(result.error()), true);
  const int status = result->status;
  if (status == 429 || status >= 500) {
    throw TransportError("HTTP " + std::to_string(status) + " from chat backend", true);
  }
  if (status != 200) throw TransportError("HTTP " + std::to_string(status) + ": " + result->body, false);
  return parse_response(result->body);
}

}  // namespace seedo
