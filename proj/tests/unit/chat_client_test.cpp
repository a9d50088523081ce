#include <doctest.h>
#include <json.hpp>

#include <atomic>
#include <thread>

#include "seedo/chat_client.hpp"
#include "testkit.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that Eigen uses as a name.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

using namespace seedo;
namespace fs = std::filesystem;

namespace {

ChatRequest request(const std::string& user = "hello") {
  ChatRequest r;
  r.system_text = "system";
  r.user_text = user;
  r.images.push_back(Image(4, 4, {1, 2, 3}));
  r.model_name = "m";
  return r;
}

class FlakyClient : public ChatClient {
 public:
  FlakyClient(int failures, bool retryable, std::string answer = "ok")
      : ChatClient(RetryPolicy{2, std::chrono::milliseconds(1), 2.0}),
        failures_(failures),
        retryable_(retryable),
        answer_(std::move(answer)) {}
  int calls = 0;

 protected:
  std::string do_send(const ChatRequest&) override {
    ++calls;
    if (calls <= failures_) throw TransportError("boom", retryable_);
    return answer_;
  }

 private:
  int failures_;
  bool retryable_;
  std::string answer_;
};

std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

/// Local stand-in for a chat-completions server.
class MockServer {
 public:
  MockServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpClientOptions options_for(const MockServer& mock) {
  HttpClientOptions o;
  o.endpoint = mock.endpoint();
  o.api_key = "test-key";
  o.timeout = std::chrono::seconds(5);
  o.retry = RetryPolicy{2, std::chrono::milliseconds(1), 2.0};
  return o;
}

}  // namespace

TEST_CASE("request digest") {
  const auto a = request();
  auto b = request();
  b.model_name = "other";
  b.temperature = 0.7;
  CHECK(request_digest(a) == request_digest(b));
  CHECK(request_digest(a).size() == 64);

  auto c = request();
  c.images[0].set(0, 0, {9, 9, 9});
  CHECK(request_digest(a) != request_digest(c));
  CHECK(request_digest(a) != request_digest(request("hello!")));

  // Field boundaries are part of the key.
  ChatRequest x = request(), y = request();
  x.system_text = "ab";
  x.user_text = "c";
  y.system_text = "a";
  y.user_text = "bc";
  CHECK(request_digest(x) != request_digest(y));
}

TEST_CASE("request validation") {
  auto r = request();
  r.user_text.clear();
  CHECK_THROWS_AS(r.validate(), Error);
  ScriptedClient client(std::map<std::string, std::string>{});
  CHECK_THROWS_AS(client.send(r), Error);
}

TEST_CASE("scripted client replays from memory and disk") {
  const auto r = request();
  ScriptedClient memory({{request_digest(r), "answer"}});
  CHECK(memory.send(r) == "answer");
  CHECK(memory.request_count() == 1);

  testkit::TempDir dir;
  ScriptedClient::add_fixture(dir.path(), r, "from disk");
  ScriptedClient disk(dir.path());
  CHECK(disk.send(r) == "from disk");

  const auto missing = request("unknown");
  try {
    disk.send(missing);
    FAIL("expected FixtureMissing");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FixtureMissing);
  }
  const auto stub = dir / (request_digest(missing) + ".request.json");
  REQUIRE(fs::exists(stub));
  CHECK(nlohmann::json::parse(testkit::read_file(stub)).at("user_text") == "unknown");

  CHECK_THROWS_AS(ScriptedClient(dir / "absent"), Error);
}

TEST_CASE("retry policy") {
  SUBCASE("retryable failures within budget") {
    FlakyClient c(2, true);
    CHECK(c.send(request()) == "ok");
    CHECK(c.calls == 3);
  }
  SUBCASE("budget exhausted") {
    FlakyClient c(3, true);
    CHECK_THROWS_AS(c.send(request()), TransportError);
    CHECK(c.calls == 3);
  }
  SUBCASE("non-retryable surfaces at once") {
    FlakyClient c(1, false);
    CHECK_THROWS_AS(c.send(request()), TransportError);
    CHECK(c.calls == 1);
  }
  SUBCASE("empty responses are not accepted") {
    FlakyClient c(0, true, "");
    CHECK_THROWS_AS(c.send(request()), TransportError);
    CHECK(c.calls == 3);
  }
}

TEST_CASE("http payload and response parsing") {
  const auto body = nlohmann::json::parse(HttpChatClient::payload(request()));
  CHECK(body.at("model") == "m");
  CHECK(body.at("temperature") == 0.0);
  CHECK(body.at("messages").at(0).at("role") == "system");
  CHECK(body.at("messages").at(0).at("content") == "system");
  const auto& user = body.at("messages").at(1).at("content");
  CHECK(user.at(0).at("text") == "hello");
  CHECK(user.at(1).at("image_url").at("url").get<std::string>().starts_with("data:image/png;base64,iVBORw0KGgo"));

  CHECK(HttpChatClient::parse_response(completion("Number: 1")) == "Number: 1");
  CHECK_THROWS_AS(HttpChatClient::parse_response("{}"), TransportError);
  CHECK_THROWS_AS(HttpChatClient::parse_response("not json"), TransportError);
}

TEST_CASE("base64") {
  CHECK(base64_encode({}) == "");
  CHECK(base64_encode({'f'}) == "Zg==");
  CHECK(base64_encode({'f', 'o', 'o', 'b', 'a', 'r'}) == "Zm9vYmFy");
}

TEST_CASE("http client against a local server") {
  MockServer mock;
  std::atomic<int> hits{0};
  std::string auth, content_type;
  mock.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    const int n = ++hits;
    auth = req.get_header_value("Authorization");
    content_type = req.get_header_value("Content-Type");
    const auto body = nlohmann::json::parse(req.body);
    const std::string user = body.at("messages").at(1).at("content").at(0).at("text");
    if (user == "flaky" && n < 3) {
      res.status = 503;
      return;
    }
    if (user == "bad") {
      res.status = 400;
      res.set_content("bad request", "text/plain");
      return;
    }
    res.set_content(completion("echo: " + user), "application/json");
  });

  HttpChatClient client(options_for(mock));
  CHECK(client.send(request("ping")) == "echo: ping");
  CHECK(auth == "Bearer test-key");
  CHECK(content_type == "application/json");

  hits = 0;
  CHECK(client.send(request("flaky")) == "echo: flaky");
  CHECK(hits == 3);

  hits = 0;
  CHECK_THROWS_AS(client.send(request("bad")), TransportError);
  CHECK(hits == 1);
}

TEST_CASE("http client configuration errors") {
  HttpClientOptions o;
  o.endpoint = "ftp://example";
  o.api_key = "k";
  CHECK_THROWS_AS(HttpChatClient{o}, Error);
  o.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  o.api_key = "";
  CHECK_THROWS_AS(HttpChatClient{o}, Error);
}

TEST_CASE("unreachable server is a retryable transport error") {
  HttpClientOptions o;
  {
    MockServer probe;
    o.endpoint = probe.endpoint();
  }
  o.api_key = "k";
  o.timeout = std::chrono::seconds(1);
  o.retry = RetryPolicy{1, std::chrono::milliseconds(1), 1.0};
  HttpChatClient client(o);
  try {
    client.send(request());
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(e.retryable());
  }
}
