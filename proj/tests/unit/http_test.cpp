#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "support.hpp"
#include "synthhome/error.hpp"
#include "synthhome/http_backend.hpp"
#include "synthhome/util.hpp"
#include "synthhome/vision.hpp"

using namespace synthhome;

namespace {

// Local JSON model server. /describe fails with 503 for the first
// `fail_first` requests.
class FakeModelServer {
 public:
  FakeModelServer() {
    server_.Post("/describe", [this](const httplib::Request& req, httplib::Response& res) {
      last_auth = req.get_header_value("Authorization");
      if (describe_calls++ < fail_first) {
        res.status = 503;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      const auto image = base64_decode(body.at("image").get<std::string>());
      last_prompt = body.at("prompt").get<std::string>();
      res.set_content(nlohmann::json{{"text", "image of " + std::to_string(image.size()) + " bytes"}}.dump(),
                      "application/json");
    });
    server_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      if (body.at("prompt") == "reject") {
        res.status = 400;
        res.set_content("bad prompt", "text/plain");
        return;
      }
      last_temperature = body.at("temperature").get<double>();
      res.set_content(nlohmann::json{{"text", "0.42"}}.dump(), "application/json");
    });
    server_.Post("/embed", [](const httplib::Request& req, httplib::Response& res) {
      const auto text = nlohmann::json::parse(req.body).at("text").get<std::string>();
      res.set_content(nlohmann::json{{"embedding", {static_cast<double>(text.size()), 1.0}}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeModelServer() {
    server_.stop();
    thread_.join();
  }

  HttpSettings settings() const {
    HttpSettings s;
    s.endpoint = "http://127.0.0.1:" + std::to_string(port_);
    s.api_key = "secret";
    s.retry = {3, std::chrono::milliseconds(1), 1.0};
    s.timeout = std::chrono::milliseconds(5000);
    return s;
  }

  std::atomic<int> describe_calls{0};
  int fail_first = 0;
  std::string last_auth;
  std::string last_prompt;
  double last_temperature = -1;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(HttpBackends, VisionRetriesServerErrors) {
  FakeModelServer server;
  server.fail_first = 2;
  auto settings = server.settings();
  settings.prompt_template = "USER: <image>\n{PROMPT} ASSISTANT:";
  HttpVisionBackend vision(settings);
  const auto png = test::solid_png(4, 4);
  const auto text = describe_image(vision, png, kFacadePrompt);
  EXPECT_EQ(text, "image of " + std::to_string(png.size()) + " bytes");
  EXPECT_EQ(server.describe_calls.load(), 3);
  EXPECT_EQ(server.last_auth, "Bearer secret");
  EXPECT_EQ(server.last_prompt, "USER: <image>\n" + std::string(kFacadePrompt) + " ASSISTANT:");
}

TEST(HttpBackends, VisionGivesUp) {
  FakeModelServer server;
  server.fail_first = 100;
  HttpVisionBackend vision(server.settings());
  EXPECT_THROW(describe_image(vision, test::solid_png(4, 4), "p"), BackendError);
  EXPECT_EQ(server.describe_calls.load(), 3);
}

TEST(HttpBackends, ClientErrorIsNotRetried) {
  FakeModelServer server;
  HttpTextBackend text(server.settings());
  EXPECT_THROW(text.generate("reject", {}), BackendError);
  EXPECT_EQ(text.generate("ok", {.temperature = 0.7, .max_tokens = 10}), "0.42");
  EXPECT_EQ(server.last_temperature, 0.7);
}

TEST(HttpBackends, Embedding) {
  FakeModelServer server;
  HttpEmbeddingBackend embed(server.settings());
  EXPECT_EQ(embed.embed("abcd"), (std::vector<double>{4.0, 1.0}));
}

TEST(HttpBackends, ConnectionRefusedIsTransport) {
  HttpSettings s;
  s.endpoint = "http://127.0.0.1:1";
  s.timeout = std::chrono::milliseconds(500);
  HttpTextBackend text(s);
  EXPECT_THROW(text.generate("x", {}), TransportError);
}

TEST(HttpBackends, PromptTemplateNeedsSlot) {
  EXPECT_EQ(apply_prompt_template("[{PROMPT}]", "hi"), "[hi]");
  EXPECT_THROW(apply_prompt_template("no slot", "hi"), ConfigError);
}
