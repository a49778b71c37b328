#pragma once

// JSON-over-HTTP backends.
//
//   vision:    POST <endpoint>/describe  {"image": <base64>, "prompt": str} -> {"text": str}
//   generator: POST <endpoint>/generate  {"prompt", "temperature", "max_tokens"} -> {"text": str}
//   embedder:  POST <endpoint>/embed     {"text": str} -> {"embedding": [number, ...]}
//
// An API key, when set, is sent as "Authorization: Bearer <key>".
// Connection failures, 429 and 5xx are TransportError (retried by callers);
// other non-2xx statuses are BackendError.

#include <chrono>
#include <memory>
#include <string>

#include "synthhome/backend.hpp"
#include "synthhome/concurrency.hpp"
#include "synthhome/domain.hpp"

namespace synthhome {

struct HttpSettings {
  std::string endpoint;  // e.g. "http://127.0.0.1:8080" or "https://host/v1"
  std::string api_key;
  std::string model_id;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
  std::size_t max_in_flight = 4;
  double requests_per_second = 0.0;  // <= 0: unlimited
  // Wraps the caller's prompt; "{PROMPT}" is replaced. Lets one pipeline talk
  // to models that expect different chat framing.
  std::string prompt_template = "{PROMPT}";
};

std::string apply_prompt_template(std::string_view tmpl, std::string_view prompt);

class HttpJsonClient {
 public:
  explicit HttpJsonClient(const HttpSettings& settings);
  ~HttpJsonClient();
  HttpJsonClient(const HttpJsonClient&) = delete;
  HttpJsonClient& operator=(const HttpJsonClient&) = delete;

  // POSTs `body` to endpoint + route and returns the parsed JSON reply.
  nlohmann::json post(std::string_view route, const nlohmann::json& body);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class HttpVisionBackend final : public VisionBackend {
 public:
  explicit HttpVisionBackend(HttpSettings settings);
  std::string id() const override;
  std::string describe(std::span<const std::uint8_t> image, std::string_view prompt) override;
  RetryPolicy retry_policy() const override { return settings_.retry; }

 private:
  HttpSettings settings_;
  HttpJsonClient client_;
  TokenBucket bucket_;
  InFlightLimit in_flight_;
};

class HttpTextBackend final : public TextBackend {
 public:
  explicit HttpTextBackend(HttpSettings settings);
  std::string id() const override;
  std::string generate(std::string_view prompt, const GenerationOptions& options) override;
  RetryPolicy retry_policy() const override { return settings_.retry; }

 private:
  HttpSettings settings_;
  HttpJsonClient client_;
  TokenBucket bucket_;
  InFlightLimit in_flight_;
};

class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(HttpSettings settings);
  std::string id() const override;
  std::vector<double> embed(std::string_view text) override;
  RetryPolicy retry_policy() const override { return settings_.retry; }

 private:
  HttpSettings settings_;
  HttpJsonClient client_;
  TokenBucket bucket_;
  InFlightLimit in_flight_;
};

}  // namespace synthhome
