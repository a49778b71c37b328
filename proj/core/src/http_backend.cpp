#include "httplib.h"

#include "synthhome/http_backend.hpp"

#include "synthhome/util.hpp"

namespace synthhome {

std::string apply_prompt_template(std::string_view tmpl, std::string_view prompt) {
  static constexpr std::string_view kSlot = "{PROMPT}";
  std::string out(tmpl);
  const auto pos = out.find(kSlot);
  if (pos == std::string::npos) throw ConfigError("prompt template lacks a {PROMPT} slot");
  out.replace(pos, kSlot.size(), prompt);
  return out;
}

struct HttpJsonClient::Impl {
  std::string base;
  std::string path_prefix;
  std::string api_key;
  std::unique_ptr<httplib::Client> client;
};

HttpJsonClient::HttpJsonClient(const HttpSettings& settings) : impl_(std::make_unique<Impl>()) {
  const std::string& url = settings.endpoint;
  const auto scheme_end = url.find("://");
  if (url.empty() || scheme_end == std::string::npos) {
    throw ConfigError("backend endpoint must be an absolute http(s) URL, got \"" + url + "\"");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  impl_->base = url.substr(0, path_start);
  impl_->path_prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!impl_->path_prefix.empty() && impl_->path_prefix.back() == '/') impl_->path_prefix.pop_back();
  impl_->api_key = settings.api_key;
  impl_->client = std::make_unique<httplib::Client>(impl_->base);
  if (!impl_->client->is_valid()) throw ConfigError("unsupported backend endpoint \"" + url + "\"");
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(settings.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(settings.timeout - secs);
  impl_->client->set_connection_timeout(secs.count(), usecs.count());
  impl_->client->set_read_timeout(secs.count(), usecs.count());
  impl_->client->set_write_timeout(secs.count(), usecs.count());
}

HttpJsonClient::~HttpJsonClient() = default;

nlohmann::json HttpJsonClient::post(std::string_view route, const nlohmann::json& body) {
  httplib::Headers headers;
  if (!impl_->api_key.empty()) headers.emplace("Authorization", "Bearer " + impl_->api_key);
  const std::string path = impl_->path_prefix + std::string(route);
  auto res = impl_->client->Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + impl_->base + path + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("POST " + path + " returned HTTP " + std::to_string(res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("POST " + path + " returned HTTP " + std::to_string(res->status) + ": " +
                       res->body.substr(0, 200));
  }
  auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw TransportError("POST " + path + " returned malformed JSON");
  return reply;
}

namespace {

std::string text_member(const nlohmann::json& reply, std::string_view route) {
  auto it = reply.find("text");
  if (it == reply.end() || !it->is_string()) {
    throw TransportError(std::string(route) + " reply lacks a \"text\" string");
  }
  return it->get<std::string>();
}

std::string describe_id(std::string_view kind, const HttpSettings& s) {
  return std::string(kind) + ":" + (s.model_id.empty() ? s.endpoint : s.model_id);
}

}  // namespace

HttpVisionBackend::HttpVisionBackend(HttpSettings settings)
    : settings_(std::move(settings)),
      client_(settings_),
      bucket_(settings_.requests_per_second, std::max(1.0, settings_.requests_per_second)),
      in_flight_(settings_.max_in_flight) {}

std::string HttpVisionBackend::id() const { return describe_id("http-vision", settings_); }

std::string HttpVisionBackend::describe(std::span<const std::uint8_t> image, std::string_view prompt) {
  bucket_.acquire();
  auto slot = in_flight_.hold();
  nlohmann::json body{{"image", base64_encode(image)},
                      {"prompt", apply_prompt_template(settings_.prompt_template, prompt)}};
  if (!settings_.model_id.empty()) body["model"] = settings_.model_id;
  return text_member(client_.post("/describe", body), "/describe");
}

HttpTextBackend::HttpTextBackend(HttpSettings settings)
    : settings_(std::move(settings)),
      client_(settings_),
      bucket_(settings_.requests_per_second, std::max(1.0, settings_.requests_per_second)),
      in_flight_(settings_.max_in_flight) {}

std::string HttpTextBackend::id() const { return describe_id("http-text", settings_); }

std::string HttpTextBackend::generate(std::string_view prompt, const GenerationOptions& options) {
  bucket_.acquire();
  auto slot = in_flight_.hold();
  nlohmann::json body{{"prompt", apply_prompt_template(settings_.prompt_template, prompt)},
                      {"temperature", options.temperature},
                      {"max_tokens", options.max_tokens}};
  if (!settings_.model_id.empty()) body["model"] = settings_.model_id;
  return text_member(client_.post("/generate", body), "/generate");
}

HttpEmbeddingBackend::HttpEmbeddingBackend(HttpSettings settings)
    : settings_(std::move(settings)),
      client_(settings_),
      bucket_(settings_.requests_per_second, std::max(1.0, settings_.requests_per_second)),
      in_flight_(settings_.max_in_flight) {}

std::string HttpEmbeddingBackend::id() const { return describe_id("http-embed", settings_); }

std::vector<double> HttpEmbeddingBackend::embed(std::string_view text) {
  bucket_.acquire();
  auto slot = in_flight_.hold();
  nlohmann::json body{{"text", text}};
  if (!settings_.model_id.empty()) body["model"] = settings_.model_id;
  const auto reply = client_.post("/embed", body);
  auto it = reply.find("embedding");
  if (it == reply.end() || !it->is_array() || it->empty()) {
    throw TransportError("/embed reply lacks an \"embedding\" array");
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) throw TransportError("/embed reply has a non-numeric component");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace synthhome
