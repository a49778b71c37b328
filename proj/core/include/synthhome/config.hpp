#pragma once

// Run configuration: one JSON document selecting backends, engine, climate,
// labeler weights, retries and parallelism.
//
// {
//   "backends": {
//     "vision":    {"kind": "mock" | "http", "endpoint": "...", "endpoint_env": "VISION_ENDPOINT",
//                   "api_key_env": "VISION_API_KEY", "model": "...", "timeout_ms": 60000,
//                   "max_in_flight": 4, "requests_per_second": 0, "prompt_template": "{PROMPT}",
//                   "retry": {"max_attempts": 3, "initial_backoff_ms": 200, "backoff_multiplier": 2}},
//     "generator": {...},   env defaults GEN_ENDPOINT / GEN_API_KEY
//     "scorer":    {...},   env defaults GEN_ENDPOINT / GEN_API_KEY
//     "embedder":  {...}    env default EMBED_ENDPOINT; mock takes "dims"
//   },
//   "engine": {"kind": "surrogate" | "external", "engine_home": "...", "weather": "...",
//              "template": "path.idf", "keep_scratch": false},
//   "climate": {"hdd": 3100, "cdd": 450, "story_height_m": 3},
//   "labeler": {"heuristic_weight": 0.8, "text_weight": 0.2, "normalized_mu": false,
//               "score_prompt": "...", "temperature": 0},
//   "generation": {"max_retries": 3, "temperature": 0.2, "max_tokens": 2048},
//   "prompts": {"facade": "...", "floorplan": "..."},
//   "parallelism": 4
// }
//
// Every section is optional; the defaults are all-mock backends and the
// surrogate engine. Unknown keys are rejected.

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "synthhome/backend.hpp"
#include "synthhome/http_backend.hpp"
#include "synthhome/label.hpp"
#include "synthhome/simulate.hpp"
#include "synthhome/vision.hpp"

namespace synthhome {

struct BackendConfig {
  std::string kind = "mock";
  HttpSettings http;  // kind == "http"
  std::size_t dims = 256;  // mock embedder
};

struct EngineConfig {
  EngineKind kind = EngineKind::surrogate;
  ExternalEngineOptions external;
  std::optional<std::filesystem::path> template_path;
};

struct RunConfig {
  BackendConfig vision;
  BackendConfig generator;
  BackendConfig scorer;
  BackendConfig embedder;
  EngineConfig engine;
  Climate climate;
  LabelerConfig labeler;
  int max_retries = 3;
  GenerationOptions generation;
  DescribePrompts prompts;
  std::size_t parallelism = 4;

  // Resolved settings without secrets; what the manifest records.
  nlohmann::json to_json() const;
  // SHA-256 of to_json().dump().
  std::string hash() const;
};

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;
std::optional<std::string> process_env(std::string_view name);

// Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const EnvLookup& env = process_env);
RunConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env);

std::unique_ptr<VisionBackend> make_vision_backend(const BackendConfig& config);
std::unique_ptr<TextBackend> make_generator_backend(const BackendConfig& config);
std::unique_ptr<TextBackend> make_scorer_backend(const BackendConfig& config);
std::unique_ptr<EmbeddingBackend> make_embedding_backend(const BackendConfig& config);

}  // namespace synthhome
