#include "synthhome/config.hpp"

#include <cstdlib>
#include <set>

#include "synthhome/error.hpp"
#include "synthhome/genjson.hpp"
#include "synthhome/util.hpp"

namespace synthhome {

std::optional<std::string> process_env(std::string_view name) {
  const char* v = std::getenv(std::string(name).c_str());
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || k == key;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key \"" + key + "\"");
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

double positive(double v, std::string_view what) {
  if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  return v;
}

struct RoleEnv {
  std::string_view endpoint;
  std::string_view api_key;
};

BackendConfig parse_backend(const json* node, std::string_view role, RoleEnv defaults, const EnvLookup& env) {
  BackendConfig b;
  if (!node || node->is_null()) return b;
  const std::string where = "backends." + std::string(role);
  reject_unknown(*node, where,
                 {"kind", "endpoint", "endpoint_env", "api_key_env", "model", "timeout_ms", "max_in_flight",
                  "requests_per_second", "prompt_template", "retry", "dims"});
  b.kind = get_or<std::string>(*node, "kind", "mock", where);
  if (b.kind != "mock" && b.kind != "http") throw ConfigError(where + ".kind must be \"mock\" or \"http\"");
  b.dims = get_or<std::size_t>(*node, "dims", 256, where);
  if (b.dims == 0) throw ConfigError(where + ".dims must be positive");
  if (b.kind == "mock") return b;

  auto& h = b.http;
  h.endpoint = get_or<std::string>(*node, "endpoint", "", where);
  const auto endpoint_env = get_or<std::string>(*node, "endpoint_env", std::string(defaults.endpoint), where);
  if (h.endpoint.empty()) h.endpoint = env(endpoint_env).value_or("");
  if (h.endpoint.empty())
    throw ConfigError(where + ": no endpoint (set \"endpoint\" or the " + endpoint_env + " environment variable)");
  const auto key_env = get_or<std::string>(*node, "api_key_env", std::string(defaults.api_key), where);
  if (!key_env.empty()) h.api_key = env(key_env).value_or("");
  h.model_id = get_or<std::string>(*node, "model", "", where);
  h.timeout = std::chrono::milliseconds(get_or<long>(*node, "timeout_ms", 60000, where));
  h.max_in_flight = get_or<std::size_t>(*node, "max_in_flight", 4, where);
  h.requests_per_second = get_or<double>(*node, "requests_per_second", 0.0, where);
  h.prompt_template = get_or<std::string>(*node, "prompt_template", "{PROMPT}", where);
  apply_prompt_template(h.prompt_template, "");  // validates the slot
  if (const auto it = node->find("retry"); it != node->end()) {
    reject_unknown(*it, where + ".retry", {"max_attempts", "initial_backoff_ms", "backoff_multiplier"});
    h.retry.max_attempts = get_or<int>(*it, "max_attempts", 3, where + ".retry");
    h.retry.initial_backoff = std::chrono::milliseconds(get_or<long>(*it, "initial_backoff_ms", 200, where + ".retry"));
    h.retry.backoff_multiplier = get_or<double>(*it, "backoff_multiplier", 2.0, where + ".retry");
    if (h.retry.max_attempts < 1) throw ConfigError(where + ".retry.max_attempts must be at least 1");
  }
  return b;
}

json backend_json(const BackendConfig& b) {
  if (b.kind == "mock") return {{"kind", "mock"}, {"dims", b.dims}};
  return {{"kind", "http"},
          {"endpoint", b.http.endpoint},
          {"model", b.http.model_id},
          {"timeout_ms", b.http.timeout.count()},
          {"max_in_flight", b.http.max_in_flight},
          {"requests_per_second", b.http.requests_per_second},
          {"prompt_template", b.http.prompt_template},
          {"retry",
           {{"max_attempts", b.http.retry.max_attempts},
            {"initial_backoff_ms", b.http.retry.initial_backoff.count()},
            {"backoff_multiplier", b.http.retry.backoff_multiplier}}}};
}

}  // namespace

RunConfig parse_config(const json& doc, const EnvLookup& env) {
  RunConfig c;
  if (doc.is_null()) return c;
  reject_unknown(doc, "config",
                 {"backends", "engine", "climate", "labeler", "generation", "prompts", "parallelism"});

  if (const auto it = doc.find("backends"); it != doc.end()) {
    reject_unknown(*it, "backends", {"vision", "generator", "scorer", "embedder"});
    auto node = [&](const char* k) -> const json* {
      const auto f = it->find(k);
      return f == it->end() ? nullptr : &*f;
    };
    c.vision = parse_backend(node("vision"), "vision", {"VISION_ENDPOINT", "VISION_API_KEY"}, env);
    c.generator = parse_backend(node("generator"), "generator", {"GEN_ENDPOINT", "GEN_API_KEY"}, env);
    c.scorer = parse_backend(node("scorer"), "scorer", {"GEN_ENDPOINT", "GEN_API_KEY"}, env);
    c.embedder = parse_backend(node("embedder"), "embedder", {"EMBED_ENDPOINT", ""}, env);
  }

  if (const auto it = doc.find("engine"); it != doc.end()) {
    reject_unknown(*it, "engine", {"kind", "engine_home", "weather", "template", "keep_scratch", "scratch_root"});
    const auto kind = get_or<std::string>(*it, "kind", "surrogate", "engine");
    try {
      c.engine.kind = engine_kind_from_string(kind);
    } catch (const std::exception&) {
      throw ConfigError("engine.kind must be \"surrogate\" or \"external\"");
    }
    c.engine.external.engine_home = get_or<std::string>(*it, "engine_home", "", "engine");
    c.engine.external.weather = get_or<std::string>(*it, "weather", "", "engine");
    c.engine.external.keep_scratch = get_or<bool>(*it, "keep_scratch", false, "engine");
    if (auto root = get_or<std::string>(*it, "scratch_root", "", "engine"); !root.empty())
      c.engine.external.scratch_root = root;
    if (auto t = get_or<std::string>(*it, "template", "", "engine"); !t.empty()) c.engine.template_path = t;
    if (c.engine.kind == EngineKind::external && c.engine.external.weather.empty())
      throw ConfigError("engine.weather is required for the external engine");
  }

  if (const auto it = doc.find("climate"); it != doc.end()) {
    reject_unknown(*it, "climate", {"hdd", "cdd", "story_height_m"});
    c.climate.hdd = get_or<double>(*it, "hdd", c.climate.hdd, "climate");
    c.climate.cdd = get_or<double>(*it, "cdd", c.climate.cdd, "climate");
    c.climate.story_height_m = positive(get_or<double>(*it, "story_height_m", 3.0, "climate"), "climate.story_height_m");
    if (c.climate.hdd < 0 || c.climate.cdd < 0) throw ConfigError("climate degree-days must be non-negative");
  }

  if (const auto it = doc.find("labeler"); it != doc.end()) {
    reject_unknown(*it, "labeler", {"heuristic_weight", "text_weight", "normalized_mu", "score_prompt", "temperature"});
    auto& l = c.labeler;
    l.weights.heuristic = get_or<double>(*it, "heuristic_weight", 0.80, "labeler");
    l.weights.text = get_or<double>(*it, "text_weight", 0.20, "labeler");
    if (l.weights.heuristic < 0 || l.weights.text < 0) throw ConfigError("labeler weights must be non-negative");
    l.normalized_mu = get_or<bool>(*it, "normalized_mu", false, "labeler");
    l.score_prompt = get_or<std::string>(*it, "score_prompt", std::string(kDefaultScorePrompt), "labeler");
    if (l.score_prompt.find("{NOTE}") == std::string::npos) throw ConfigError("labeler.score_prompt has no {NOTE} slot");
    l.options.temperature = get_or<double>(*it, "temperature", 0.0, "labeler");
  }

  if (const auto it = doc.find("generation"); it != doc.end()) {
    reject_unknown(*it, "generation", {"max_retries", "temperature", "max_tokens"});
    c.max_retries = get_or<int>(*it, "max_retries", 3, "generation");
    if (c.max_retries < 1) throw ConfigError("generation.max_retries must be at least 1");
    c.generation.temperature = get_or<double>(*it, "temperature", 0.2, "generation");
    c.generation.max_tokens = get_or<int>(*it, "max_tokens", 2048, "generation");
  }

  if (const auto it = doc.find("prompts"); it != doc.end()) {
    reject_unknown(*it, "prompts", {"facade", "floorplan"});
    c.prompts.facade = get_or<std::string>(*it, "facade", std::string(kFacadePrompt), "prompts");
    c.prompts.floorplan = get_or<std::string>(*it, "floorplan", std::string(kFloorplanPrompt), "prompts");
    if (trim(c.prompts.facade).empty() || trim(c.prompts.floorplan).empty())
      throw ConfigError("prompts must be non-empty");
  }

  c.parallelism = get_or<std::size_t>(doc, "parallelism", 4, "config");
  if (c.parallelism == 0) throw ConfigError("parallelism must be at least 1");
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, env);
}

json RunConfig::to_json() const {
  json j;
  j["backends"] = {{"vision", backend_json(vision)},
                   {"generator", backend_json(generator)},
                   {"scorer", backend_json(scorer)},
                   {"embedder", backend_json(embedder)}};
  json engine_j = {{"kind", std::string(synthhome::to_string(engine.kind))}};
  if (engine.kind == EngineKind::external) {
    engine_j["engine_home"] = engine.external.engine_home.string();
    engine_j["weather"] = engine.external.weather.string();
  }
  engine_j["template"] = engine.template_path ? engine.template_path->string() : "builtin";
  j["engine"] = engine_j;
  j["climate"] = {{"hdd", climate.hdd}, {"cdd", climate.cdd}, {"story_height_m", climate.story_height_m}};
  j["labeler"] = {{"heuristic_weight", labeler.weights.heuristic},
                  {"text_weight", labeler.weights.text},
                  {"normalized_mu", labeler.normalized_mu},
                  {"score_prompt", labeler.score_prompt},
                  {"temperature", labeler.options.temperature}};
  j["generation"] = {{"max_retries", max_retries},
                     {"temperature", generation.temperature},
                     {"max_tokens", generation.max_tokens}};
  j["prompts"] = {{"facade", prompts.facade}, {"floorplan", prompts.floorplan}};
  j["parallelism"] = parallelism;
  return j;
}

std::string RunConfig::hash() const { return sha256_hex(to_json().dump()); }

std::unique_ptr<VisionBackend> make_vision_backend(const BackendConfig& c) {
  if (c.kind == "http") return std::make_unique<HttpVisionBackend>(c.http);
  return std::make_unique<MockVisionBackend>();
}

std::unique_ptr<TextBackend> make_generator_backend(const BackendConfig& c) {
  if (c.kind == "http") return std::make_unique<HttpTextBackend>(c.http);
  return std::make_unique<MockFeatureGenerator>();
}

std::unique_ptr<TextBackend> make_scorer_backend(const BackendConfig& c) {
  if (c.kind == "http") return std::make_unique<HttpTextBackend>(c.http);
  return std::make_unique<KeywordScoreBackend>();
}

std::unique_ptr<EmbeddingBackend> make_embedding_backend(const BackendConfig& c) {
  if (c.kind == "http") return std::make_unique<HttpEmbeddingBackend>(c.http);
  return std::make_unique<HashingEmbeddingBackend>(c.dims);
}

}  // namespace synthhome
