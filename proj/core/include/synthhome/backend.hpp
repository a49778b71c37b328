#pragma once

// Model backend contracts shared by the describe, generate, label and
// evaluation stages, plus the deterministic in-process implementations used
// for offline runs and tests.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "synthhome/error.hpp"

namespace synthhome {

struct RetryPolicy {
  // Total attempts, including the first.
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
};

// Calls fn() until it returns without throwing TransportError or the policy is
// exhausted. Any other exception propagates immediately.
template <class Fn>
auto with_retries(const RetryPolicy& policy, std::string_view what, Fn&& fn) -> decltype(fn()) {
  const int attempts = std::max(1, policy.max_attempts);
  auto backoff = std::chrono::duration<double, std::milli>(policy.initial_backoff);
  std::string last_cause;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    try {
      return fn();
    } catch (const TransportError& e) {
      last_cause = e.what();
    }
    if (attempt < attempts && backoff.count() > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= policy.backoff_multiplier;
    }
  }
  throw BackendError(std::string(what) + ": gave up after " + std::to_string(attempts) +
                     " attempts: " + last_cause);
}

class VisionBackend {
 public:
  virtual ~VisionBackend() = default;
  virtual std::string id() const = 0;
  // One request. Throws TransportError for retryable failures.
  virtual std::string describe(std::span<const std::uint8_t> image, std::string_view prompt) = 0;
  virtual RetryPolicy retry_policy() const { return {}; }
};

struct GenerationOptions {
  double temperature = 0.2;
  int max_tokens = 2048;
};

class TextBackend {
 public:
  virtual ~TextBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string generate(std::string_view prompt, const GenerationOptions& options) = 0;
  virtual RetryPolicy retry_policy() const { return {}; }
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::string id() const = 0;
  virtual std::vector<double> embed(std::string_view text) = 0;
  virtual RetryPolicy retry_policy() const { return {}; }
};

// Deterministic vision stand-in: "MOCK:" + first 8 hex chars of the image's
// SHA-256 + "|" + prompt length in bytes. Any pixel change alters the reply.
class MockVisionBackend final : public VisionBackend {
 public:
  std::string id() const override { return "mock-vision"; }
  std::string describe(std::span<const std::uint8_t> image, std::string_view prompt) override;
  RetryPolicy retry_policy() const override { return {1, std::chrono::milliseconds(0), 1.0}; }
};

// Feature-hashed bag of words and character trigrams. Deterministic, and
// texts sharing vocabulary land close together.
class HashingEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit HashingEmbeddingBackend(std::size_t dims = 256) : dims_(dims) {}
  std::string id() const override { return "hashing-embed-" + std::to_string(dims_); }
  std::vector<double> embed(std::string_view text) override;
  RetryPolicy retry_policy() const override { return {1, std::chrono::milliseconds(0), 1.0}; }

 private:
  std::size_t dims_;
};

// Adapters over plain callables; they count calls so tests can pin retry
// behaviour. Thread-safe.
class CallbackVisionBackend final : public VisionBackend {
 public:
  using Fn = std::function<std::string(std::span<const std::uint8_t>, std::string_view)>;
  CallbackVisionBackend(std::string id, Fn fn, RetryPolicy policy = {3, std::chrono::milliseconds(0), 1.0})
      : id_(std::move(id)), fn_(std::move(fn)), policy_(policy) {}

  std::string id() const override { return id_; }
  std::string describe(std::span<const std::uint8_t> image, std::string_view prompt) override {
    {
      std::lock_guard lock(mu_);
      ++calls_;
    }
    return fn_(image, prompt);
  }
  RetryPolicy retry_policy() const override { return policy_; }
  int calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }

 private:
  std::string id_;
  Fn fn_;
  RetryPolicy policy_;
  mutable std::mutex mu_;
  int calls_ = 0;
};

class CallbackTextBackend final : public TextBackend {
 public:
  using Fn = std::function<std::string(std::string_view)>;
  CallbackTextBackend(std::string id, Fn fn, RetryPolicy policy = {3, std::chrono::milliseconds(0), 1.0})
      : id_(std::move(id)), fn_(std::move(fn)), policy_(policy) {}

  std::string id() const override { return id_; }
  std::string generate(std::string_view prompt, const GenerationOptions&) override {
    {
      std::lock_guard lock(mu_);
      ++calls_;
      prompts_.emplace_back(prompt);
    }
    return fn_(prompt);
  }
  RetryPolicy retry_policy() const override { return policy_; }
  int calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }
  std::vector<std::string> prompts() const {
    std::lock_guard lock(mu_);
    return prompts_;
  }

 private:
  std::string id_;
  Fn fn_;
  RetryPolicy policy_;
  mutable std::mutex mu_;
  int calls_ = 0;
  std::vector<std::string> prompts_;
};

// Replies with the scripted responses in order, then repeats the last one.
class ScriptedTextBackend final : public TextBackend {
 public:
  explicit ScriptedTextBackend(std::vector<std::string> responses) : responses_(std::move(responses)) {}

  std::string id() const override { return "scripted-text"; }
  std::string generate(std::string_view prompt, const GenerationOptions&) override;
  int calls() const;
  std::vector<std::string> prompts() const;

 private:
  std::vector<std::string> responses_;
  mutable std::mutex mu_;
  std::vector<std::string> prompts_;
};

class CallbackEmbeddingBackend final : public EmbeddingBackend {
 public:
  using Fn = std::function<std::vector<double>(std::string_view)>;
  CallbackEmbeddingBackend(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}
  std::string id() const override { return id_; }
  std::vector<double> embed(std::string_view text) override { return fn_(text); }

 private:
  std::string id_;
  Fn fn_;
};

}  // namespace synthhome
