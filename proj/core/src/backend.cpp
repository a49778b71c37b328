#include "synthhome/backend.hpp"

#include <cctype>
#include <cstdint>

#include "synthhome/util.hpp"

namespace synthhome {

std::string MockVisionBackend::describe(std::span<const std::uint8_t> image, std::string_view prompt) {
  return "MOCK:" + sha256_hex(image).substr(0, 8) + "|" + std::to_string(prompt.size());
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<double> HashingEmbeddingBackend::embed(std::string_view text) {
  std::vector<double> v(dims_, 0.0);
  auto add = [&](std::string_view feature, double weight) {
    const std::uint64_t h = fnv1a(feature);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[h % dims_] += sign * weight;
  };
  const std::string lower = to_lower(text);
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    add(word, 1.0);
    const std::string padded = "#" + word + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) add(std::string_view(padded).substr(i, 3), 0.5);
    word.clear();
  };
  for (char c : lower) {
    if (std::isalnum(static_cast<unsigned char>(c))) word += c;
    else flush();
  }
  flush();
  return v;
}

std::string ScriptedTextBackend::generate(std::string_view prompt, const GenerationOptions&) {
  std::lock_guard lock(mu_);
  prompts_.emplace_back(prompt);
  if (responses_.empty()) throw TransportError("scripted backend has no responses");
  const std::size_t i = std::min(prompts_.size() - 1, responses_.size() - 1);
  return responses_[i];
}

int ScriptedTextBackend::calls() const {
  std::lock_guard lock(mu_);
  return static_cast<int>(prompts_.size());
}

std::vector<std::string> ScriptedTextBackend::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

}  // namespace synthhome
