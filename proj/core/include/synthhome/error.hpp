#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace synthhome {

// Base for every error raised by the pipeline. Each stage throws the most
// specific subtype so callers (and the CLI exit-code mapping) can tell
// precondition failures apart from backend or engine failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Transport-level failure talking to a model backend. Retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Retries exhausted; carries the last transport cause in what().
class BackendError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, std::vector<std::string> violations, int attempts)
      : Error(what), violations_(std::move(violations)), attempts_(attempts) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }
  int attempts() const noexcept { return attempts_; }

 private:
  std::vector<std::string> violations_;
  int attempts_;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class EngineError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class LabelingError : public Error {
 public:
  using Error::Error;
};

class StatsError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace synthhome
