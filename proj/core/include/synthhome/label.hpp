#pragma once

// Retrofit-need labels. Each home gets, per category, a text score lambda
// read from its inspection note, a heuristic score eta placing its simulated
// energy between the dataset's best and worst homes, and their fusion mu.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synthhome/backend.hpp"
#include "synthhome/domain.hpp"

namespace synthhome {

// eta = (alpha - beta) / (gamma - beta), where beta/gamma are the lowest and
// highest energy in the dataset. gamma == beta yields 0 and a warning.
// Throws InputError if alpha lies outside [beta, gamma].
double heuristic_score(double alpha, double beta, double gamma, std::vector<std::string>* warnings = nullptr);

struct Extremes {
  double beta = 0.0;   // most efficient home
  double gamma = 0.0;  // least efficient home
  bool operator==(const Extremes&) const = default;
};

// Throws InputError on an empty dataset.
Extremes dataset_extremes(std::span<const SimulationResult> results, Category category);

struct LabelerWeights {
  double heuristic = 0.80;
  double text = 0.20;
};

// mu = (0.80 eta + 0.20 lambda) / 2, evaluated literally, so mu <= 0.5.
double combine(double eta, double lambda);
// mu = (w.heuristic eta + w.text lambda) / 2.
double combine(double eta, double lambda, const LabelerWeights& weights);

inline constexpr std::string_view kDefaultScorePrompt =
    "You are a certified home energy auditor. Rate the need of replacing or improving the home's "
    "{CATEGORY} based only on the inspection note below. Answer with a single decimal number "
    "between 0 and 1, where 1 means an urgent need and 0 means no need. Do not explain.\n\n"
    "Category: {CATEGORY_KEY}\n"
    "Inspection note: {NOTE}\n";

struct LabelerConfig {
  LabelerWeights weights;
  // Report 2*mu so consumers get [0, 1].
  bool normalized_mu = false;
  // {CATEGORY}, {CATEGORY_KEY} and {NOTE} are substituted.
  std::string score_prompt{kDefaultScorePrompt};
  GenerationOptions options{.temperature = 0.0, .max_tokens = 16};
};

std::string build_score_prompt(std::string_view note, Category category, const LabelerConfig& config = {});

// First decimal number in `reply`, if any.
std::optional<double> parse_score(std::string_view reply);

// Asks the backend for lambda. Replies outside [0, 1] are clamped; an
// unparseable reply is retried once, then LabelingError.
double text_score(TextBackend& backend, std::string_view note, Category category,
                  const LabelerConfig& config = {});

// Final rating for one category as the labeler reports it.
double reported_mu(double eta, double lambda, const LabelerConfig& config);

// ---------------------------------------------------------------------------

struct HomeToLabel {
  std::string id;
  std::string inspection_note;
  SimulationResult simulation;
};

struct LabelRun {
  // One JSON document per labeled home, in input order.
  std::vector<std::string> lines;
  // One JSON document per home that could not be labeled.
  std::vector<std::string> errors;
  std::map<Category, Extremes> extremes;
  std::vector<std::string> warnings;
  int text_score_calls = 0;

  std::string jsonl() const;
  std::string errors_jsonl() const;
};

// Labels every home against the extremes of the whole list. A failure for
// one home moves it to the errors list without stopping the run.
LabelRun label_dataset(std::span<const HomeToLabel> homes, TextBackend& backend,
                       const LabelerConfig& config = {}, std::size_t workers = 4);

// Writes <path>, <stem>.errors.jsonl and <stem>.meta.json (extremes and
// warnings) next to it.
void write_label_outputs(const LabelRun& run, const std::filesystem::path& jsonl_path);

// ---------------------------------------------------------------------------

// Offline scorer: counts efficiency cues in the note for the requested
// category. Urgent cues raise the score, upgrade cues lower it; the reply is
// a two-decimal number in [0.05, 0.95].
class KeywordScoreBackend final : public TextBackend {
 public:
  std::string id() const override { return "keyword-scorer"; }
  std::string generate(std::string_view prompt, const GenerationOptions& options) override;
  RetryPolicy retry_policy() const override { return {1, std::chrono::milliseconds(0), 1.0}; }

  static double score(std::string_view note, std::optional<Category> category);
};

}  // namespace synthhome
