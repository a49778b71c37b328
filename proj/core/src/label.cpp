#include "synthhome/label.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "synthhome/concurrency.hpp"
#include "synthhome/error.hpp"
#include "synthhome/util.hpp"

namespace synthhome {

double heuristic_score(double alpha, double beta, double gamma, std::vector<std::string>* warnings) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma))
    throw InputError("heuristic score: non-finite energy value");
  if (gamma < beta) throw InputError("heuristic score: gamma below beta");
  if (alpha < beta || alpha > gamma)
    throw InputError("heuristic score: alpha " + format_number(alpha) + " outside [" + format_number(beta) +
                     ", " + format_number(gamma) + "]");
  if (gamma == beta) {
    if (warnings) warnings->push_back("degenerate extremes (gamma == beta == " + format_number(beta) + "); eta set to 0");
    return 0.0;
  }
  return (alpha - beta) / (gamma - beta);
}

Extremes dataset_extremes(std::span<const SimulationResult> results, Category category) {
  if (results.empty()) throw InputError("dataset extremes: no simulation results");
  Extremes e{category_alpha(results.front(), category), category_alpha(results.front(), category)};
  for (const auto& r : results) {
    const double a = category_alpha(r, category);
    e.beta = std::min(e.beta, a);
    e.gamma = std::max(e.gamma, a);
  }
  return e;
}

double combine(double eta, double lambda) { return (0.80 * eta + 0.20 * lambda) / 2.0; }

double combine(double eta, double lambda, const LabelerWeights& weights) {
  return (weights.heuristic * eta + weights.text * lambda) / 2.0;
}

double reported_mu(double eta, double lambda, const LabelerConfig& config) {
  const double mu = combine(eta, lambda, config.weights);
  return config.normalized_mu ? 2.0 * mu : mu;
}

namespace {

std::string_view category_phrase(Category c) {
  return c == Category::hvac ? "HVAC system" : "insulation";
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

}  // namespace

std::string build_score_prompt(std::string_view note, Category category, const LabelerConfig& config) {
  if (config.score_prompt.find("{NOTE}") == std::string::npos)
    throw ConfigError("score prompt has no {NOTE} slot");
  std::string out = config.score_prompt;
  // NOTE last, so braces inside the note are never touched.
  replace_all(out, "{CATEGORY_KEY}", to_string(category));
  replace_all(out, "{CATEGORY}", category_phrase(category));
  const auto pos = out.find("{NOTE}");
  out.replace(pos, 6, note);
  return out;
}

std::optional<double> parse_score(std::string_view reply) {
  static const std::regex number(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(reply.begin(), reply.end(), m, number)) return std::nullopt;
  try {
    const double v = std::stod(m.str());
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

double text_score(TextBackend& backend, std::string_view note, Category category, const LabelerConfig& config) {
  if (trim(note).empty()) throw LabelingError("empty inspection note");
  const std::string prompt = build_score_prompt(note, category, config);
  std::string last;
  for (int attempt = 0; attempt < 2; ++attempt) {
    last = with_retries(backend.retry_policy(), "text score",
                        [&] { return backend.generate(prompt, config.options); });
    if (auto v = parse_score(last)) return std::clamp(*v, 0.0, 1.0);
  }
  throw LabelingError("unparseable " + std::string(to_string(category)) + " score reply: \"" +
                      last.substr(0, 80) + "\"");
}

// ---------------------------------------------------------------------------

std::string LabelRun::jsonl() const {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string LabelRun::errors_jsonl() const {
  std::string out;
  for (const auto& l : errors) out += l + "\n";
  return out;
}

namespace {

struct HomeScores {
  std::array<double, 2> lambda{};
};

}  // namespace

LabelRun label_dataset(std::span<const HomeToLabel> homes, TextBackend& backend, const LabelerConfig& config,
                       std::size_t workers) {
  LabelRun run;
  if (homes.empty()) return run;

  std::vector<SimulationResult> sims;
  sims.reserve(homes.size());
  for (const auto& h : homes) sims.push_back(h.simulation);
  for (Category c : kCategories) {
    const Extremes e = dataset_extremes(sims, c);
    run.extremes[c] = e;
    if (e.gamma == e.beta)
      run.warnings.push_back("degenerate " + std::string(to_string(c)) + " extremes (gamma == beta == " +
                             format_number(e.beta) + "); eta set to 0");
  }

  const std::vector<HomeToLabel> items(homes.begin(), homes.end());
  std::atomic<int> calls{0};
  auto scored = parallel_map(
      items,
      [&](const HomeToLabel& h) {
        HomeScores s;
        for (std::size_t i = 0; i < kCategories.size(); ++i) {
          ++calls;
          s.lambda[i] = text_score(backend, h.inspection_note, kCategories[i], config);
        }
        return s;
      },
      workers);
  run.text_score_calls = calls.load();

  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& h = items[k];
    try {
      if (!scored[k].ok()) std::rethrow_exception(scored[k].error);
      nlohmann::ordered_json labels = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < kCategories.size(); ++i) {
        const Category c = kCategories[i];
        const Extremes& e = run.extremes[c];
        const double lambda = scored[k].value->lambda[i];
        const double eta = heuristic_score(category_alpha(h.simulation, c), e.beta, e.gamma);
        labels[std::string(to_string(c))] = {
            {"lambda", lambda}, {"eta", eta}, {"mu", reported_mu(eta, lambda, config)}};
      }
      nlohmann::ordered_json line;
      line["id"] = h.id;
      line["inspection_note"] = h.inspection_note;
      line["simulation"] = {{"hvac_energy_kwh", h.simulation.hvac_energy_kwh},
                            {"envelope_load_kwh", h.simulation.envelope_load_kwh},
                            {"engine", std::string(to_string(h.simulation.engine))}};
      line["labels"] = std::move(labels);
      run.lines.push_back(line.dump());
    } catch (const std::exception& ex) {
      nlohmann::ordered_json err;
      err["id"] = h.id;
      err["error"] = ex.what();
      run.errors.push_back(err.dump());
    }
  }
  return run;
}

void write_label_outputs(const LabelRun& run, const std::filesystem::path& jsonl_path) {
  write_text(jsonl_path, run.jsonl());
  const auto dir = jsonl_path.parent_path();
  const auto stem = jsonl_path.stem().string();
  write_text(dir / (stem + ".errors.jsonl"), run.errors_jsonl());
  nlohmann::ordered_json meta;
  nlohmann::ordered_json ex = nlohmann::ordered_json::object();
  for (const auto& [c, e] : run.extremes) ex[std::string(to_string(c))] = {{"beta", e.beta}, {"gamma", e.gamma}};
  meta["extremes"] = std::move(ex);
  meta["labeled"] = run.lines.size();
  meta["failed"] = run.errors.size();
  meta["warnings"] = run.warnings;
  write_text(dir / (stem + ".meta.json"), meta.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

namespace {

struct Cue {
  std::string_view phrase;
  double weight;
};

// Positive weight: evidence the component needs work.
constexpr Cue kHvacCues[] = {
    {"rust", 0.25},          {"older", 0.2},           {"old ", 0.15},         {"window ac", 0.25},
    {"window unit", 0.25},    {"standard-efficiency", 0.1}, {"inefficien", 0.15}, {"not working", 0.3},
    {"leak", 0.15},          {"aging", 0.2},           {"original", 0.1},
    {"recently replaced", -0.2}, {"recently installed", -0.2}, {"high-efficiency", -0.1},
    {"state-of-the-art", -0.3}, {"smart thermostat", -0.1}, {"variable-speed", -0.1},
    {"efficiently", -0.05},    {"new ", -0.1},           {"recently updated", -0.2},
};

constexpr Cue kInsulationCues[] = {
    {"minimal", 0.25},       {"exposed", 0.15},        {"heat loss", 0.2},     {"no signs of added", 0.25},
    {"no insulation", 0.3},  {"inefficien", 0.15},     {"draft", 0.15},        {"single-pane", 0.15},
    {"poor", 0.2},           {"no upgrades", 0.05},
    {"adequately insulated", -0.1}, {"blown-in", -0.2},   {"good thermal", -0.15}, {"spray foam", -0.3},
    {"high-performance", -0.2}, {"maximum energy efficiency", -0.15}, {"well insulated", -0.2},
};

}  // namespace

double KeywordScoreBackend::score(std::string_view note, std::optional<Category> category) {
  const std::string text = to_lower(note);
  double s = 0.5;
  auto apply = [&](std::span<const Cue> cues) {
    for (const auto& cue : cues)
      if (text.find(cue.phrase) != std::string::npos) s += cue.weight;
  };
  if (!category || *category == Category::hvac) apply(kHvacCues);
  if (!category || *category == Category::insulation) apply(kInsulationCues);
  s = std::clamp(s, 0.05, 0.95);
  return std::round(s * 100.0) / 100.0;
}

std::string KeywordScoreBackend::generate(std::string_view prompt, const GenerationOptions&) {
  std::optional<Category> category;
  std::string_view note = prompt;
  if (auto pos = prompt.find("Category: "); pos != std::string_view::npos) {
    auto rest = prompt.substr(pos + 10);
    auto key = rest.substr(0, rest.find('\n'));
    try {
      category = category_from_string(trim(key));
    } catch (const std::exception&) {
    }
  }
  if (auto pos = prompt.find("Inspection note: "); pos != std::string_view::npos) note = prompt.substr(pos + 17);
  return format_fixed(score(note, category), 2);
}

}  // namespace synthhome
