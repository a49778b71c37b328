#include "synthhome/ablation.hpp"

#include <cmath>
#include <numeric>

#include "synthhome/error.hpp"
#include "synthhome/geometry.hpp"
#include "synthhome/util.hpp"

namespace synthhome {

std::string_view to_string(AblationVariable v) {
  switch (v) {
    case AblationVariable::wallr: return "WALLR";
    case AblationVariable::roofr: return "ROOFR";
    case AblationVariable::hvach: return "HVACH";
    case AblationVariable::hvacc: return "HVACC";
  }
  return "?";
}

AblationVariable ablation_variable_from_string(std::string_view s) {
  const std::string up = [&] {
    std::string out(trim(s));
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }();
  for (auto v : kAblationVariables)
    if (to_string(v) == up) return v;
  throw InputError("unknown ablation variable \"" + std::string(s) + "\" (expected WALLR, ROOFR, HVACH or HVACC)");
}

std::array<double, 5> ablation_values(AblationVariable v) {
  switch (v) {
    case AblationVariable::wallr: return {4, 7, 13, 20, 30};
    case AblationVariable::roofr: return {10, 20, 30, 40, 50};
    case AblationVariable::hvach: return {0.7, 0.8, 0.9, 0.95, 1.0};
    case AblationVariable::hvacc: return {1, 2, 3, 3.5, 4};
  }
  throw InputError("unknown ablation variable");
}

double PerformanceParams::*ablation_member(AblationVariable v) {
  switch (v) {
    case AblationVariable::wallr: return &PerformanceParams::wall_r_value;
    case AblationVariable::roofr: return &PerformanceParams::roof_r_value;
    case AblationVariable::hvach: return &PerformanceParams::hvac_heating_cop;
    case AblationVariable::hvacc: return &PerformanceParams::hvac_cooling_cop;
  }
  throw InputError("unknown ablation variable");
}

Category ablation_category(AblationVariable v) {
  return v == AblationVariable::wallr || v == AblationVariable::roofr ? Category::insulation : Category::hvac;
}

std::vector<NamedNote> default_ablation_notes() {
  std::vector<NamedNote> out(kHvacNotes.begin(), kHvacNotes.end());
  out.insert(out.end(), kInsulationNotes.begin(), kInsulationNotes.end());
  return out;
}

BuildingFeature reference_building(const PerformanceParams& params, std::string_view note) {
  constexpr double kFloorAreaFt2 = 2000.0;
  constexpr double kAspect = 1.25;
  const double footprint_m2 = kFloorAreaFt2 / 2.0 / geometry::kSquareFeetPerSquareMeter;
  const double depth = std::sqrt(footprint_m2 / kAspect);
  BuildingFeature f;
  f.name = "Reference Home";
  f.floor_area_ft2 = kFloorAreaFt2;
  f.building_type = "Single family";
  f.inspection_note = std::string(note);
  f.params = params;
  f.footprint = geometry::rectangle_footprint({-75.3, 40.7}, kAspect * depth, depth);
  return f;
}

MuStats summarize(const std::vector<double>& values) {
  MuStats s;
  s.trials_ok = static_cast<int>(values.size());
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  s.mean = mean;
  s.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return s;
}

namespace {

void require_trials(const AblationConfig& config) {
  if (config.trials < 1) throw InputError("trials must be at least 1");
}

// Fills row.mu by running `trials` labeling rounds of row.note against
// row.simulation with the given extremes.
void label_row(AblationRow& row, TextBackend& backend, const std::map<Category, Extremes>& extremes,
               const AblationConfig& config) {
  std::map<Category, std::vector<double>> samples;
  if (!row.simulation) {
    for (Category c : kCategories) row.mu[c] = {};
    return;
  }
  for (int t = 0; t < config.trials; ++t) {
    for (Category c : kCategories) {
      try {
        const Extremes& e = extremes.at(c);
        const double eta = heuristic_score(category_alpha(*row.simulation, c), e.beta, e.gamma);
        const double lambda = text_score(backend, row.note, c, config.labeler);
        samples[c].push_back(reported_mu(eta, lambda, config.labeler));
      } catch (const std::exception& ex) {
        row.failures.push_back("trial " + std::to_string(t + 1) + " " + std::string(to_string(c)) + ": " + ex.what());
      }
    }
  }
  for (Category c : kCategories) row.mu[c] = summarize(samples[c]);
}

std::map<Category, Extremes> extremes_of(const std::vector<AblationRow>& rows, std::vector<std::string>& warnings) {
  std::vector<SimulationResult> sims;
  for (const auto& r : rows)
    if (r.simulation) sims.push_back(*r.simulation);
  std::map<Category, Extremes> out;
  if (sims.empty()) return out;
  for (Category c : kCategories) {
    out[c] = dataset_extremes(sims, c);
    if (out[c].beta == out[c].gamma)
      warnings.push_back("degenerate " + std::string(to_string(c)) + " extremes; eta is 0 for every row");
  }
  return out;
}

void simulate_row(AblationRow& row, const AblationConfig& config) {
  try {
    row.simulation = run_surrogate(reference_building(row.params, row.note), config.climate);
  } catch (const std::exception& ex) {
    row.failures.push_back(std::string("simulate: ") + ex.what());
  }
}

}  // namespace

AblationTable ablation_text(TextBackend& backend, const std::vector<NamedNote>& notes,
                            const SimulationResult& fixed_sim, const AblationConfig& config) {
  require_trials(config);
  if (notes.empty()) throw InputError("ablation_text: no notes");
  AblationTable table;
  table.mode = "text";
  std::map<Category, Extremes> extremes;
  if (config.reference_extremes) {
    extremes = *config.reference_extremes;
  } else {
    for (Category c : kCategories) {
      const double a = category_alpha(fixed_sim, c);
      extremes[c] = {a, a};
    }
    table.warnings.push_back("no reference extremes; eta is 0 for every row");
  }
  for (const auto& n : notes) {
    AblationRow row;
    row.label = std::string(n.label);
    row.note = std::string(n.text);
    row.params = default_performance_params();
    row.simulation = fixed_sim;
    label_row(row, backend, extremes, config);
    table.rows.push_back(std::move(row));
  }
  return table;
}

AblationTable ablation_sim(TextBackend& backend, std::string_view fixed_note, AblationVariable variable,
                           const AblationConfig& config) {
  require_trials(config);
  AblationTable table;
  table.mode = "sim";
  table.variable = std::string(to_string(variable));
  const auto values = ablation_values(variable);
  const auto member = ablation_member(variable);
  for (std::size_t i = 0; i < values.size(); ++i) {
    AblationRow row;
    row.label = table.variable + std::to_string(i + 1);
    row.note = std::string(fixed_note);
    row.params = default_performance_params();
    row.params.*member = values[i];
    simulate_row(row, config);
    table.rows.push_back(std::move(row));
  }
  const auto extremes = extremes_of(table.rows, table.warnings);
  for (auto& row : table.rows) label_row(row, backend, extremes, config);
  return table;
}

AblationTable combined_variation(TextBackend& backend, const std::array<VariationLevel, 2>& notes,
                                 const std::array<VariationLevel, 2>& sims, const AblationConfig& config) {
  require_trials(config);
  AblationTable table;
  table.mode = "combined";
  std::array<std::optional<SimulationResult>, 2> results;
  std::array<std::string, 2> sim_failures;
  for (std::size_t s = 0; s < 2; ++s) {
    try {
      results[s] = run_surrogate(reference_building(sims[s].params), config.climate);
    } catch (const std::exception& ex) {
      sim_failures[s] = std::string("simulate: ") + ex.what();
    }
  }
  for (const auto& n : notes) {
    for (std::size_t s = 0; s < 2; ++s) {
      AblationRow row;
      row.label = n.label + " + " + sims[s].label;
      row.note = n.note;
      row.params = sims[s].params;
      row.simulation = results[s];
      if (!results[s]) row.failures.push_back(sim_failures[s]);
      table.rows.push_back(std::move(row));
    }
  }
  const auto extremes = extremes_of(table.rows, table.warnings);
  for (auto& row : table.rows) label_row(row, backend, extremes, config);
  return table;
}

AblationTable combined_variation(TextBackend& backend, AblationVariable variable, const AblationConfig& config) {
  const auto& notes = ablation_category(variable) == Category::hvac ? kHvacNotes : kInsulationNotes;
  const auto values = ablation_values(variable);
  const auto member = ablation_member(variable);
  PerformanceParams best = default_performance_params();
  PerformanceParams worst = best;
  best.*member = values.back();
  worst.*member = values.front();
  const std::string var(to_string(variable));
  AblationTable table = combined_variation(
      backend,
      {VariationLevel{std::string(notes[4].label), std::string(notes[4].text), {}},
       VariationLevel{std::string(notes[0].label), std::string(notes[0].text), {}}},
      {VariationLevel{var + "5", "", best}, VariationLevel{var + "1", "", worst}}, config);
  table.variable = var;
  return table;
}

std::string AblationTable::csv() const {
  std::vector<std::string> header{"label", "note"};
  for (const auto& spec : kParamSpecs) header.emplace_back(spec.key);
  header.insert(header.end(), {"hvac_energy_kwh", "envelope_load_kwh"});
  for (Category c : kCategories) {
    const std::string k(to_string(c));
    header.insert(header.end(), {k + "_mu_mean", k + "_mu_sd", k + "_trials"});
  }
  header.emplace_back("failures");
  std::string out = csv_row(header);
  auto opt = [](const std::optional<double>& v) { return v ? format_fixed(*v, 6) : std::string(); };
  for (const auto& r : rows) {
    std::vector<std::string> f{r.label, r.note};
    for (const auto& spec : kParamSpecs) f.push_back(format_fixed(r.params.*spec.member, 6));
    f.push_back(r.simulation ? format_fixed(r.simulation->hvac_energy_kwh, 6) : "");
    f.push_back(r.simulation ? format_fixed(r.simulation->envelope_load_kwh, 6) : "");
    for (Category c : kCategories) {
      const auto it = r.mu.find(c);
      const MuStats s = it == r.mu.end() ? MuStats{} : it->second;
      f.insert(f.end(), {opt(s.mean), opt(s.sd), std::to_string(s.trials_ok)});
    }
    std::string failures;
    for (const auto& x : r.failures) failures += (failures.empty() ? "" : "; ") + x;
    f.push_back(failures);
    out += csv_row(f);
  }
  return out;
}

}  // namespace synthhome
