#pragma once

// Ablation and combined-variation experiments: vary one input modality (the
// inspection note or one simulated envelope/equipment value) while holding
// the other fixed, and tabulate trial mean and SD of mu.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthhome/backend.hpp"
#include "synthhome/domain.hpp"
#include "synthhome/label.hpp"
#include "synthhome/simulate.hpp"

namespace synthhome {

enum class AblationVariable { wallr, roofr, hvach, hvacc };
inline constexpr std::array<AblationVariable, 4> kAblationVariables{
    AblationVariable::wallr, AblationVariable::roofr, AblationVariable::hvach, AblationVariable::hvacc};

std::string_view to_string(AblationVariable v);  // "WALLR", ...
AblationVariable ablation_variable_from_string(std::string_view s);

// Values for indices 1..5, least to most efficient.
std::array<double, 5> ablation_values(AblationVariable v);
double PerformanceParams::*ablation_member(AblationVariable v);
// The category whose label the variable should move.
Category ablation_category(AblationVariable v);

struct NamedNote {
  std::string_view label;
  std::string_view text;
};

// Graded from least (1) to most (5) efficient.
inline constexpr std::array<NamedNote, 5> kHvacNotes{{
    {"HVAC1", "There is an older HVAC unit installed, with signs of rust on the exterior."},
    {"HVAC2", "The HVAC system appears to be in working condition but is an older standard-efficiency model."},
    {"HVAC3", "The home uses window AC units rather than a central HVAC system."},
    {"HVAC4", "The HVAC system was recently replaced with a standard high-efficiency model and is expected to "
              "operate efficiently."},
    {"HVAC5", "A state-of-the-art HVAC system with smart thermostats and variable-speed compressors was recently "
              "installed, maximizing energy efficiency."},
}};

inline constexpr std::array<NamedNote, 5> kInsulationNotes{{
    {"INS1", "Attic insulation is minimal, with exposed joists visible throughout, causing significant heat loss."},
    {"INS2", "No signs of added insulation were observed in the basement ceiling, suggesting potential energy "
             "inefficiency."},
    {"INS3", "Walls appear to be adequately insulated based on construction year, though no upgrades were observed."},
    {"INS4", "Blown-in insulation is present in the attic to a depth of approximately 10 inches, providing good "
             "thermal resistance."},
    {"INS5", "High-performance spray foam insulation was installed throughout the walls, attic, and basement, "
             "providing maximum energy efficiency."},
}};

// Held fixed while the simulated values vary.
inline constexpr std::string_view kNeutralNote =
    "The home has two stories with vinyl siding and a shingled roof. Windows appear to be single-hung with no "
    "visible damage. The HVAC system is located on the first floor near the utility room. Insulation levels in "
    "the attic are unknown. Doors are wood-core with standard weather stripping.";

// HVAC1..5 followed by INS1..5.
std::vector<NamedNote> default_ablation_notes();

// Two-story, 2000 ft^2 single-family reference home with the given values.
BuildingFeature reference_building(const PerformanceParams& params, std::string_view note = kNeutralNote);

struct AblationConfig {
  LabelerConfig labeler;
  int trials = 5;
  Climate climate;
  // Extremes for eta when the experiment has no dataset of its own (text
  // ablation). Without them eta is 0.
  std::optional<std::map<Category, Extremes>> reference_extremes;
};

struct MuStats {
  std::optional<double> mean;
  std::optional<double> sd;  // sample SD; 0 for a single trial
  int trials_ok = 0;
};

struct AblationRow {
  std::string label;
  std::string note;
  PerformanceParams params;
  std::optional<SimulationResult> simulation;
  std::map<Category, MuStats> mu;
  // One entry per failed trial or stage, "<where>: <reason>".
  std::vector<std::string> failures;
};

struct AblationTable {
  std::string mode;      // text | sim | combined
  std::string variable;  // empty for text
  std::vector<AblationRow> rows;
  std::vector<std::string> warnings;

  // RFC 4180, header row, 6-decimal values; absent values are empty fields.
  std::string csv() const;
};

// Mean and sample SD of `values`; trials == 1 reports SD 0.
MuStats summarize(const std::vector<double>& values);

// Labels each note `trials` times against one simulation.
AblationTable ablation_text(TextBackend& backend, const std::vector<NamedNote>& notes,
                            const SimulationResult& fixed_sim, const AblationConfig& config = {});

// Sweeps one variable over its five values, others at the engine defaults,
// simulating with the surrogate. eta uses the extremes of the five runs.
AblationTable ablation_sim(TextBackend& backend, std::string_view fixed_note, AblationVariable variable,
                           const AblationConfig& config = {});

struct VariationLevel {
  std::string label;
  std::string note;
  PerformanceParams params;
};

// Every pairing of two notes with two parameter sets, rows ordered
// (note 0, sim 0), (note 0, sim 1), (note 1, sim 0), (note 1, sim 1).
AblationTable combined_variation(TextBackend& backend, const std::array<VariationLevel, 2>& notes,
                                 const std::array<VariationLevel, 2>& sims, const AblationConfig& config = {});

// Efficient/inefficient notes of the variable's category (levels 5 and 1)
// crossed with the variable at its best and worst value.
AblationTable combined_variation(TextBackend& backend, AblationVariable variable, const AblationConfig& config = {});

}  // namespace synthhome
