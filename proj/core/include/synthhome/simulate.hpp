#pragma once

// Engine input rendering, the external whole-building engine adapter, and a
// closed-form degree-day surrogate used for offline runs.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthhome/domain.hpp"

namespace synthhome {

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 7> kIdfPlaceholders{
    "FLOOR_AREA",       "WALL_R_VALUE",    "ROOF_R_VALUE", "HVAC_HEATING_COP",
    "HVAC_COOLING_COP", "AIR_CHANGE_RATE", "VERTICES"};

// Imperial R (ft^2.F.hr/Btu) to RSI (m^2.K/W).
inline constexpr double kRsiPerImperialR = 0.1761;

// Engine input text with ${NAME} placeholders. A numeric placeholder may be
// written ${NAME|si} to receive an R-value converted to SI; the plain form
// receives the value exactly as the feature carries it. Each placeholder
// name must occur exactly once.
struct IdfTemplate {
  std::string text;
  PerformanceParams defaults = default_performance_params();
  double window_u = kDefaultWindowU;
  std::string system_type{kDefaultSystemType};

  // Single-zone residential model with a gas furnace and DX cooling.
  static IdfTemplate builtin();
  static IdfTemplate from_file(const std::filesystem::path& path);
};

// Placeholder names in order of appearance. Throws TemplateError for a
// malformed "${" sequence.
std::vector<std::string> template_placeholders(std::string_view text);

// Throws TemplateError on unknown, missing or repeated placeholders, or
// defaults outside the parameter bounds.
void check_template(const IdfTemplate& tmpl);

// What the renderer substitutes. Absent parameters fall back to the
// template defaults.
struct IdfValues {
  std::optional<double> floor_area_ft2;
  std::optional<double> hvac_heating_cop;
  std::optional<double> hvac_cooling_cop;
  std::optional<double> wall_r_value;
  std::optional<double> roof_r_value;
  std::optional<double> air_change_rate;
  std::vector<LonLat> footprint;
  int stories = 1;
  double story_height_m = 3.0;
};

IdfValues idf_values(const BuildingFeature& feature, double story_height_m = 3.0);

std::string render_idf(const IdfValues& values, const IdfTemplate& tmpl);
std::string render_idf(const BuildingFeature& feature, const IdfTemplate& tmpl);

// Story count implied by floor area over footprint area, at least 1.
int estimate_stories(const BuildingFeature& feature);

// ---------------------------------------------------------------------------
// External engine
// ---------------------------------------------------------------------------

struct ExternalEngineOptions {
  std::filesystem::path engine_home;  // holds ExpandObjects, energyplus, Energy+.idd
  std::filesystem::path weather;      // .epw
  std::filesystem::path scratch_root = std::filesystem::temp_directory_path();
  bool keep_scratch = false;
};

// Runs the template expander then the engine in a private scratch directory
// and parses the tabular summary (eplustbl.csv). Throws InputError for
// unrendered placeholders or a missing weather file, EngineError for a
// missing binary or failed run (with the stderr tail), ParseError for missing
// output tables.
SimulationResult run_external(std::string_view idf, const ExternalEngineOptions& options);

// Parses the engine's comma-style tabular report. hvac_energy_kwh is the sum
// of the Heating and Cooling end uses over every fuel; envelope_load_kwh is
// the facility-total magnitude of opaque-surface, window and infiltration
// heat addition and removal.
SimulationResult parse_engine_table(std::string_view csv);

// ---------------------------------------------------------------------------
// Surrogate
// ---------------------------------------------------------------------------

struct Climate {
  double hdd = 3100.0;  // degC.day
  double cdd = 450.0;   // degC.day
  double story_height_m = 3.0;
};

// Air heat capacity per unit flow, W/K per (m^3 . ACH).
inline constexpr double kInfiltrationFactor = 0.335;

// Steady-state degree-day model:
//   UA = U_wall.A_wall + U_roof.A_roof + 0.335.ACH.V
//   envelope = UA.(HDD + CDD).24/1000
//   hvac     = UA.HDD.24/1000 / heating COP + UA.CDD.24/1000 / cooling COP
// Throws InputError for a degenerate footprint or negative degree-days.
SimulationResult run_surrogate(const BuildingFeature& feature, const Climate& climate,
                               std::optional<int> stories = std::nullopt);

}  // namespace synthhome
