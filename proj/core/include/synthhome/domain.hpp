#pragma once

// Data model shared by every pipeline stage.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace synthhome {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// County property records
// ---------------------------------------------------------------------------

// Floor-plan segment name -> area (ft^2).
using SketchData = std::map<std::string, double>;

// A present county attribute. Absent attributes are simply missing from the
// record's map; they are never stored as zero or as an empty string.
using AttributeValue = std::variant<double, std::string, SketchData>;

enum class AttributeKind { year, number, text, sketch };

struct AttributeSpec {
  std::string_view key;
  AttributeKind kind;
};

// Every attribute the county portal may publish, in portal order.
std::span<const AttributeSpec> county_attributes();
const AttributeSpec* find_county_attribute(std::string_view key);

struct HomeRecord {
  std::string id;
  std::string street_address;
  std::map<std::string, AttributeValue> attributes;
  std::optional<std::filesystem::path> photo_path;
  std::optional<std::filesystem::path> floorplan_path;

  std::optional<double> number(std::string_view key) const;
  std::optional<std::string> text(std::string_view key) const;
  bool has_any_image() const { return photo_path.has_value() || floorplan_path.has_value(); }

  bool operator==(const HomeRecord&) const = default;
};

// Renders a present attribute the way it appears in prompts: integers without
// a decimal point, sketch data as "segment=area; ..." pairs.
std::string attribute_to_string(const AttributeValue& value);

// ---------------------------------------------------------------------------
// Image descriptions
// ---------------------------------------------------------------------------

struct ImageDescription {
  std::string facade_text;
  std::string floorplan_text;
  std::string backend_id;

  bool operator==(const ImageDescription&) const = default;
};

// ---------------------------------------------------------------------------
// Performance parameters
// ---------------------------------------------------------------------------

struct PerformanceParams {
  double hvac_heating_cop = 0.0;
  double hvac_cooling_cop = 0.0;
  double wall_r_value = 0.0;  // ft^2.F.hr/Btu
  double roof_r_value = 0.0;  // ft^2.F.hr/Btu
  double air_change_rate = 0.0;  // 1/h

  bool operator==(const PerformanceParams&) const = default;
};

struct ParamSpec {
  std::string_view key;
  double PerformanceParams::*member;
  double lower;
  double upper;
  std::string_view placeholder;
};

// Closed intervals bracketing the values the ablation grid and the engine
// defaults use, with headroom.
inline constexpr std::array<ParamSpec, 5> kParamSpecs{{
    {"hvac_heating_cop", &PerformanceParams::hvac_heating_cop, 0.5, 1.2, "HVAC_HEATING_COP"},
    {"hvac_cooling_cop", &PerformanceParams::hvac_cooling_cop, 1.0, 6.0, "HVAC_COOLING_COP"},
    {"wall_r_value", &PerformanceParams::wall_r_value, 1.0, 60.0, "WALL_R_VALUE"},
    {"roof_r_value", &PerformanceParams::roof_r_value, 1.0, 80.0, "ROOF_R_VALUE"},
    {"air_change_rate", &PerformanceParams::air_change_rate, 0.05, 5.0, "AIR_CHANGE_RATE"},
}};

// Engine template defaults: ACH 2.0, heating COP 0.8, cooling COP 3.0,
// wall R 13, roof R 30.
PerformanceParams default_performance_params();
inline constexpr double kDefaultWindowU = 2.0;
inline constexpr std::string_view kDefaultSystemType = "Gas Furnace";

// Messages naming each missing, non-finite or out-of-range parameter.
std::vector<std::string> check_params(const PerformanceParams& params);
// Throws InputError listing check_params() findings.
void require_valid(const PerformanceParams& params);
// Clamps each value into its interval; appends one warning per clamped value.
PerformanceParams clamp_params(PerformanceParams params, std::vector<std::string>* warnings);

// ---------------------------------------------------------------------------
// Buildings
// ---------------------------------------------------------------------------

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
  bool operator==(const LonLat&) const = default;
};

struct BuildingFeature {
  std::string name;
  double floor_area_ft2 = 0.0;
  std::string building_type;
  std::string inspection_note;
  PerformanceParams params;
  // Open ring: the closing vertex is added only when serialized.
  std::vector<LonLat> footprint;

  bool operator==(const BuildingFeature&) const = default;
};

// ---------------------------------------------------------------------------
// Simulation and labels
// ---------------------------------------------------------------------------

enum class EngineKind { external, surrogate };
std::string_view to_string(EngineKind kind);
EngineKind engine_kind_from_string(std::string_view s);

struct SimulationResult {
  double hvac_energy_kwh = 0.0;
  double envelope_load_kwh = 0.0;
  EngineKind engine = EngineKind::surrogate;
  std::map<std::string, double> raw_outputs;

  bool operator==(const SimulationResult&) const = default;
};

enum class Category { hvac, insulation };
inline constexpr std::array<Category, 2> kCategories{Category::hvac, Category::insulation};
std::string_view to_string(Category c);
Category category_from_string(std::string_view s);

// The energy figure a category is scored on.
double category_alpha(const SimulationResult& result, Category category);

struct EfficiencyLabel {
  Category category = Category::hvac;
  double lambda = 0.0;
  double eta = 0.0;
  double mu = 0.0;

  bool operator==(const EfficiencyLabel&) const = default;
};

// ---------------------------------------------------------------------------
// Occlusion
// ---------------------------------------------------------------------------

struct OcclusionReport {
  std::string image_id;
  std::string baseline_text;
  int grid_rows = 0;
  int grid_cols = 0;
  std::vector<double> distances;  // row-major
  std::optional<std::vector<bool>> region_mask;
  std::optional<double> rmd;
  std::optional<double> nrmd;

  double at(int row, int col) const { return distances.at(static_cast<std::size_t>(row * grid_cols + col)); }

  bool operator==(const OcclusionReport&) const = default;
};

// ---------------------------------------------------------------------------
// JSON forms. from_json throws InputError on schema violations.
// ---------------------------------------------------------------------------

void to_json(json& j, const HomeRecord& r);
void from_json(const json& j, HomeRecord& r);
void to_json(json& j, const ImageDescription& d);
void from_json(const json& j, ImageDescription& d);
void to_json(json& j, const PerformanceParams& p);
void from_json(const json& j, PerformanceParams& p);
// GeoJSON Feature with Polygon geometry and a closed ring.
void to_json(json& j, const BuildingFeature& f);
void from_json(const json& j, BuildingFeature& f);
void to_json(json& j, const SimulationResult& s);
void from_json(const json& j, SimulationResult& s);
void to_json(json& j, const EfficiencyLabel& l);
void from_json(const json& j, EfficiencyLabel& l);
void to_json(json& j, const OcclusionReport& r);
void from_json(const json& j, OcclusionReport& r);

// Same as from_json(j, record). Image paths are kept exactly as written.
HomeRecord parse_home_record(const json& j);

}  // namespace synthhome
