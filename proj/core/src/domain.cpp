#include "synthhome/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "synthhome/error.hpp"
#include "synthhome/util.hpp"

namespace synthhome {

namespace {

constexpr std::array<AttributeSpec, 31> kCountyAttributes{{
    {"year_built", AttributeKind::year},
    {"remodeled_year", AttributeKind::year},
    {"land_use_code", AttributeKind::text},
    {"total_square_feet_living_area", AttributeKind::number},
    {"number_of_stories", AttributeKind::number},
    {"grade", AttributeKind::text},
    {"cdu", AttributeKind::text},
    {"building_style", AttributeKind::text},
    {"total_rooms", AttributeKind::number},
    {"bedrooms", AttributeKind::number},
    {"full_baths", AttributeKind::number},
    {"half_baths", AttributeKind::number},
    {"additional_fixtures", AttributeKind::number},
    {"total_fixtures", AttributeKind::number},
    {"heat_air_cond", AttributeKind::text},
    {"heating_fuel_type", AttributeKind::text},
    {"heating_system_type", AttributeKind::text},
    {"attic_code", AttributeKind::text},
    {"unfinished_area", AttributeKind::number},
    {"rec_room_area", AttributeKind::number},
    {"finished_basement_area", AttributeKind::number},
    {"fireplace_openings", AttributeKind::number},
    {"fireplace_stacks", AttributeKind::number},
    {"prefab_fireplaces", AttributeKind::number},
    {"basement_garage_cars", AttributeKind::number},
    {"condo_level", AttributeKind::number},
    {"condo_townhouse_type", AttributeKind::text},
    {"basement", AttributeKind::text},
    {"exterior_wall_material", AttributeKind::text},
    {"physical_condition", AttributeKind::text},
    {"sketch_data", AttributeKind::sketch},
}};

const std::set<std::string, std::less<>> kReservedRecordKeys{"id", "street_address", "photo",
                                                             "floorplan"};

double require_number(const json& j, std::string_view what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
  return v;
}

// County exports sometimes quote numbers ("2,576"); accept those verbatim.
std::optional<double> number_from_text(std::string_view s) {
  std::string cleaned;
  for (char c : s) {
    if (c != ',') cleaned += c;
  }
  cleaned = trim(cleaned);
  if (cleaned.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double v = std::stod(cleaned, &used);
    if (used != cleaned.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

json number_to_json(double v) {
  if (v == std::floor(v) && std::fabs(v) < 9.0e15) return json(static_cast<long long>(v));
  return json(v);
}

const json& member(const json& j, std::string_view key, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string(where) + ": missing \"" + std::string(key) + "\"");
  return *it;
}

}  // namespace

std::span<const AttributeSpec> county_attributes() { return kCountyAttributes; }

const AttributeSpec* find_county_attribute(std::string_view key) {
  for (const auto& spec : kCountyAttributes) {
    if (spec.key == key) return &spec;
  }
  return nullptr;
}

std::optional<double> HomeRecord::number(std::string_view key) const {
  auto it = attributes.find(std::string(key));
  if (it == attributes.end()) return std::nullopt;
  if (const double* v = std::get_if<double>(&it->second)) return *v;
  return std::nullopt;
}

std::optional<std::string> HomeRecord::text(std::string_view key) const {
  auto it = attributes.find(std::string(key));
  if (it == attributes.end()) return std::nullopt;
  if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
  return std::nullopt;
}

std::string attribute_to_string(const AttributeValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          std::string out;
          for (const auto& [segment, area] : v) {
            if (!out.empty()) out += "; ";
            out += segment + "=" + format_number(area);
          }
          return out;
        }
      },
      value);
}

// ---------------------------------------------------------------------------

PerformanceParams default_performance_params() {
  return PerformanceParams{.hvac_heating_cop = 0.8,
                           .hvac_cooling_cop = 3.0,
                           .wall_r_value = 13.0,
                           .roof_r_value = 30.0,
                           .air_change_rate = 2.0};
}

std::vector<std::string> check_params(const PerformanceParams& params) {
  std::vector<std::string> problems;
  for (const auto& spec : kParamSpecs) {
    const double v = params.*spec.member;
    if (!std::isfinite(v)) {
      problems.push_back(std::string(spec.key) + " is not finite");
    } else if (v < spec.lower || v > spec.upper) {
      problems.push_back(std::string(spec.key) + " = " + format_number(v) + " outside [" +
                         format_number(spec.lower) + ", " + format_number(spec.upper) + "]");
    }
  }
  return problems;
}

void require_valid(const PerformanceParams& params) {
  const auto problems = check_params(params);
  if (problems.empty()) return;
  std::string msg = "invalid performance parameters:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw InputError(msg);
}

PerformanceParams clamp_params(PerformanceParams params, std::vector<std::string>* warnings) {
  for (const auto& spec : kParamSpecs) {
    double& v = params.*spec.member;
    if (!std::isfinite(v)) continue;
    const double clamped = std::clamp(v, spec.lower, spec.upper);
    if (clamped != v) {
      if (warnings) {
        warnings->push_back(std::string(spec.key) + " clamped from " + format_number(v) + " to " +
                            format_number(clamped));
      }
      v = clamped;
    }
  }
  return params;
}

// ---------------------------------------------------------------------------

std::string_view to_string(EngineKind kind) {
  return kind == EngineKind::external ? "external" : "surrogate";
}

EngineKind engine_kind_from_string(std::string_view s) {
  if (s == "external") return EngineKind::external;
  if (s == "surrogate") return EngineKind::surrogate;
  throw InputError("unknown engine \"" + std::string(s) + "\"");
}

std::string_view to_string(Category c) { return c == Category::hvac ? "hvac" : "insulation"; }

Category category_from_string(std::string_view s) {
  if (s == "hvac") return Category::hvac;
  if (s == "insulation") return Category::insulation;
  throw InputError("unknown category \"" + std::string(s) + "\"");
}

double category_alpha(const SimulationResult& result, Category category) {
  return category == Category::hvac ? result.hvac_energy_kwh : result.envelope_load_kwh;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const HomeRecord& r) {
  j = json::object();
  j["id"] = r.id;
  if (!r.street_address.empty()) j["street_address"] = r.street_address;
  for (const auto& [key, value] : r.attributes) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            j[key] = number_to_json(v);
          } else if constexpr (std::is_same_v<T, std::string>) {
            j[key] = v;
          } else {
            json sketch = json::object();
            for (const auto& [segment, area] : v) sketch[segment] = number_to_json(area);
            j[key] = std::move(sketch);
          }
        },
        value);
  }
  if (r.photo_path) j["photo"] = r.photo_path->generic_string();
  if (r.floorplan_path) j["floorplan"] = r.floorplan_path->generic_string();
}

void from_json(const json& j, HomeRecord& r) {
  if (!j.is_object()) throw InputError("home record must be a JSON object");
  HomeRecord out;
  const json& id = member(j, "id", "home record");
  if (!id.is_string() && !id.is_number_integer()) throw InputError("home record id must be a string");
  out.id = id.is_string() ? id.get<std::string>() : std::to_string(id.get<long long>());
  if (trim(out.id).empty()) throw InputError("home record id is empty");
  if (auto it = j.find("street_address"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw InputError("street_address must be a string");
    out.street_address = it->get<std::string>();
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (kReservedRecordKeys.contains(key)) continue;
    const json& value = it.value();
    if (value.is_null()) continue;
    if (value.is_string() && trim(value.get<std::string>()).empty()) continue;

    const AttributeSpec* spec = find_county_attribute(key);
    const AttributeKind kind = spec ? spec->kind
                                    : (value.is_number() ? AttributeKind::number
                                       : value.is_object() ? AttributeKind::sketch
                                                           : AttributeKind::text);
    switch (kind) {
      case AttributeKind::year:
      case AttributeKind::number: {
        double v = 0;
        if (value.is_string()) {
          auto parsed = number_from_text(value.get<std::string>());
          if (!parsed) throw InputError(key + " must be numeric");
          v = *parsed;
        } else {
          v = require_number(value, key);
        }
        if (v < 0) throw InputError(key + " must be >= 0");
        out.attributes.emplace(key, v);
        break;
      }
      case AttributeKind::text:
        if (value.is_string()) {
          out.attributes.emplace(key, value.get<std::string>());
        } else if (value.is_number() || value.is_boolean()) {
          out.attributes.emplace(key, value.dump());
        } else {
          throw InputError(key + " must be a string");
        }
        break;
      case AttributeKind::sketch: {
        if (!value.is_object()) throw InputError(key + " must be an object of segment areas");
        SketchData sketch;
        for (auto s = value.begin(); s != value.end(); ++s) {
          const double area = require_number(s.value(), key + "." + s.key());
          if (area < 0) throw InputError(key + "." + s.key() + " must be >= 0");
          sketch.emplace(s.key(), area);
        }
        out.attributes.emplace(key, std::move(sketch));
        break;
      }
    }
  }
  for (const char* image_key : {"photo", "floorplan"}) {
    auto it = j.find(image_key);
    if (it == j.end() || it->is_null()) continue;
    if (!it->is_string()) throw InputError(std::string(image_key) + " must be a path string");
    if (it->get<std::string>().empty()) continue;
    auto& slot = std::string_view(image_key) == "photo" ? out.photo_path : out.floorplan_path;
    slot = std::filesystem::path(it->get<std::string>());
  }
  r = std::move(out);
}

HomeRecord parse_home_record(const json& j) { return j.get<HomeRecord>(); }

void to_json(json& j, const ImageDescription& d) {
  j = json{{"facade_text", d.facade_text},
           {"floorplan_text", d.floorplan_text},
           {"backend_id", d.backend_id}};
}

void from_json(const json& j, ImageDescription& d) {
  if (!j.is_object()) throw InputError("image description must be an object");
  d.facade_text = j.value("facade_text", std::string{});
  d.floorplan_text = j.value("floorplan_text", std::string{});
  d.backend_id = j.value("backend_id", std::string{});
}

void to_json(json& j, const PerformanceParams& p) {
  j = json::object();
  for (const auto& spec : kParamSpecs) j[std::string(spec.key)] = p.*spec.member;
}

void from_json(const json& j, PerformanceParams& p) {
  if (!j.is_object()) throw InputError("performance parameters must be an object");
  PerformanceParams out;
  for (const auto& spec : kParamSpecs) {
    out.*spec.member = require_number(member(j, spec.key, "performance parameters"), spec.key);
  }
  p = out;
}

void to_json(json& j, const BuildingFeature& f) {
  json ring = json::array();
  for (const auto& v : f.footprint) ring.push_back(json::array({v.lon, v.lat}));
  if (!f.footprint.empty()) {
    ring.push_back(json::array({f.footprint.front().lon, f.footprint.front().lat}));
  }
  json props = json::object();
  props["name"] = f.name;
  props["floor_area"] = number_to_json(f.floor_area_ft2);
  props["building_type"] = f.building_type;
  props["inspection_note"] = f.inspection_note;
  for (const auto& spec : kParamSpecs) props[std::string(spec.key)] = f.params.*spec.member;
  j = json::object();
  j["type"] = "Feature";
  j["properties"] = std::move(props);
  j["geometry"] = json{{"type", "Polygon"}, {"coordinates", json::array({std::move(ring)})}};
}

void from_json(const json& j, BuildingFeature& f) {
  if (!j.is_object() || j.value("type", std::string{}) != "Feature") {
    throw InputError("building feature must be a GeoJSON Feature");
  }
  const json& props = member(j, "properties", "feature");
  const json& geometry = member(j, "geometry", "feature");
  if (geometry.value("type", std::string{}) != "Polygon") throw InputError("geometry must be a Polygon");
  const json& rings = member(geometry, "coordinates", "geometry");
  if (!rings.is_array() || rings.empty() || !rings[0].is_array()) {
    throw InputError("Polygon coordinates must hold an outer ring");
  }
  const json& ring = rings[0];
  if (ring.size() < 4) throw InputError("outer ring needs at least 4 positions");
  std::vector<LonLat> vertices;
  for (const auto& pos : ring) {
    if (!pos.is_array() || pos.size() < 2) throw InputError("ring position must be [lon, lat]");
    vertices.push_back({require_number(pos[0], "lon"), require_number(pos[1], "lat")});
  }
  if (vertices.front() != vertices.back()) throw InputError("outer ring is not closed");
  vertices.pop_back();

  BuildingFeature out;
  out.name = member(props, "name", "properties").get<std::string>();
  out.floor_area_ft2 = require_number(member(props, "floor_area", "properties"), "floor_area");
  out.building_type = member(props, "building_type", "properties").get<std::string>();
  out.inspection_note = member(props, "inspection_note", "properties").get<std::string>();
  out.params = props.get<PerformanceParams>();
  out.footprint = std::move(vertices);
  if (out.floor_area_ft2 <= 0) throw InputError("floor_area must be > 0");
  if (trim(out.inspection_note).empty()) throw InputError("inspection_note is empty");
  std::set<std::pair<double, double>> distinct;
  for (const auto& v : out.footprint) distinct.emplace(v.lon, v.lat);
  if (distinct.size() < 3) throw InputError("footprint needs at least 3 distinct vertices");
  f = std::move(out);
}

void to_json(json& j, const SimulationResult& s) {
  j = json{{"hvac_energy_kwh", s.hvac_energy_kwh},
           {"envelope_load_kwh", s.envelope_load_kwh},
           {"engine", to_string(s.engine)},
           {"raw_outputs", s.raw_outputs}};
}

void from_json(const json& j, SimulationResult& s) {
  if (!j.is_object()) throw InputError("simulation result must be an object");
  SimulationResult out;
  out.hvac_energy_kwh = require_number(member(j, "hvac_energy_kwh", "simulation"), "hvac_energy_kwh");
  out.envelope_load_kwh =
      require_number(member(j, "envelope_load_kwh", "simulation"), "envelope_load_kwh");
  if (out.hvac_energy_kwh < 0 || out.envelope_load_kwh < 0) {
    throw InputError("simulation energies must be >= 0");
  }
  out.engine = engine_kind_from_string(member(j, "engine", "simulation").get<std::string>());
  if (auto it = j.find("raw_outputs"); it != j.end()) {
    for (auto r = it->begin(); r != it->end(); ++r) {
      out.raw_outputs.emplace(r.key(), require_number(r.value(), r.key()));
    }
  }
  s = std::move(out);
}

void to_json(json& j, const EfficiencyLabel& l) {
  j = json{{"category", to_string(l.category)}, {"lambda", l.lambda}, {"eta", l.eta}, {"mu", l.mu}};
}

void from_json(const json& j, EfficiencyLabel& l) {
  EfficiencyLabel out;
  out.category = category_from_string(member(j, "category", "label").get<std::string>());
  out.lambda = require_number(member(j, "lambda", "label"), "lambda");
  out.eta = require_number(member(j, "eta", "label"), "eta");
  out.mu = require_number(member(j, "mu", "label"), "mu");
  if (out.lambda < 0 || out.lambda > 1 || out.eta < 0 || out.eta > 1) {
    throw InputError("label scores must lie in [0, 1]");
  }
  l = out;
}

void to_json(json& j, const OcclusionReport& r) {
  j = json::object();
  j["image_id"] = r.image_id;
  j["baseline_text"] = r.baseline_text;
  j["grid_rows"] = r.grid_rows;
  j["grid_cols"] = r.grid_cols;
  j["distances"] = r.distances;
  if (r.region_mask) {
    json mask = json::array();
    for (bool b : *r.region_mask) mask.push_back(b ? 1 : 0);
    j["region_mask"] = std::move(mask);
  }
  if (r.rmd) j["rmd"] = *r.rmd;
  if (r.nrmd) j["nrmd"] = *r.nrmd;
}

void from_json(const json& j, OcclusionReport& r) {
  OcclusionReport out;
  out.image_id = member(j, "image_id", "occlusion report").get<std::string>();
  out.baseline_text = member(j, "baseline_text", "occlusion report").get<std::string>();
  out.grid_rows = member(j, "grid_rows", "occlusion report").get<int>();
  out.grid_cols = member(j, "grid_cols", "occlusion report").get<int>();
  out.distances = member(j, "distances", "occlusion report").get<std::vector<double>>();
  if (out.grid_rows <= 0 || out.grid_cols <= 0 ||
      out.distances.size() != static_cast<std::size_t>(out.grid_rows * out.grid_cols)) {
    throw InputError("occlusion report grid size does not match distances");
  }
  for (double d : out.distances) {
    if (!std::isfinite(d) || d < 0 || d > 2) throw InputError("occlusion distance outside [0, 2]");
  }
  if (auto it = j.find("region_mask"); it != j.end()) {
    std::vector<bool> mask;
    for (const auto& v : *it) mask.push_back(v.get<int>() != 0);
    if (mask.size() != out.distances.size()) throw InputError("region_mask size mismatch");
    out.region_mask = std::move(mask);
  }
  if (auto it = j.find("rmd"); it != j.end()) out.rmd = it->get<double>();
  if (auto it = j.find("nrmd"); it != j.end()) out.nrmd = it->get<double>();
  if (out.rmd.has_value() != out.nrmd.has_value() || (out.rmd && !out.region_mask)) {
    throw InputError("rmd/nrmd require a region mask");
  }
  r = std::move(out);
}

}  // namespace synthhome
