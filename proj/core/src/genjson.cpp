#include "synthhome/genjson.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "synthhome/error.hpp"
#include "synthhome/geometry.hpp"
#include "synthhome/util.hpp"

namespace synthhome {

namespace {

constexpr std::string_view kHomeIdLabel = "HOME ID: ";

std::string describe_section(std::string_view title, std::string_view text) {
  if (trim(text).empty()) return std::string(title) + ": (none)\n";
  return std::string(title) + ":\n" + std::string(text) + "\n";
}

}  // namespace

std::string build_generation_prompt(const HomeRecord& record, const ImageDescription& desc) {
  std::ostringstream p;
  p << "You are an expert residential energy auditor preparing input for a whole-building energy "
       "simulation. Using the county property data and image descriptions below, do two things:\n"
       "1. Generate a single GeoJSON Feature describing the building: its footprint geometry, the "
       "county data, and five estimated performance parameters defined by standard convention.\n"
       "2. Write a short home inspection note focused on energy-related observations: insulation, "
       "HVAC type/age, visible windows, and any inferred upgrades. Place it in the Feature's "
       "properties as \"inspection_note\".\n\n";

  p << kHomeIdLabel << record.id << "\n";
  p << "STREET ADDRESS: " << (record.street_address.empty() ? "unknown" : record.street_address) << "\n\n";

  p << "COUNTY DATA:\n";
  for (const auto& spec : county_attributes()) {
    auto it = record.attributes.find(std::string(spec.key));
    p << spec.key << ": " << (it == record.attributes.end() ? "unknown" : attribute_to_string(it->second))
      << "\n";
  }
  for (const auto& [key, value] : record.attributes) {
    if (!find_county_attribute(key)) p << key << ": " << attribute_to_string(value) << "\n";
  }
  p << "\n";
  p << describe_section("PHOTO DESCRIPTION", desc.facade_text) << "\n";
  p << describe_section("FLOOR PLAN DESCRIPTION", desc.floorplan_text) << "\n";

  p << "OUTPUT RULES:\n"
       "- Respond with exactly one JSON object and nothing else: no prose, no markdown.\n"
       "- \"type\" must be \"Feature\".\n"
       "- \"geometry\" must be a GeoJSON Polygon whose outer ring lists [longitude, latitude] "
       "positions of the building footprint, with the first position repeated at the end.\n"
       "- \"properties\" must contain these keys: ";
  for (std::size_t i = 0; i < kFeaturePropertyKeys.size(); ++i) {
    p << (i ? ", " : "") << '"' << kFeaturePropertyKeys[i] << '"';
  }
  p << ".\n"
       "- \"floor_area\" is the conditioned floor area in square feet; use the county living area "
       "when it is known.\n"
       "- Performance parameters are numbers:";
  for (const auto& spec : kParamSpecs) {
    p << " " << spec.key << " in [" << format_number(spec.lower) << ", " << format_number(spec.upper)
      << "];";
  }
  p << " hvac_heating_cop is a fractional heating efficiency, R-values are imperial "
       "(ft2.F.hr/Btu), air_change_rate is in air changes per hour.\n"
       "- \"inspection_note\" is two to four sentences covering insulation, HVAC type/age, visible "
       "windows, and any inferred upgrades.\n"
       "- Treat values marked unknown as unknown; do not state them as facts.\n";
  return p.str();
}

ValidationContext validation_context_for(const HomeRecord& record) {
  ValidationContext ctx;
  if (auto area = record.number("total_square_feet_living_area"); area && *area > 0) {
    double stories = record.number("number_of_stories").value_or(1.0);
    if (stories < 1.0) stories = 1.0;
    ctx.expected_footprint_ft2 = *area / stories;
  }
  return ctx;
}

// ---------------------------------------------------------------------------

namespace {

std::string strip_markdown_fence(std::string_view raw) {
  std::string text = trim(raw);
  if (text.starts_with("```")) {
    const auto eol = text.find('\n');
    text = eol == std::string::npos ? std::string{} : text.substr(eol + 1);
    text = trim(text);
  }
  if (text.ends_with("```")) {
    text = trim(std::string_view(text).substr(0, text.size() - 3));
  }
  return text;
}

std::string quoted(std::string_view s) { return "\"" + std::string(s) + "\""; }

void check_geometry(const json& geom, std::vector<LonLat>& ring_out, std::vector<std::string>& violations) {
  if (!geom.is_object()) {
    violations.push_back("member \"geometry\" must be an object");
    return;
  }
  if (auto t = geom.find("type"); t == geom.end() || *t != "Polygon") {
    violations.push_back("geometry type must be \"Polygon\"");
    return;
  }
  auto coords = geom.find("coordinates");
  if (coords == geom.end()) {
    violations.push_back("missing member \"geometry.coordinates\"");
    return;
  }
  if (!coords->is_array() || coords->empty() || !(*coords)[0].is_array()) {
    violations.push_back("geometry.coordinates must be an array of linear rings");
    return;
  }
  const json& ring = (*coords)[0];
  std::vector<LonLat> vertices;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const json& pos = ring[i];
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      violations.push_back("ring position " + std::to_string(i) + " must be [longitude, latitude]");
      return;
    }
    const LonLat v{pos[0].get<double>(), pos[1].get<double>()};
    if (!std::isfinite(v.lon) || !std::isfinite(v.lat) || std::fabs(v.lon) > 180 || std::fabs(v.lat) > 90) {
      violations.push_back("ring position " + std::to_string(i) + " is not a valid longitude/latitude");
      return;
    }
    vertices.push_back(v);
  }
  if (vertices.size() < 4) {
    violations.push_back("outer ring must have at least 4 positions, got " + std::to_string(vertices.size()));
    return;
  }
  if (vertices.front() != vertices.back()) {
    violations.push_back("outer ring is not closed (first and last positions differ)");
    return;
  }
  vertices.pop_back();
  std::set<std::pair<double, double>> distinct;
  for (const auto& v : vertices) distinct.emplace(v.lon, v.lat);
  if (distinct.size() < 3) {
    violations.push_back("outer ring must have at least 3 distinct vertices");
    return;
  }
  if (!(geometry::footprint_area_m2(vertices) > 0.0)) {
    violations.push_back("footprint polygon has zero area");
    return;
  }
  ring_out = std::move(vertices);
}

}  // namespace

FeatureValidation validate_feature(std::string_view raw, const ValidationContext& context) {
  FeatureValidation out;
  auto& violations = out.violations;

  const json doc = json::parse(strip_markdown_fence(raw), nullptr, false);
  if (doc.is_discarded()) {
    violations.push_back("unparseable JSON");
    return out;
  }
  if (!doc.is_object()) {
    violations.push_back("top-level JSON value must be an object");
    return out;
  }
  if (auto t = doc.find("type"); t == doc.end() || *t != "Feature") {
    violations.push_back("member \"type\" must be \"Feature\"");
  }

  std::vector<LonLat> ring;
  if (auto g = doc.find("geometry"); g == doc.end()) {
    violations.push_back("missing member \"geometry\"");
  } else {
    check_geometry(*g, ring, violations);
  }

  BuildingFeature feature;
  auto props_it = doc.find("properties");
  if (props_it == doc.end()) {
    violations.push_back("missing member \"properties\"");
  } else if (!props_it->is_object()) {
    violations.push_back("member \"properties\" must be an object");
  } else {
    const json& props = *props_it;
    for (auto key : kFeaturePropertyKeys) {
      if (!props.contains(key)) violations.push_back("missing property " + quoted(key));
    }
    auto string_prop = [&](std::string_view key, std::string& dst, bool nonempty) {
      auto it = props.find(key);
      if (it == props.end()) return;
      if (!it->is_string()) {
        violations.push_back("property " + quoted(key) + " must be a string");
      } else if (nonempty && trim(it->get<std::string>()).empty()) {
        violations.push_back("property " + quoted(key) + " must not be empty");
      } else {
        dst = it->get<std::string>();
      }
    };
    string_prop("name", feature.name, false);
    string_prop("building_type", feature.building_type, false);
    string_prop("inspection_note", feature.inspection_note, true);

    if (auto it = props.find("floor_area"); it != props.end()) {
      if (!it->is_number() || !std::isfinite(it->get<double>())) {
        violations.push_back("property \"floor_area\" must be a number");
      } else if (it->get<double>() <= 0) {
        violations.push_back("property \"floor_area\" must be > 0");
      } else {
        feature.floor_area_ft2 = it->get<double>();
      }
    }
    for (const auto& spec : kParamSpecs) {
      auto it = props.find(spec.key);
      if (it == props.end()) continue;
      if (!it->is_number() || !std::isfinite(it->get<double>())) {
        violations.push_back("property " + quoted(spec.key) + " must be a finite number");
        continue;
      }
      feature.params.*spec.member = it->get<double>();
    }
  }

  if (!violations.empty()) return out;

  feature.params = clamp_params(feature.params, &out.warnings);
  feature.footprint = std::move(ring);

  if (context.expected_footprint_ft2 && *context.expected_footprint_ft2 > 0) {
    const double actual_ft2 = geometry::footprint_area_m2(feature.footprint) * geometry::kSquareFeetPerSquareMeter;
    const double ratio = actual_ft2 / *context.expected_footprint_ft2;
    if (ratio > 5.0 || ratio < 0.2) {
      out.warnings.push_back("footprint area " + format_fixed(actual_ft2, 1) +
                             " ft2 is implausible against county floor area per story " +
                             format_fixed(*context.expected_footprint_ft2, 1) + " ft2");
    }
  }
  out.feature = std::move(feature);
  return out;
}

std::string reprompt_text(std::string_view prompt, const std::vector<std::string>& violations) {
  std::string out(prompt);
  out += "\n\nYour previous output was invalid because:\n";
  for (const auto& v : violations) out += "- " + v + "\n";
  out += "Respond again with one corrected GeoJSON Feature that follows every rule above.\n";
  return out;
}

GenerationOutcome generate_feature(TextBackend& backend, std::string_view prompt, int max_attempts,
                                   const GenerationOptions& options, const ValidationContext& context) {
  if (max_attempts < 1) throw InputError("generate_feature: max_retries must be >= 1");
  std::string current(prompt);
  std::vector<std::string> last_violations;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const std::string reply = with_retries(backend.retry_policy(), "generate via " + backend.id(),
                                           [&] { return backend.generate(current, options); });
    auto result = validate_feature(reply, context);
    if (result.ok()) {
      return GenerationOutcome{std::move(*result.feature), attempt, std::move(result.warnings)};
    }
    last_violations = std::move(result.violations);
    current = reprompt_text(prompt, last_violations);
  }
  std::string msg = "no valid GeoJSON feature after " + std::to_string(max_attempts) + " attempts:";
  for (const auto& v : last_violations) msg += " " + v + ";";
  throw GenerationError(msg, std::move(last_violations), max_attempts);
}

// ---------------------------------------------------------------------------

namespace {

std::map<std::string, std::string> prompt_fields(std::string_view prompt) {
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(prompt)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.starts_with(kHomeIdLabel)) {
      fields["id"] = trim(std::string_view(line).substr(kHomeIdLabel.size()));
      continue;
    }
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    if (find_county_attribute(key)) fields[key] = trim(std::string_view(line).substr(colon + 2));
  }
  return fields;
}

std::optional<double> field_number(const std::map<std::string, std::string>& f, const std::string& key) {
  auto it = f.find(key);
  if (it == f.end() || it->second == "unknown") return std::nullopt;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string field_text(const std::map<std::string, std::string>& f, const std::string& key) {
  auto it = f.find(key);
  return it == f.end() ? "unknown" : it->second;
}

}  // namespace

std::string MockFeatureGenerator::generate(std::string_view prompt, const GenerationOptions&) {
  const auto f = prompt_fields(prompt);
  const std::string id = f.contains("id") ? f.at("id") : "unknown";
  const double living_ft2 = field_number(f, "total_square_feet_living_area").value_or(1500.0);
  const double stories = std::max(1.0, std::round(field_number(f, "number_of_stories").value_or(1.0)));
  const double year = field_number(f, "year_built").value_or(1970.0);

  const double footprint_m2 = living_ft2 / stories / geometry::kSquareFeetPerSquareMeter;
  const double width = std::sqrt(footprint_m2 * 1.25);
  const double depth = footprint_m2 / width;
  const std::size_t h = std::stoul(sha256_hex(id).substr(0, 8), nullptr, 16) % 1000003;
  const LonLat origin{-75.30 + static_cast<double>(h % 1000) * 1e-4,
                      40.70 + static_cast<double>((h / 1000) % 1000) * 1e-4};
  const auto ring = geometry::rectangle_footprint(origin, width, depth);

  PerformanceParams p;
  const std::string system = to_lower(field_text(f, "heating_system_type"));
  const std::string fuel = to_lower(field_text(f, "heating_fuel_type"));
  const std::string air = to_lower(field_text(f, "heat_air_cond"));
  const bool central_air = air.find("central air") != std::string::npos;
  const bool old = year < 1950;
  const bool mid = !old && year < 1980;
  const bool recent = year >= 2000;
  p.wall_r_value = old ? 7.0 : mid ? 11.0 : recent ? 19.0 : 13.0;
  p.roof_r_value = old ? 19.0 : mid ? 30.0 : recent ? 49.0 : 38.0;
  p.air_change_rate = old ? 1.2 : mid ? 0.8 : recent ? 0.35 : 0.5;
  p.hvac_heating_cop = fuel.find("electric") != std::string::npos ? 1.0 : (old || mid) ? 0.78 : 0.92;
  p.hvac_cooling_cop = central_air ? (recent ? 3.5 : 2.8) : 2.0;

  std::string note = "The home was built in " + format_number(year) + " with " +
                     to_lower(field_text(f, "exterior_wall_material")) + " exterior walls. ";
  if (old || mid) {
    note += "The older " + (system == "unknown" ? std::string("heating system") : system) +
            " appears original and insulation is likely minimal for its era. ";
  } else {
    note += "The " + (system == "unknown" ? std::string("heating system") : system) +
            " was recently updated and walls appear adequately insulated. ";
  }
  note += central_air ? "Central air conditioning is present." : "No central air conditioning was observed.";

  BuildingFeature feature{.name = "Generated Home",
                          .floor_area_ft2 = living_ft2,
                          .building_type = "Single family",
                          .inspection_note = note,
                          .params = p,
                          .footprint = ring};
  return json(feature).dump();
}

}  // namespace synthhome
