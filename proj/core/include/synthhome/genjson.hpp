#pragma once

// Prompt assembly, validation and violation-feedback retry for the
// generated GeoJSON building feature.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthhome/backend.hpp"
#include "synthhome/domain.hpp"

namespace synthhome {

// Property keys every generated feature must carry.
inline constexpr std::array<std::string_view, 9> kFeaturePropertyKeys{
    "name",           "floor_area",       "building_type", "inspection_note", "hvac_heating_cop",
    "hvac_cooling_cop", "wall_r_value", "roof_r_value",  "air_change_rate"};

std::string build_generation_prompt(const HomeRecord& record, const ImageDescription& desc);

struct ValidationContext {
  // floor area / stories from the county record, ft^2. Enables the
  // footprint plausibility warning.
  std::optional<double> expected_footprint_ft2;
};

// Footprint area the county data implies, if living area is known.
ValidationContext validation_context_for(const HomeRecord& record);

struct FeatureValidation {
  std::optional<BuildingFeature> feature;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return feature.has_value(); }
};

// Never throws on malformed text. Out-of-range parameters are clamped and
// reported as warnings; structural problems are violations.
FeatureValidation validate_feature(std::string_view raw, const ValidationContext& context = {});

struct GenerationOutcome {
  BuildingFeature feature;
  int attempts = 0;
  std::vector<std::string> warnings;
};

// The text appended to the original prompt after an invalid reply.
std::string reprompt_text(std::string_view prompt, const std::vector<std::string>& violations);

// Calls the backend, validating each reply and re-prompting with the
// violation list until a valid feature comes back or `max_attempts` replies
// have been rejected (GenerationError). Transport failures inside one attempt
// are retried per the backend's policy and do not count as attempts.
GenerationOutcome generate_feature(TextBackend& backend, std::string_view prompt, int max_attempts = 3,
                                   const GenerationOptions& options = {},
                                   const ValidationContext& context = {});

// Offline generator: reads the county lines back out of a generation prompt
// and synthesizes a plausible feature (rectangular footprint sized from
// living area and stories, era-based envelope values, a short note).
class MockFeatureGenerator final : public TextBackend {
 public:
  std::string id() const override { return "mock-generator"; }
  std::string generate(std::string_view prompt, const GenerationOptions& options) override;
  RetryPolicy retry_policy() const override { return {1, std::chrono::milliseconds(0), 1.0}; }
};

}  // namespace synthhome
