#include <gtest/gtest.h>

#include "support.hpp"
#include "synthhome/error.hpp"
#include "synthhome/genjson.hpp"
#include "synthhome/ingest.hpp"
#include "synthhome/util.hpp"

using namespace synthhome;

namespace {

std::string reference_text() { return read_text(test::fixture("feature_reference.geojson")); }

HomeRecord sample_record() {
  return parse_home_record(json::parse(
      R"({"id":"H9","street_address":"9 Oak","year_built":1960,"total_square_feet_living_area":1800,
          "number_of_stories":2,"heating_system_type":"Forced Air","heat_air_cond":"Central Air",
          "exterior_wall_material":"Brick"})"));
}

}  // namespace

TEST(GenerationPrompt, MarksUnknownsAndMissingImages) {
  const auto prompt = build_generation_prompt(sample_record(), {"a brick house", "", "mock"});
  EXPECT_NE(prompt.find("HOME ID: H9"), std::string::npos);
  EXPECT_NE(prompt.find("year_built: 1960\n"), std::string::npos);
  EXPECT_NE(prompt.find("grade: unknown\n"), std::string::npos);
  EXPECT_NE(prompt.find("a brick house"), std::string::npos);
  EXPECT_NE(prompt.find("FLOOR PLAN DESCRIPTION: (none)"), std::string::npos);
  for (auto key : kFeaturePropertyKeys) EXPECT_NE(prompt.find(std::string(key)), std::string::npos) << key;
}

TEST(ValidateFeature, ReferenceIsValid) {
  const auto v = validate_feature(reference_text());
  ASSERT_TRUE(v.ok()) << (v.violations.empty() ? "" : v.violations[0]);
  EXPECT_TRUE(v.violations.empty());
  EXPECT_TRUE(v.warnings.empty());
  EXPECT_EQ(v.feature->floor_area_ft2, 2576.0);
}

TEST(ValidateFeature, StripsMarkdownFence) {
  EXPECT_TRUE(validate_feature("```json\n" + reference_text() + "\n```").ok());
}

TEST(ValidateFeature, NamesEachViolation) {
  auto j = json::parse(reference_text());
  j["properties"].erase("wall_r_value");
  j["properties"].erase("inspection_note");
  const auto v = validate_feature(j.dump());
  EXPECT_FALSE(v.ok());
  EXPECT_NE(std::find(v.violations.begin(), v.violations.end(), "missing property \"wall_r_value\""),
            v.violations.end());
  EXPECT_NE(std::find(v.violations.begin(), v.violations.end(), "missing property \"inspection_note\""),
            v.violations.end());

  EXPECT_EQ(validate_feature("not json at all").violations, std::vector<std::string>{"unparseable JSON"});

  auto no_geom = json::parse(reference_text());
  no_geom.erase("geometry");
  EXPECT_EQ(validate_feature(no_geom.dump()).violations, std::vector<std::string>{"missing member \"geometry\""});

  auto open = json::parse(reference_text());
  open["geometry"]["coordinates"][0].erase(4);
  EXPECT_FALSE(validate_feature(open.dump()).ok());
}

TEST(ValidateFeature, OutOfRangeParamsClampedWithWarning) {
  auto j = json::parse(reference_text());
  j["properties"]["hvac_cooling_cop"] = 12.0;
  const auto v = validate_feature(j.dump());
  ASSERT_TRUE(v.ok());
  EXPECT_EQ(v.feature->params.hvac_cooling_cop, 6.0);
  EXPECT_EQ(v.warnings.size(), 1u);
}

TEST(ValidateFeature, ImplausibleFootprintWarns) {
  ValidationContext ctx;
  ctx.expected_footprint_ft2 = 100000.0;
  const auto v = validate_feature(reference_text(), ctx);
  ASSERT_TRUE(v.ok());
  EXPECT_EQ(v.warnings.size(), 1u);
  ctx.expected_footprint_ft2 = 1288.0;
  EXPECT_TRUE(validate_feature(reference_text(), ctx).warnings.empty());
}

TEST(GenerateFeature, RepromptCarriesViolations) {
  ScriptedTextBackend backend({"{\"type\":\"Feature\"}", reference_text()});
  const auto outcome = generate_feature(backend, "PROMPT", 3);
  EXPECT_EQ(outcome.attempts, 2);
  const auto prompts = backend.prompts();
  ASSERT_EQ(prompts.size(), 2u);
  EXPECT_EQ(prompts[0], "PROMPT");
  EXPECT_EQ(prompts[1].rfind("PROMPT", 0), 0u);
  EXPECT_NE(prompts[1].find("Your previous output was invalid because:\n- missing member \"geometry\""),
            std::string::npos);
}

TEST(GenerateFeature, ExhaustionReportsViolations) {
  ScriptedTextBackend backend({"nope"});
  try {
    generate_feature(backend, "P", 4);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.attempts(), 4);
    EXPECT_EQ(e.violations(), std::vector<std::string>{"unparseable JSON"});
  }
  EXPECT_EQ(backend.calls(), 4);
  EXPECT_THROW(generate_feature(backend, "P", 0), InputError);
}

TEST(GenerateFeature, TransportRetriesDoNotCountAsAttempts) {
  int n = 0;
  CallbackTextBackend backend("cb", [&](std::string_view) {
    if (++n == 1) throw TransportError("blip");
    return reference_text();
  });
  EXPECT_EQ(generate_feature(backend, "P", 1).attempts, 1);
  EXPECT_EQ(backend.calls(), 2);
}

TEST(MockFeatureGenerator, ProducesValidPlausibleFeatures) {
  const auto records = load_home_records(test::fixture("homes")).records;
  MockFeatureGenerator gen;
  for (const auto& r : records) {
    const auto prompt = build_generation_prompt(r, {});
    const auto ctx = validation_context_for(r);
    const auto v = validate_feature(gen.generate(prompt, {}), ctx);
    ASSERT_TRUE(v.ok()) << r.id;
    EXPECT_TRUE(v.warnings.empty()) << r.id;
    EXPECT_TRUE(check_params(v.feature->params).empty()) << r.id;
    EXPECT_EQ(gen.generate(prompt, {}), gen.generate(prompt, {}));
  }
}
