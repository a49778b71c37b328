#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "synthhome/ablation.hpp"
#include "synthhome/error.hpp"
#include "synthhome/geometry.hpp"
#include "synthhome/simulate.hpp"
#include "synthhome/util.hpp"

using namespace synthhome;

namespace {

CallbackTextBackend constant(double lambda) {
  return CallbackTextBackend("const", [lambda](std::string_view) { return format_fixed(lambda, 2); });
}

double mean(const AblationRow& row, Category c) { return row.mu.at(c).mean.value(); }

}  // namespace

TEST(AblationGrid, Values) {
  EXPECT_EQ(ablation_values(AblationVariable::wallr), (std::array<double, 5>{4, 7, 13, 20, 30}));
  EXPECT_EQ(ablation_values(AblationVariable::roofr), (std::array<double, 5>{10, 20, 30, 40, 50}));
  EXPECT_EQ(ablation_values(AblationVariable::hvach), (std::array<double, 5>{0.7, 0.8, 0.9, 0.95, 1.0}));
  EXPECT_EQ(ablation_values(AblationVariable::hvacc), (std::array<double, 5>{1.0, 2.0, 3.0, 3.5, 4.0}));
  EXPECT_EQ(ablation_variable_from_string("hvacc"), AblationVariable::hvacc);
  EXPECT_EQ(to_string(AblationVariable::roofr), "ROOFR");
  EXPECT_THROW(ablation_variable_from_string("ACH"), InputError);
  EXPECT_EQ(ablation_category(AblationVariable::wallr), Category::insulation);
  EXPECT_EQ(ablation_category(AblationVariable::hvach), Category::hvac);
}

TEST(AblationGrid, DefaultsMatchEngineTemplate) {
  const auto d = default_performance_params();
  EXPECT_EQ(d.air_change_rate, 2.0);
  EXPECT_EQ(d.hvac_heating_cop, 0.8);
  EXPECT_EQ(d.hvac_cooling_cop, 3.0);
  EXPECT_EQ(d.wall_r_value, 13);
  EXPECT_EQ(d.roof_r_value, 30);
  EXPECT_EQ(kDefaultWindowU, 2.0);
}

TEST(AblationNotes, Ladders) {
  const auto notes = default_ablation_notes();
  ASSERT_EQ(notes.size(), 10u);
  EXPECT_EQ(notes[0].label, "HVAC1");
  EXPECT_EQ(notes[9].label, "INS5");
  EXPECT_TRUE(kNeutralNote.starts_with("The home has two stories"));
}

TEST(ReferenceBuilding, TwoStories) {
  const auto b = reference_building(default_performance_params());
  EXPECT_EQ(b.floor_area_ft2, 2000);
  EXPECT_EQ(estimate_stories(b), 2);
  EXPECT_EQ(b.inspection_note, kNeutralNote);
}

TEST(Summarize, SampleSd) {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(*s.mean, 2.5);
  EXPECT_NEAR(*s.sd, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_EQ(s.trials_ok, 4);
  const auto one = summarize({0.7});
  EXPECT_EQ(*one.sd, 0.0);
  const auto none = summarize({});
  EXPECT_FALSE(none.mean.has_value());
  EXPECT_EQ(none.trials_ok, 0);
}

TEST(AblationText, RowsAndDeterminism) {
  KeywordScoreBackend kw;
  SimulationResult fixed;
  fixed.hvac_energy_kwh = 8000;
  fixed.envelope_load_kwh = 12000;
  const auto notes = default_ablation_notes();
  const auto table = ablation_text(kw, notes, fixed);
  ASSERT_EQ(table.rows.size(), notes.size());
  EXPECT_EQ(table.warnings.size(), 1u);
  for (const auto& row : table.rows) {
    for (Category c : kCategories) {
      EXPECT_EQ(row.mu.at(c).sd.value(), 0.0);
      EXPECT_EQ(row.mu.at(c).trials_ok, 5);
    }
  }
  // HVAC1 is worse than HVAC5 under the keyword scorer
  EXPECT_GT(mean(table.rows[0], Category::hvac), mean(table.rows[4], Category::hvac));
  EXPECT_GT(mean(table.rows[5], Category::insulation), mean(table.rows[9], Category::insulation));

  AblationConfig one;
  one.trials = 1;
  const auto single = ablation_text(kw, notes, fixed, one);
  EXPECT_EQ(single.rows[3].mu.at(Category::hvac).sd.value(), 0.0);
  one.trials = 0;
  EXPECT_THROW(ablation_text(kw, notes, fixed, one), InputError);
  EXPECT_THROW(ablation_text(kw, {}, fixed), InputError);
}

TEST(AblationText, FailuresStayInTheTable) {
  ScriptedTextBackend vague({"unsure"});
  SimulationResult fixed;
  const auto table = ablation_text(vague, {{"X", "some note"}}, fixed);
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_FALSE(table.rows[0].mu.at(Category::hvac).mean.has_value());
  EXPECT_EQ(table.rows[0].failures.size(), 10u);
  const auto csv = table.csv();
  EXPECT_NE(csv.find("unparseable"), std::string::npos);
}

TEST(AblationSim, HvaccSweep) {
  auto b = constant(0.5);
  const auto table = ablation_sim(b, kNeutralNote, AblationVariable::hvacc);
  ASSERT_EQ(table.rows.size(), 5u);
  const std::array<double, 5> cops{1.0, 2.0, 3.0, 3.5, 4.0};
  const auto d = default_performance_params();
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& r = table.rows[i];
    EXPECT_EQ(r.label, "HVACC" + std::to_string(i + 1));
    EXPECT_EQ(r.params.hvac_cooling_cop, cops[i]);
    EXPECT_EQ(r.params.hvac_heating_cop, d.hvac_heating_cop);
    EXPECT_EQ(r.params.wall_r_value, d.wall_r_value);
    if (i > 0) {
      EXPECT_LT(mean(r, Category::hvac), mean(table.rows[i - 1], Category::hvac));
    }
  }
  // worst row: eta 1, best row: eta 0
  EXPECT_NEAR(mean(table.rows[0], Category::hvac), (0.8 + 0.2 * 0.5) / 2, 1e-12);
  EXPECT_NEAR(mean(table.rows[4], Category::hvac), 0.2 * 0.5 / 2, 1e-12);
  // envelope unaffected by COP, so insulation extremes are degenerate
  EXPECT_EQ(table.warnings.size(), 1u);
}

TEST(AblationSim, InsulationSweeps) {
  auto b = constant(0.5);
  for (auto v : {AblationVariable::wallr, AblationVariable::roofr}) {
    const auto table = ablation_sim(b, kNeutralNote, v);
    for (std::size_t i = 1; i < 5; ++i)
      EXPECT_LT(mean(table.rows[i], Category::insulation), mean(table.rows[i - 1], Category::insulation));
  }
}

TEST(AblationSim, Csv) {
  auto b = constant(0.5);
  AblationConfig cfg;
  cfg.trials = 2;
  const auto csv = ablation_sim(b, "n", AblationVariable::hvach, cfg).csv();
  const auto rows = parse_csv(csv);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0][0], "label");
  EXPECT_EQ(rows[0].back(), "failures");
  EXPECT_EQ(rows[1][0], "HVACH1");
  EXPECT_EQ(rows[1][2], "0.700000");
}

TEST(Combined, FourRowsAndBalance) {
  KeywordScoreBackend kw;
  const auto t = combined_variation(kw, AblationVariable::hvacc);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0].label, "HVAC5 + HVACC5");
  EXPECT_EQ(t.rows[3].label, "HVAC1 + HVACC1");
  const double lo = mean(t.rows[0], Category::hvac);
  const double hi = mean(t.rows[3], Category::hvac);
  for (int i : {1, 2}) {
    EXPECT_GT(mean(t.rows[i], Category::hvac), lo);
    EXPECT_LT(mean(t.rows[i], Category::hvac), hi);
  }
}

TEST(Combined, HeuristicOnlyIgnoresNote) {
  KeywordScoreBackend kw;
  AblationConfig cfg;
  cfg.labeler.weights = {1.0, 0.0};
  const auto t = combined_variation(kw, AblationVariable::wallr, cfg);
  for (Category c : kCategories) {
    EXPECT_EQ(mean(t.rows[0], c), mean(t.rows[2], c));
    EXPECT_EQ(mean(t.rows[1], c), mean(t.rows[3], c));
  }
}

TEST(Combined, TextOnlyIgnoresSim) {
  KeywordScoreBackend kw;
  AblationConfig cfg;
  cfg.labeler.weights = {0.0, 1.0};
  const auto t = combined_variation(kw, AblationVariable::roofr, cfg);
  for (Category c : kCategories) {
    EXPECT_EQ(mean(t.rows[0], c), mean(t.rows[1], c));
    EXPECT_EQ(mean(t.rows[2], c), mean(t.rows[3], c));
  }
}
