// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "synthhome/ablation.hpp"
#include "synthhome/genjson.hpp"
#include "synthhome/label.hpp"
#include "synthhome/occlusion.hpp"
#include "synthhome/pipeline.hpp"
#include "synthhome/simulate.hpp"
#include "synthhome/util.hpp"

using namespace synthhome;
using Clock = std::chrono::steady_clock;

namespace {

struct Failure {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool rel_close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)}); }

// ---------------------------------------------------------------------------

void heuristic_worked_example() {
  const double alphas[] = {4000, 10000, 5000, 7000};
  double eta[4];
  const auto t0 = Clock::now();
  for (int i = 0; i < 4; ++i) eta[i] = heuristic_score(alphas[i], 4000, 10000);
  const double elapsed = seconds_since(t0);
  require(eta[0] == 0.0, "eta(H1) = " + format_number(eta[0]));
  require(eta[1] == 1.0, "eta(H2) = " + format_number(eta[1]));
  require(std::fabs(eta[2] - 0.1667) <= 0.0005, "eta(H3) = " + format_number(eta[2]));
  require(std::trunc(eta[2] * 1000) / 1000 == 0.166, "eta(H3) does not truncate to 0.166");
  require(eta[3] == 0.5, "eta(H4) = " + format_number(eta[3]));
  require(elapsed < 1e-3, "took " + format_number(elapsed) + " s");
}

void combine_literal() {
  require(std::fabs(combine(1, 1) - 0.5) <= 1e-12, "combine(1,1)");
  require(std::fabs(combine(0, 0)) <= 1e-12, "combine(0,0)");
  require(std::fabs(combine(0.5, 0.5) - 0.25) <= 1e-12, "combine(0.5,0.5)");
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const double e = i / 100.0, l = j / 100.0;
      const double mu = combine(e, l);
      require(std::fabs(mu - (0.80 * e + 0.20 * l) / 2) <= 1e-12, "mu off the literal formula");
      if (i > 0) require(mu > combine((i - 1) / 100.0, l), "mu not increasing in eta");
      if (j > 0) require(mu > combine(e, (j - 1) / 100.0), "mu not increasing in lambda");
    }
  }
}

void region_stats_oracle() {
  std::mt19937_64 rng(20240311);
  std::uniform_real_distribution<double> dist(0.0, 2.0);
  std::bernoulli_distribution coin(0.3);
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    OcclusionReport r;
    r.grid_rows = r.grid_cols = 10;
    r.distances.resize(100);
    for (auto& d : r.distances) d = dist(rng);
    std::vector<bool> mask(100);
    int in = 0;
    do {
      in = 0;
      for (std::size_t i = 0; i < 100; ++i) in += (mask[i] = coin(rng));
    } while (in == 0 || in == 100);
    double s_in = 0, s_out = 0;
    for (std::size_t i = 0; i < 100; ++i) (mask[i] ? s_in : s_out) += r.distances[i];
    const auto s = region_stats(r, mask);
    require(std::fabs(s.rmd - s_in / in) <= 1e-9, "rmd mismatch on trial " + std::to_string(trial));
    require(std::fabs(s.nrmd - s_out / (100 - in)) <= 1e-9, "nrmd mismatch on trial " + std::to_string(trial));
    require(s.region_cells == in && s.other_cells == 100 - in, "cell counts");
  }
  const double elapsed = seconds_since(t0);
  require(elapsed < 1.0, "took " + format_number(elapsed) + " s");
}

void cosine_distances() {
  const std::vector<double> u{0.3, -1.2, 2.5}, neg{-0.3, 1.2, -2.5}, e1{1, 0, 0}, e2{0, 1, 0};
  require(cosine_distance(u, u) == 0.0, "identity");
  require(cosine_distance(e1, e2) == 1.0, "orthogonal");
  require(cosine_distance(u, neg) == 2.0, "antipodal");
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> len(1, 64);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> a(static_cast<std::size_t>(len(rng))), b(a.size());
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    const double d = cosine_distance(a, b);
    require(d >= 0.0 && d <= 2.0, "distance " + format_number(d) + " out of range");
  }
}

void grid_tiling() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> side(10, 640);
  for (int i = 0; i < 500; ++i) {
    const int w = side(rng), h = side(rng);
    const auto cells = grid_cells(w, h, 100);
    require(cells.size() == 100, "cell count");
    long area = 0;
    std::vector<unsigned char> cover(static_cast<std::size_t>(w) * h, 0);
    for (const auto& c : cells) {
      area += static_cast<long>(c.rect.area());
      for (int y = c.rect.y; y < c.rect.y + c.rect.height; ++y)
        for (int x = c.rect.x; x < c.rect.x + c.rect.width; ++x) {
          require(x >= 0 && x < w && y >= 0 && y < h, "cell outside image");
          require(++cover[static_cast<std::size_t>(y) * w + x] == 1, "overlapping cells");
        }
    }
    require(area == static_cast<long>(w) * h, "area sum " + std::to_string(area) + " for " + std::to_string(w) +
                                                  "x" + std::to_string(h));
  }
}

void surrogate_physics() {
  const auto t0 = Clock::now();
  const auto square = run_surrogate(test::square_building(10.0, 1.0, 0.0), {1000.0, 0.0, 3.0});
  require(rel_close(square.envelope_load_kwh, 5280.0, 1e-6),
          "square building envelope " + format_number(square.envelope_load_kwh));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
  for (int i = 0; i < 200; ++i) {
    BuildingFeature f;
    f.floor_area_ft2 = between(800, 5000);
    f.params = {between(0.6, 1.0), between(1.5, 5.0), between(4, 30), between(10, 50), between(0.2, 3.0)};
    f.footprint = geometry::rectangle_footprint({between(-120, -70), between(30, 48)}, between(6, 25), between(6, 25));
    const Climate c{between(500, 6000), between(100, 2000), between(2.5, 3.5)};
    const auto base = run_surrogate(f, c);

    auto with = [&](double PerformanceParams::*m, double factor) {
      BuildingFeature g = f;
      g.params.*m *= factor;
      return run_surrogate(g, c, static_cast<int>(base.raw_outputs.at("stories")));
    };
    // Higher efficiency or resistance lowers energy; more infiltration raises it.
    require(with(&PerformanceParams::hvac_heating_cop, 1.1).hvac_energy_kwh < base.hvac_energy_kwh, "heating COP");
    require(with(&PerformanceParams::hvac_cooling_cop, 1.1).hvac_energy_kwh < base.hvac_energy_kwh, "cooling COP");
    for (auto m : {&PerformanceParams::wall_r_value, &PerformanceParams::roof_r_value}) {
      const auto r = with(m, 1.1);
      require(r.hvac_energy_kwh < base.hvac_energy_kwh && r.envelope_load_kwh < base.envelope_load_kwh, "R-value");
    }
    const auto leaky = with(&PerformanceParams::air_change_rate, 1.1);
    require(leaky.hvac_energy_kwh > base.hvac_energy_kwh && leaky.envelope_load_kwh > base.envelope_load_kwh, "ACH");

    // Linear in degree-days: E(a + b) = E(a) + E(b) and E(k a) = k E(a).
    const Climate heat{c.hdd, 0.0, c.story_height_m}, cool{0.0, c.cdd, c.story_height_m};
    const auto h = run_surrogate(f, heat), k = run_surrogate(f, cool);
    require(rel_close(h.envelope_load_kwh + k.envelope_load_kwh, base.envelope_load_kwh, 1e-12), "envelope additivity");
    require(rel_close(h.hvac_energy_kwh + k.hvac_energy_kwh, base.hvac_energy_kwh, 1e-12), "hvac additivity");
    const auto tripled = run_surrogate(f, {3 * c.hdd, 3 * c.cdd, c.story_height_m});
    require(rel_close(tripled.envelope_load_kwh, 3 * base.envelope_load_kwh, 1e-12), "envelope scaling");
    require(rel_close(tripled.hvac_energy_kwh, 3 * base.hvac_energy_kwh, 1e-12), "hvac scaling");
  }
  const double elapsed = seconds_since(t0);
  require(elapsed < 1.0, "took " + format_number(elapsed) + " s");
}

void generator_retry_protocol() {
  const std::string valid = read_text(test::fixture("feature_reference.geojson"));
  for (int k = 0; k <= 2; ++k) {
    int calls = 0;
    CallbackTextBackend b("flaky", [&](std::string_view) { return ++calls <= k ? std::string("{\"type\": ") : valid; });
    const auto out = generate_feature(b, "prompt", 3);
    require(b.calls() == k + 1, "k=" + std::to_string(k) + " took " + std::to_string(b.calls()) + " calls");
    require(out.attempts == k + 1, "attempt count");
    const auto again = validate_feature(json(out.feature).dump());
    require(again.ok() && again.violations.empty(), "returned feature fails validation");
  }
  for (int max_retries : {1, 3, 5}) {
    CallbackTextBackend never("never", [](std::string_view) { return std::string("not json at all"); });
    bool threw = false;
    try {
      generate_feature(never, "prompt", max_retries);
    } catch (const GenerationError&) {
      threw = true;
    }
    require(threw, "always-invalid mock did not error");
    require(never.calls() == max_retries, "always-invalid mock called " + std::to_string(never.calls()) +
                                              " times for max_retries " + std::to_string(max_retries));
  }
  MockFeatureGenerator gen;
  for (const auto& entry : std::filesystem::directory_iterator(test::fixture("homes"))) {
    if (entry.path().extension() != ".json") continue;
    const auto record = parse_home_record(json::parse(read_text(entry.path())));
    const auto prompt = build_generation_prompt(record, {"a two story house", "", "test"});
    const auto out = generate_feature(gen, prompt, 3, {}, validation_context_for(record));
    const auto check = validate_feature(json(out.feature).dump());
    require(check.ok() && check.violations.empty(), "mock feature for " + record.id + " fails validation");
  }
}

void ablation_trend() {
  CallbackTextBackend constant("constant", [](std::string_view) { return std::string("0.5"); });
  AblationConfig cfg;
  const auto d = default_performance_params();
  require(d.air_change_rate == 2.0 && d.hvac_heating_cop == 0.8 && d.hvac_cooling_cop == 3.0 &&
              d.wall_r_value == 13 && d.roof_r_value == 30 && kDefaultWindowU == 2.0,
          "defaults differ from the engine template values");
  const std::pair<AblationVariable, Category> cases[] = {{AblationVariable::hvacc, Category::hvac},
                                                         {AblationVariable::wallr, Category::insulation},
                                                         {AblationVariable::roofr, Category::insulation}};
  for (const auto& [var, cat] : cases) {
    const auto t = ablation_sim(constant, kNeutralNote, var, cfg);
    require(t.rows.size() == 5, "row count");
    const auto values = ablation_values(var);
    for (std::size_t i = 0; i < 5; ++i) {
      require(t.rows[i].params.*ablation_member(var) == values[i], "grid value");
      if (i == 0) continue;
      const auto prev = t.rows[i - 1].mu.at(cat).mean, cur = t.rows[i].mu.at(cat).mean;
      require(prev && cur && *cur < *prev,
              std::string(to_string(var)) + " " + std::string(to_string(cat)) + " mu not strictly decreasing at index " +
                  std::to_string(i + 1));
    }
  }
  require(ablation_values(AblationVariable::hvacc) == std::array<double, 5>{1.0, 2.0, 3.0, 3.5, 4.0}, "HVACC grid");
}

void combined_balance() {
  KeywordScoreBackend scorer;
  AblationConfig cfg;
  require(cfg.labeler.weights.heuristic == 0.80 && cfg.labeler.weights.text == 0.20, "weights");
  const std::pair<AblationVariable, Category> cases[] = {{AblationVariable::hvacc, Category::hvac},
                                                         {AblationVariable::roofr, Category::insulation}};
  for (const auto& [var, cat] : cases) {
    const auto t = combined_variation(scorer, var, cfg);
    require(t.rows.size() == 4, "row count");
    // rows: (efficient note, efficient sim), (efficient, inefficient), (inefficient, efficient), (inefficient, inefficient)
    double m[4];
    for (int i = 0; i < 4; ++i) {
      const auto mean = t.rows[static_cast<std::size_t>(i)].mu.at(cat).mean;
      require(mean.has_value(), "missing mean");
      m[i] = *mean;
    }
    const double lo = std::min(m[0], m[3]), hi = std::max(m[0], m[3]);
    for (int i : {1, 2})
      require(m[i] > lo && m[i] < hi, std::string(to_string(cat)) + " mixed row " + format_number(m[i]) +
                                          " outside (" + format_number(lo) + ", " + format_number(hi) + ")");
  }
}

void end_to_end() {
  const RunConfig cfg = parse_config(json::object(), [](std::string_view) { return std::nullopt; });
  test::TempDir a, b;
  const auto t0 = Clock::now();
  const auto ra = pipeline_run(cfg, test::fixture("homes"), a.path());
  const auto rb = pipeline_run(cfg, test::fixture("homes"), b.path());
  const double elapsed = seconds_since(t0);
  require(ra.exit_code == 0 && rb.exit_code == 0, "nonzero exit");
  const auto text = read_text(a / "labels.jsonl");
  require(text == read_text(b / "labels.jsonl"), "runs differ");
  std::istringstream in(text);
  int lines = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    const auto j = json::parse(line);
    require(j.size() == 4 && j.at("id").is_string() && j.at("inspection_note").is_string(), "line keys");
    const auto& s = j.at("simulation");
    require(s.at("hvac_energy_kwh").is_number() && s.at("envelope_load_kwh").is_number() && s.at("engine") == "surrogate",
            "simulation block");
    for (const char* cat : {"hvac", "insulation"}) {
      const auto& l = j.at("labels").at(cat);
      for (const char* k : {"lambda", "eta", "mu"}) {
        const double v = l.at(k).get<double>();
        require(v >= 0.0 && v <= 1.0, std::string(cat) + "." + k + " out of range");
      }
      require(std::fabs(l.at("mu").get<double>() - combine(l.at("eta"), l.at("lambda"))) <= 1e-12, "mu");
    }
  }
  require(lines == 5, std::to_string(lines) + " lines");
  require(elapsed < 10.0, "took " + format_number(elapsed) + " s");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void()>> criteria[] = {
      {"heuristic score worked example", heuristic_worked_example},
      {"literal weighted fusion", combine_literal},
      {"occlusion region statistics oracle", region_stats_oracle},
      {"cosine distance", cosine_distances},
      {"grid tiling", grid_tiling},
      {"surrogate physics", surrogate_physics},
      {"generator retry protocol", generator_retry_protocol},
      {"ablation trend", ablation_trend},
      {"combined-variation balance", combined_balance},
      {"end-to-end determinism", end_to_end},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    std::string why;
    try {
      fn();
    } catch (const Failure& f) {
      why = f.why;
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (why.empty()) {
      std::printf("PASS %2d %s\n", n, name);
    } else {
      std::printf("FAIL %2d %s: %s\n", n, name, why.c_str());
      ++failed;
    }
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
