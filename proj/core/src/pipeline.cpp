#include "synthhome/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>

#include "synthhome/concurrency.hpp"
#include "synthhome/error.hpp"
#include "synthhome/genjson.hpp"
#include "synthhome/ingest.hpp"
#include "synthhome/util.hpp"
#include "synthhome/vision.hpp"

namespace fs = std::filesystem;

namespace synthhome {

namespace {

using Clock = std::chrono::steady_clock;

// Counts every request that reaches the wrapped backend.
class CountingVision final : public VisionBackend {
 public:
  explicit CountingVision(VisionBackend& inner) : inner_(inner) {}
  std::string id() const override { return inner_.id(); }
  std::string describe(std::span<const std::uint8_t> image, std::string_view prompt) override {
    ++calls;
    return inner_.describe(image, prompt);
  }
  RetryPolicy retry_policy() const override { return inner_.retry_policy(); }
  std::atomic<int> calls{0};

 private:
  VisionBackend& inner_;
};

class CountingText final : public TextBackend {
 public:
  explicit CountingText(TextBackend& inner) : inner_(inner) {}
  std::string id() const override { return inner_.id(); }
  std::string generate(std::string_view prompt, const GenerationOptions& options) override {
    ++calls;
    return inner_.generate(prompt, options);
  }
  RetryPolicy retry_policy() const override { return inner_.retry_policy(); }
  std::atomic<int> calls{0};

 private:
  TextBackend& inner_;
};

void require_dir(const fs::path& dir, std::string_view what) {
  if (!fs::is_directory(dir)) throw UpstreamMissing(std::string(what) + " directory not found: " + dir.string());
}

// Files with `ext` in `dir`, sorted by name.
std::vector<fs::path> files_with_ext(const fs::path& dir, std::string_view ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void write_failures(const fs::path& dir, const std::vector<HomeFailure>& failures) {
  std::string text;
  for (const auto& f : failures) {
    nlohmann::ordered_json j;
    j["id"] = f.id;
    j["stage"] = f.stage;
    j["error"] = f.error;
    text += j.dump() + "\n";
  }
  write_text(dir / "errors.jsonl", text);
}

std::vector<HomeRecord> load_records(const fs::path& ingest_dir, std::vector<std::string>* warnings,
                                     std::size_t workers) {
  require_dir(ingest_dir, "ingest");
  auto report = load_home_records(ingest_dir, workers);
  if (warnings)
    for (const auto& i : report.issues) warnings->push_back(i.file.filename().string() + ": " + i.message);
  return std::move(report.records);
}

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

}  // namespace

StageReport stage_ingest(const fs::path& dataset, const fs::path& out, const RunConfig& config) {
  const auto start = Clock::now();
  StageReport rep;
  rep.stage = "ingest";
  if (!fs::is_directory(dataset)) throw UpstreamMissing("dataset directory not found: " + dataset.string());
  auto loaded = load_home_records(dataset, config.parallelism);
  fs::create_directories(out);
  for (const auto& old : files_with_ext(out, ".json")) fs::remove(old);
  std::string issues;
  for (const auto& i : loaded.issues) {
    nlohmann::ordered_json j;
    j["file"] = i.file.filename().string();
    j["message"] = i.message;
    j["skipped"] = i.skipped;
    issues += j.dump() + "\n";
    rep.warnings.push_back(i.file.filename().string() + ": " + i.message);
    if (i.skipped) rep.failures.push_back({i.file.stem().string(), "ingest", i.message});
  }
  write_text(out / "issues.jsonl", issues);
  for (const auto& r : loaded.records) {
    json j = r;
    write_text(out / (r.id + ".json"), j.dump(2) + "\n");
  }
  rep.processed = static_cast<int>(loaded.records.size() + loaded.issues.size());
  rep.succeeded = static_cast<int>(loaded.records.size());
  rep.seconds = since(start);
  return rep;
}

StageReport stage_describe(const fs::path& ingest_dir, const fs::path& out, const RunConfig& config,
                           VisionBackend& vision) {
  const auto start = Clock::now();
  StageReport rep;
  rep.stage = "describe";
  const auto records = load_records(ingest_dir, nullptr, config.parallelism);
  CountingVision counted(vision);
  auto results = parallel_map(
      records,
      [&](const HomeRecord& r) {
        if (!r.has_any_image()) return ImageDescription{"", "", "none"};
        return describe_home(counted, r, config.prompts);
      },
      config.parallelism);
  fs::create_directories(out);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    ++rep.processed;
    rep.per_home[r.id]["vision_requests"] =
        (r.photo_path ? 1 : 0) + (r.floorplan_path ? 1 : 0);
    if (!results[i].ok()) {
      try {
        std::rethrow_exception(results[i].error);
      } catch (const std::exception& e) {
        rep.failures.push_back({r.id, "describe", e.what()});
      }
      continue;
    }
    if (!r.has_any_image()) rep.warnings.push_back(r.id + ": no images; generating from county data only");
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["description"] = json(*results[i].value);
    write_text(out / (r.id + ".json"), j.dump(2) + "\n");
    ++rep.succeeded;
  }
  write_failures(out, rep.failures);
  rep.backend_calls[vision.id()] = counted.calls.load();
  rep.seconds = since(start);
  return rep;
}

StageReport stage_generate(const fs::path& ingest_dir, const fs::path& descriptions_dir, const fs::path& out,
                           const RunConfig& config, TextBackend& generator) {
  const auto start = Clock::now();
  StageReport rep;
  rep.stage = "generate";
  const auto records = load_records(ingest_dir, nullptr, config.parallelism);
  require_dir(descriptions_dir, "descriptions");
  CountingText counted(generator);

  struct Input {
    const HomeRecord* record;
    std::optional<ImageDescription> desc;
  };
  std::vector<Input> inputs;
  for (const auto& r : records) {
    Input in{&r, std::nullopt};
    const auto p = descriptions_dir / (r.id + ".json");
    if (fs::is_regular_file(p)) in.desc = json::parse(read_text(p)).at("description").get<ImageDescription>();
    inputs.push_back(std::move(in));
  }

  auto results = parallel_map(
      inputs,
      [&](const Input& in) {
        if (!in.desc) throw UpstreamMissing("no description");
        const auto prompt = build_generation_prompt(*in.record, *in.desc);
        return generate_feature(counted, prompt, config.max_retries, config.generation,
                                validation_context_for(*in.record));
      },
      config.parallelism);

  fs::create_directories(out);
  for (const auto& old : files_with_ext(out, ".geojson")) fs::remove(old);
  std::string log;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& id = inputs[i].record->id;
    ++rep.processed;
    nlohmann::ordered_json entry;
    entry["id"] = id;
    if (!results[i].ok()) {
      try {
        std::rethrow_exception(results[i].error);
      } catch (const GenerationError& e) {
        rep.per_home[id]["generation_attempts"] = e.attempts();
        rep.failures.push_back({id, "generate", e.what()});
        entry["attempts"] = e.attempts();
        entry["violations"] = e.violations();
      } catch (const std::exception& e) {
        rep.failures.push_back({id, "generate", e.what()});
        entry["error"] = e.what();
      }
      log += entry.dump() + "\n";
      continue;
    }
    const auto& outcome = *results[i].value;
    rep.per_home[id]["generation_attempts"] = outcome.attempts;
    entry["attempts"] = outcome.attempts;
    entry["warnings"] = outcome.warnings;
    log += entry.dump() + "\n";
    for (const auto& w : outcome.warnings) rep.warnings.push_back(id + ": " + w);
    json f = outcome.feature;
    write_text(out / (id + ".geojson"), f.dump(2) + "\n");
    ++rep.succeeded;
  }
  write_text(out / "generation.jsonl", log);
  write_failures(out, rep.failures);
  rep.backend_calls[generator.id()] = counted.calls.load();
  rep.seconds = since(start);
  return rep;
}

StageReport stage_simulate(const fs::path& features_dir, const fs::path& out, const RunConfig& config) {
  const auto start = Clock::now();
  StageReport rep;
  rep.stage = "simulate";
  require_dir(features_dir, "features");
  const auto files = files_with_ext(features_dir, ".geojson");

  std::optional<IdfTemplate> tmpl;
  if (config.engine.kind == EngineKind::external) {
    tmpl = config.engine.template_path ? IdfTemplate::from_file(*config.engine.template_path) : IdfTemplate::builtin();
    check_template(*tmpl);
  }

  auto results = parallel_map(
      files,
      [&](const fs::path& file) {
        const auto feature = json::parse(read_text(file)).get<BuildingFeature>();
        if (config.engine.kind == EngineKind::surrogate) return run_surrogate(feature, config.climate);
        return run_external(render_idf(idf_values(feature, config.climate.story_height_m), *tmpl),
                            config.engine.external);
      },
      config.parallelism);

  fs::create_directories(out);
  for (const auto& old : files_with_ext(out, ".json")) fs::remove(old);
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto id = files[i].stem().string();
    ++rep.processed;
    if (!results[i].ok()) {
      try {
        std::rethrow_exception(results[i].error);
      } catch (const std::exception& e) {
        rep.failures.push_back({id, "simulate", e.what()});
      }
      continue;
    }
    json j = *results[i].value;
    write_text(out / (id + ".json"), j.dump(2) + "\n");
    ++rep.succeeded;
  }
  write_failures(out, rep.failures);
  rep.seconds = since(start);
  return rep;
}

StageReport stage_label(const fs::path& simulations_dir, const fs::path& features_dir, const fs::path& out_jsonl,
                        const RunConfig& config, TextBackend& scorer) {
  const auto start = Clock::now();
  StageReport rep;
  rep.stage = "label";
  require_dir(simulations_dir, "simulations");
  require_dir(features_dir, "features");
  const auto files = files_with_ext(simulations_dir, ".json");
  if (files.empty()) throw UpstreamMissing("no simulation results in " + simulations_dir.string());

  std::vector<HomeToLabel> homes;
  for (const auto& file : files) {
    const auto id = file.stem().string();
    try {
      HomeToLabel h;
      h.id = id;
      h.simulation = json::parse(read_text(file)).get<SimulationResult>();
      const auto feature_path = features_dir / (id + ".geojson");
      if (!fs::is_regular_file(feature_path)) throw UpstreamMissing("no feature for simulated home");
      h.inspection_note = json::parse(read_text(feature_path)).get<BuildingFeature>().inspection_note;
      homes.push_back(std::move(h));
    } catch (const std::exception& e) {
      rep.failures.push_back({id, "label", e.what()});
    }
  }

  CountingText counted(scorer);
  const LabelRun run = label_dataset(homes, counted, config.labeler, config.parallelism);
  write_label_outputs(run, out_jsonl);
  rep.processed = static_cast<int>(files.size());
  rep.succeeded = static_cast<int>(run.lines.size());
  for (const auto& e : run.errors) {
    const auto j = json::parse(e);
    rep.failures.push_back({j.at("id").get<std::string>(), "label", j.at("error").get<std::string>()});
  }
  rep.warnings = run.warnings;
  for (const auto& h : homes) rep.per_home[h.id]["score_requests"] = static_cast<int>(kCategories.size());
  rep.backend_calls[scorer.id()] = counted.calls.load();
  rep.seconds = since(start);
  return rep;
}

namespace {

nlohmann::ordered_json stage_json(const StageReport& s) {
  nlohmann::ordered_json j;
  j["stage"] = s.stage;
  j["processed"] = s.processed;
  j["succeeded"] = s.succeeded;
  j["seconds"] = s.seconds;
  j["backend_calls"] = s.backend_calls;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& f : s.failures) failures.push_back({{"id", f.id}, {"error", f.error}});
  j["failures"] = std::move(failures);
  j["warnings"] = s.warnings;
  return j;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

PipelineResult pipeline_run(const RunConfig& config, const fs::path& dataset, const fs::path& out,
                            PipelineBackends backends) {
  std::unique_ptr<VisionBackend> own_vision;
  std::unique_ptr<TextBackend> own_generator, own_scorer;
  if (!backends.vision) backends.vision = (own_vision = make_vision_backend(config.vision)).get();
  if (!backends.generator) backends.generator = (own_generator = make_generator_backend(config.generator)).get();
  if (!backends.scorer) backends.scorer = (own_scorer = make_scorer_backend(config.scorer)).get();

  const auto start = Clock::now();
  const auto started_at = utc_now();
  PipelineResult result;
  result.labels_path = out / "labels.jsonl";
  result.manifest_path = out / "manifest.json";

  result.stages.push_back(stage_ingest(dataset, out / "ingest", config));
  result.stages.push_back(stage_describe(out / "ingest", out / "descriptions", config, *backends.vision));
  result.stages.push_back(
      stage_generate(out / "ingest", out / "descriptions", out / "features", config, *backends.generator));
  result.stages.push_back(stage_simulate(out / "features", out / "simulations", config));

  nlohmann::ordered_json extremes = nlohmann::ordered_json::object();
  if (result.stages.back().succeeded > 0) {
    result.stages.push_back(
        stage_label(out / "simulations", out / "features", result.labels_path, config, *backends.scorer));
    result.labeled = result.stages.back().succeeded;
    const auto meta = json::parse(read_text(out / "labels.meta.json"));
    for (const auto& [k, v] : meta.at("extremes").items()) extremes[k] = v;
  } else {
    // Nothing to label: leave empty outputs so consumers see a finished run.
    write_label_outputs(LabelRun{}, result.labels_path);
  }
  result.exit_code = result.labeled > 0 ? 0 : 1;

  nlohmann::ordered_json manifest;
  manifest["started_at"] = started_at;
  manifest["config_hash"] = config.hash();
  manifest["config"] = config.to_json();
  manifest["dataset"] = fs::absolute(dataset).lexically_normal().string();
  manifest["backends"] = {{"vision", backends.vision->id()},
                          {"generator", backends.generator->id()},
                          {"scorer", backends.scorer->id()},
                          {"engine", std::string(to_string(config.engine.kind))}};
  manifest["extremes"] = std::move(extremes);
  manifest["labeled"] = result.labeled;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  std::map<std::string, std::map<std::string, int>> per_home;
  for (const auto& s : result.stages) {
    stages.push_back(stage_json(s));
    for (const auto& [id, counts] : s.per_home)
      for (const auto& [k, v] : counts) per_home[id][k] = v;
  }
  manifest["stages"] = std::move(stages);
  manifest["per_home_requests"] = per_home;
  manifest["total_seconds"] = since(start);
  manifest["exit_code"] = result.exit_code;
  write_text(result.manifest_path, manifest.dump(2) + "\n");
  return result;
}

}  // namespace synthhome
