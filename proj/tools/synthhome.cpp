// synthhome: command line entry point for every pipeline stage and the
// evaluation harness.
//
// Exit codes: 0 success, 1 nothing produced (no home labeled, every home
// failed), 2 invalid configuration or missing upstream artifacts.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "synthhome/ablation.hpp"
#include "synthhome/config.hpp"
#include "synthhome/error.hpp"
#include "synthhome/occlusion.hpp"
#include "synthhome/pipeline.hpp"
#include "synthhome/util.hpp"

namespace fs = std::filesystem;
using namespace synthhome;

namespace {

struct Overrides {
  std::string config_path;
  std::string engine;
  std::string weather;
  std::string engine_home;
  std::optional<double> hdd;
  std::optional<double> cdd;
  bool normalized_mu = false;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Run configuration (JSON); defaults to all-mock backends");
  cmd->add_option("--workers", o.workers, "Worker threads (overrides config parallelism)");
}

void add_engine(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--engine", o.engine, "surrogate | external")->check(CLI::IsMember({"surrogate", "external"}));
  cmd->add_option("--weather", o.weather, "Weather file (.epw) for the external engine");
  cmd->add_option("--engine-home", o.engine_home, "Directory holding the engine binaries");
  cmd->add_option("--hdd", o.hdd, "Heating degree-days for the surrogate (degC.day)");
  cmd->add_option("--cdd", o.cdd, "Cooling degree-days for the surrogate (degC.day)");
}

void add_labeler(CLI::App* cmd, Overrides& o) {
  cmd->add_flag("--normalized-mu", o.normalized_mu, "Report 2*mu so ratings span [0, 1]");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? parse_config(nlohmann::json()) : load_config(o.config_path);
  if (!o.engine.empty()) c.engine.kind = engine_kind_from_string(o.engine);
  if (!o.weather.empty()) c.engine.external.weather = o.weather;
  if (!o.engine_home.empty()) c.engine.external.engine_home = o.engine_home;
  if (o.hdd) c.climate.hdd = *o.hdd;
  if (o.cdd) c.climate.cdd = *o.cdd;
  if (c.climate.hdd < 0 || c.climate.cdd < 0) throw ConfigError("degree-days must be non-negative");
  if (o.normalized_mu) c.labeler.normalized_mu = true;
  if (o.workers) c.parallelism = std::max<std::size_t>(1, *o.workers);
  if (c.engine.kind == EngineKind::external && c.engine.external.weather.empty())
    throw ConfigError("the external engine needs --weather");
  return c;
}

int stage_exit(const StageReport& r) {
  std::cout << r.stage << ": " << r.succeeded << "/" << r.processed << " ok";
  if (!r.failures.empty()) std::cout << ", " << r.failures.size() << " failed";
  std::cout << " (" << format_fixed(r.seconds, 2) << " s)\n";
  for (const auto& f : r.failures) std::cerr << "  " << f.id << ": " << f.error << "\n";
  for (const auto& w : r.warnings) std::cerr << "  warning: " << w << "\n";
  return r.processed > 0 && r.succeeded == 0 ? 1 : 0;
}

fs::path sibling(const fs::path& dir, std::string_view name) {
  return dir.lexically_normal().parent_path() / name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic home energy dataset pipeline"};
  app.require_subcommand(1);
  Overrides o;
  std::function<int()> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Normalize a dataset directory of county records");
  std::string ingest_in, ingest_out;
  ingest->add_option("--in,--dataset", ingest_in, "Dataset directory")->required();
  ingest->add_option("--out", ingest_out, "Output directory")->required();
  add_common(ingest, o);
  ingest->callback([&] {
    action = [&] { return stage_exit(stage_ingest(ingest_in, ingest_out, resolve(o))); };
  });

  // describe
  auto* describe = app.add_subcommand("describe", "Describe each home's photo and floor plan");
  std::string describe_in, describe_out;
  describe->add_option("--in", describe_in, "Ingest directory")->required();
  describe->add_option("--out", describe_out, "Output directory")->required();
  add_common(describe, o);
  describe->callback([&] {
    action = [&] {
      const auto cfg = resolve(o);
      auto vision = make_vision_backend(cfg.vision);
      return stage_exit(stage_describe(describe_in, describe_out, cfg, *vision));
    };
  });

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a building feature per home");
  std::string generate_in, generate_desc, generate_out;
  generate->add_option("--in", generate_in, "Ingest directory")->required();
  generate->add_option("--descriptions", generate_desc, "Descriptions directory (default: ../descriptions)");
  generate->add_option("--out", generate_out, "Output directory")->required();
  add_common(generate, o);
  generate->callback([&] {
    action = [&] {
      const auto cfg = resolve(o);
      auto gen = make_generator_backend(cfg.generator);
      const fs::path desc = generate_desc.empty() ? sibling(generate_in, "descriptions") : fs::path(generate_desc);
      return stage_exit(stage_generate(generate_in, desc, generate_out, cfg, *gen));
    };
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate every feature");
  std::string simulate_in, simulate_out;
  simulate->add_option("--in", simulate_in, "Features directory")->required();
  simulate->add_option("--out", simulate_out, "Output directory")->required();
  add_common(simulate, o);
  add_engine(simulate, o);
  simulate->callback([&] {
    action = [&] { return stage_exit(stage_simulate(simulate_in, simulate_out, resolve(o))); };
  });

  // label
  auto* label = app.add_subcommand("label", "Score and label simulated homes");
  std::string label_in, label_features, label_out;
  label->add_option("--in", label_in, "Simulations directory")->required();
  label->add_option("--features", label_features, "Features directory (default: ../features)");
  label->add_option("--out", label_out, "Output JSONL path")->required();
  add_common(label, o);
  add_labeler(label, o);
  label->callback([&] {
    action = [&] {
      const auto cfg = resolve(o);
      auto scorer = make_scorer_backend(cfg.scorer);
      const fs::path features = label_features.empty() ? sibling(label_in, "features") : fs::path(label_features);
      return stage_exit(stage_label(label_in, features, label_out, cfg, *scorer));
    };
  });

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
  std::string pipeline_dataset, pipeline_out;
  pipeline->add_option("--dataset", pipeline_dataset, "Dataset directory")->required();
  pipeline->add_option("--out", pipeline_out, "Workspace directory")->required();
  add_common(pipeline, o);
  add_engine(pipeline, o);
  add_labeler(pipeline, o);
  pipeline->callback([&] {
    action = [&] {
      const auto result = pipeline_run(resolve(o), pipeline_dataset, pipeline_out);
      for (const auto& s : result.stages) stage_exit(s);
      std::cout << "labeled " << result.labeled << " homes -> " << result.labels_path.string() << "\n";
      return result.exit_code;
    };
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluation harness");
  eval->require_subcommand(1);

  auto* occl = eval->add_subcommand("occlusion", "Occlusion sensitivity of the vision backend");
  std::string occl_image, occl_mask, occl_out, occl_prompt{kFacadePrompt};
  int occl_cells = 100;
  occl->add_option("--image", occl_image, "Image to occlude")->required()->check(CLI::ExistingFile);
  occl->add_option("--mask", occl_mask, "Region mask CSV (default: <image stem>.mask.csv if present)");
  occl->add_option("--cells", occl_cells, "Grid cells (a perfect square)")->capture_default_str();
  occl->add_option("--prompt", occl_prompt, "Vision prompt");
  occl->add_option("--out", occl_out, "Output directory (default: next to the image)");
  add_common(occl, o);
  occl->callback([&] {
    action = [&] {
      const auto cfg = resolve(o);
      auto vision = make_vision_backend(cfg.vision);
      auto embed = make_embedding_backend(cfg.embedder);
      const fs::path image(occl_image);
      const auto bytes = read_binary(image);
      OcclusionOptions opts;
      opts.cells = occl_cells;
      opts.workers = cfg.parallelism;
      opts.image_id = image.stem().string();
      auto report = occlusion_run(bytes, occl_prompt, *vision, *embed, opts);

      fs::path mask_path = occl_mask.empty() ? mask_sidecar_path(image) : fs::path(occl_mask);
      if (fs::is_regular_file(mask_path)) {
        report.region_mask = parse_region_mask(read_text(mask_path), report.grid_rows, report.grid_cols);
        const auto stats = region_stats(report, *report.region_mask);
        report.rmd = stats.rmd;
        report.nrmd = stats.nrmd;
        std::cout << "RMD " << format_fixed(stats.rmd, 6) << " over " << stats.region_cells << " cells, NRMD "
                  << format_fixed(stats.nrmd, 6) << " over " << stats.other_cells << " cells\n";
      } else if (!occl_mask.empty()) {
        throw InputError("mask not found: " + occl_mask);
      }
      const fs::path out = occl_out.empty() ? image.parent_path() : fs::path(occl_out);
      const auto stem = image.stem().string();
      render_heatmap(report, out / (stem + ".distances.csv"), out / (stem + ".heatmap.png"));
      write_text(out / (stem + ".occlusion.json"), json(report).dump(2) + "\n");
      std::cout << "wrote " << (out / (stem + ".heatmap.png")).string() << "\n";
      return 0;
    };
  });

  auto* abl = eval->add_subcommand("ablation", "Ablation and combined-variation tables");
  std::string abl_mode = "sim", abl_variable = "HVACC", abl_out, abl_note;
  int abl_trials = 5;
  abl->add_option("--mode", abl_mode, "text | sim | combined")
      ->check(CLI::IsMember({"text", "sim", "combined"}))
      ->capture_default_str();
  abl->add_option("--variable", abl_variable, "WALLR | ROOFR | HVACH | HVACC")->capture_default_str();
  abl->add_option("--trials", abl_trials, "Trials per row")->capture_default_str()->check(CLI::PositiveNumber);
  abl->add_option("--note", abl_note, "Fixed note for --mode sim (default: neutral note)");
  abl->add_option("--out", abl_out, "CSV output path (default: stdout)");
  add_common(abl, o);
  add_engine(abl, o);
  add_labeler(abl, o);
  abl->callback([&] {
    action = [&] {
      const auto cfg = resolve(o);
      auto scorer = make_scorer_backend(cfg.scorer);
      AblationConfig ac;
      ac.labeler = cfg.labeler;
      ac.trials = abl_trials;
      ac.climate = cfg.climate;
      AblationTable table;
      if (abl_mode == "text") {
        const auto fixed = run_surrogate(reference_building(default_performance_params()), cfg.climate);
        table = ablation_text(*scorer, default_ablation_notes(), fixed, ac);
      } else if (abl_mode == "sim") {
        table = ablation_sim(*scorer, abl_note.empty() ? std::string(kNeutralNote) : abl_note,
                             ablation_variable_from_string(abl_variable), ac);
      } else {
        table = combined_variation(*scorer, ablation_variable_from_string(abl_variable), ac);
      }
      for (const auto& w : table.warnings) std::cerr << "warning: " << w << "\n";
      if (abl_out.empty()) std::cout << table.csv();
      else write_text(abl_out, table.csv());
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    return action ? action() : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const UpstreamMissing& e) {
    std::cerr << "missing input: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
