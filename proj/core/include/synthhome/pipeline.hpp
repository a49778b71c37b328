#pragma once

// Stage runners and the end-to-end pipeline. Every stage reads and writes
// plain files so any one of them can be replayed or swapped:
//
//   <out>/ingest/<id>.json           normalized county record
//   <out>/ingest/issues.jsonl        skipped or suspicious dataset files
//   <out>/descriptions/<id>.json     {"id", "description": {...}}
//   <out>/features/<id>.geojson      generated building feature
//   <out>/features/generation.jsonl  attempts and warnings per home
//   <out>/simulations/<id>.json      simulation result
//   <out>/labels.jsonl               labeled dataset
//   <out>/labels.errors.jsonl        homes the labeler could not score
//   <out>/labels.meta.json           extremes per category, warnings
//   <out>/manifest.json              config hash, backends, timings, call counts
//
// Each stage's per-home failures go to errors.jsonl in its directory.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "synthhome/config.hpp"

namespace synthhome {

// Raised when a stage's input artifacts are missing. Maps to exit code 2.
class UpstreamMissing : public InputError {
 public:
  using InputError::InputError;
};

struct HomeFailure {
  std::string id;
  std::string stage;
  std::string error;
};

struct StageReport {
  std::string stage;
  int processed = 0;
  int succeeded = 0;
  std::vector<HomeFailure> failures;
  std::vector<std::string> warnings;
  // Requests actually sent to each backend, retries included.
  std::map<std::string, int> backend_calls;
  // Per home: "vision_requests", "generation_attempts", ...
  std::map<std::string, std::map<std::string, int>> per_home;
  double seconds = 0.0;
};

StageReport stage_ingest(const std::filesystem::path& dataset, const std::filesystem::path& out, const RunConfig& config);
StageReport stage_describe(const std::filesystem::path& ingest_dir, const std::filesystem::path& out,
                           const RunConfig& config, VisionBackend& vision);
StageReport stage_generate(const std::filesystem::path& ingest_dir, const std::filesystem::path& descriptions_dir,
                           const std::filesystem::path& out, const RunConfig& config, TextBackend& generator);
StageReport stage_simulate(const std::filesystem::path& features_dir, const std::filesystem::path& out,
                           const RunConfig& config);
StageReport stage_label(const std::filesystem::path& simulations_dir, const std::filesystem::path& features_dir,
                        const std::filesystem::path& out_jsonl, const RunConfig& config, TextBackend& scorer);

struct PipelineBackends {
  VisionBackend* vision = nullptr;
  TextBackend* generator = nullptr;
  TextBackend* scorer = nullptr;
};

struct PipelineResult {
  int exit_code = 0;  // 0: at least one home labeled, 1: none
  int labeled = 0;
  std::vector<StageReport> stages;
  std::filesystem::path labels_path;
  std::filesystem::path manifest_path;
};

// Runs every stage into `out`. Backends default to those the config names.
PipelineResult pipeline_run(const RunConfig& config, const std::filesystem::path& dataset,
                            const std::filesystem::path& out, PipelineBackends backends = {});

}  // namespace synthhome
