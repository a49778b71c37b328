#pragma once

// Loading county records from disk, and the collector interface a live
// portal scraper implements.
//
// Dataset layout:
//   <dataset>/<id>.json             record document (snake_case county keys)
//   <dataset>/<id>_photo.(jpg|png)  street-view photo, optional
//   <dataset>/<id>_floorplan.(jpg|png)
// A document may instead name its images with "photo"/"floorplan" paths
// relative to the dataset directory.

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "synthhome/backend.hpp"
#include "synthhome/domain.hpp"

namespace synthhome {

struct FileIssue {
  std::filesystem::path file;
  std::string message;
  bool skipped = true;  // false: record kept, issue is a warning

  bool operator==(const FileIssue&) const = default;
};

struct LoadReport {
  std::vector<HomeRecord> records;  // sorted by id
  std::vector<FileIssue> issues;    // sorted by file name
};

// Throws InputError if `directory` is missing. Malformed files are skipped
// and named in the report. Image paths in returned records are absolute.
LoadReport load_home_records(const std::filesystem::path& directory, std::size_t workers = 4);

// ---------------------------------------------------------------------------

struct ScrapedProperty {
  std::string record_json;
  std::vector<std::uint8_t> photo;
  std::string photo_ext = "jpg";
  std::vector<std::uint8_t> floorplan;
  std::string floorplan_ext = "jpg";
};

class ScrapeBackend {
 public:
  virtual ~ScrapeBackend() = default;
  virtual std::string id() const = 0;
  // Every residential property on `street`. Throws TransportError on
  // retryable network failure.
  virtual std::vector<ScrapedProperty> list_street(std::string_view street) = 0;
  virtual RetryPolicy retry_policy() const { return {}; }
};

// Serves canned properties; can be told to fail the first N calls.
class FixtureScrapeBackend final : public ScrapeBackend {
 public:
  std::string id() const override { return "fixture-scrape"; }
  std::vector<ScrapedProperty> list_street(std::string_view street) override;
  RetryPolicy retry_policy() const override { return {3, std::chrono::milliseconds(0), 1.0}; }

  void add(std::string street, ScrapedProperty property);
  void fail_next_calls(int n);
  int calls() const;

  // Adds one street per subdirectory of `root`, each in the dataset layout
  // above. The subdirectory name is the street name.
  void add_directory(const std::filesystem::path& root);

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<ScrapedProperty>, std::less<>> streets_;
  int pending_failures_ = 0;
  int calls_ = 0;
};

// Fetches a street through `backend` (with its retry policy), writes records
// and images into `workdir` in the dataset layout, and returns the parsed
// records. Unparseable properties are skipped and reported.
LoadReport fetch_street(ScrapeBackend& backend, std::string_view street,
                        const std::filesystem::path& workdir);

}  // namespace synthhome
