#include "synthhome/ingest.hpp"

#include <algorithm>
#include <set>

#include "synthhome/concurrency.hpp"
#include "synthhome/error.hpp"
#include "synthhome/util.hpp"

namespace fs = std::filesystem;

namespace synthhome {

namespace {

constexpr std::array<std::string_view, 2> kImageExtensions{"jpg", "png"};

std::optional<fs::path> find_image(const fs::path& dir, const std::string& id, std::string_view role) {
  for (auto ext : kImageExtensions) {
    fs::path candidate = dir / (id + "_" + std::string(role) + "." + std::string(ext));
    if (fs::is_regular_file(candidate)) return fs::absolute(candidate).lexically_normal();
  }
  return std::nullopt;
}

struct ParsedFile {
  std::optional<HomeRecord> record;
  std::vector<FileIssue> issues;
};

ParsedFile parse_record_file(const fs::path& file) {
  ParsedFile out;
  const fs::path dir = file.parent_path();
  try {
    auto doc = json::parse(read_text(file));
    HomeRecord record = parse_home_record(doc);
    auto resolve = [&](std::optional<fs::path>& slot, std::string_view role) {
      if (slot) {
        fs::path p = slot->is_absolute() ? *slot : dir / *slot;
        if (fs::is_regular_file(p)) {
          slot = fs::absolute(p).lexically_normal();
        } else {
          out.issues.push_back({file, std::string(role) + " image not found: " + slot->string(), false});
          slot.reset();
        }
      } else {
        slot = find_image(dir, record.id, role);
      }
    };
    resolve(record.photo_path, "photo");
    resolve(record.floorplan_path, "floorplan");
    out.record = std::move(record);
  } catch (const json::exception& e) {
    out.issues.push_back({file, std::string("unparseable JSON: ") + e.what(), true});
  } catch (const Error& e) {
    out.issues.push_back({file, e.what(), true});
  }
  return out;
}

LoadReport merge(std::vector<fs::path> files, std::vector<ParsedFile> parsed) {
  LoadReport report;
  std::set<std::string> seen;
  // Files are already in name order, so a duplicate id keeps the first file.
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    for (auto& issue : parsed[i].issues) report.issues.push_back(std::move(issue));
    if (!parsed[i].record) continue;
    if (!seen.insert(parsed[i].record->id).second) {
      report.issues.push_back({files[i], "duplicate id \"" + parsed[i].record->id + "\"", true});
      continue;
    }
    report.records.push_back(std::move(*parsed[i].record));
  }
  std::sort(report.records.begin(), report.records.end(),
            [](const HomeRecord& a, const HomeRecord& b) { return a.id < b.id; });
  std::stable_sort(report.issues.begin(), report.issues.end(),
                   [](const FileIssue& a, const FileIssue& b) { return a.file < b.file; });
  return report;
}

}  // namespace

LoadReport load_home_records(const fs::path& directory, std::size_t workers) {
  if (!fs::is_directory(directory)) {
    throw InputError("dataset directory does not exist: " + directory.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  auto outcomes = parallel_map(files, parse_record_file, workers);
  std::vector<ParsedFile> parsed;
  parsed.reserve(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].ok()) {
      parsed.push_back(std::move(*outcomes[i].value));
    } else {
      ParsedFile failed;
      try {
        std::rethrow_exception(outcomes[i].error);
      } catch (const std::exception& e) {
        failed.issues.push_back({files[i], e.what(), true});
      }
      parsed.push_back(std::move(failed));
    }
  }
  return merge(std::move(files), std::move(parsed));
}

// ---------------------------------------------------------------------------

std::vector<ScrapedProperty> FixtureScrapeBackend::list_street(std::string_view street) {
  std::lock_guard lock(mu_);
  ++calls_;
  if (pending_failures_ > 0) {
    --pending_failures_;
    throw TransportError("fixture backend: simulated network failure");
  }
  auto it = streets_.find(street);
  if (it == streets_.end()) return {};
  return it->second;
}

void FixtureScrapeBackend::add(std::string street, ScrapedProperty property) {
  std::lock_guard lock(mu_);
  streets_[std::move(street)].push_back(std::move(property));
}

void FixtureScrapeBackend::fail_next_calls(int n) {
  std::lock_guard lock(mu_);
  pending_failures_ = n;
}

int FixtureScrapeBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

void FixtureScrapeBackend::add_directory(const fs::path& root) {
  if (!fs::is_directory(root)) throw InputError("fixture directory does not exist: " + root.string());
  std::vector<fs::path> streets;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) streets.push_back(entry.path());
  }
  std::sort(streets.begin(), streets.end());
  for (const auto& street_dir : streets) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(street_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      ScrapedProperty prop;
      prop.record_json = read_text(file);
      const std::string stem = file.stem().string();
      for (auto ext : kImageExtensions) {
        fs::path photo = street_dir / (stem + "_photo." + std::string(ext));
        if (fs::is_regular_file(photo)) {
          prop.photo = read_binary(photo);
          prop.photo_ext = ext;
        }
        fs::path plan = street_dir / (stem + "_floorplan." + std::string(ext));
        if (fs::is_regular_file(plan)) {
          prop.floorplan = read_binary(plan);
          prop.floorplan_ext = ext;
        }
      }
      add(street_dir.filename().string(), std::move(prop));
    }
  }
}

LoadReport fetch_street(ScrapeBackend& backend, std::string_view street, const fs::path& workdir) {
  auto properties = with_retries(backend.retry_policy(), "fetch_street " + std::string(street),
                                 [&] { return backend.list_street(street); });
  fs::create_directories(workdir);
  LoadReport report;
  for (std::size_t i = 0; i < properties.size(); ++i) {
    const auto& prop = properties[i];
    const fs::path label = "property #" + std::to_string(i);
    try {
      auto doc = json::parse(prop.record_json);
      HomeRecord record = parse_home_record(doc);
      // Image references are rewritten to the materialized files.
      doc.erase("photo");
      doc.erase("floorplan");
      record.photo_path.reset();
      record.floorplan_path.reset();
      if (!prop.photo.empty()) {
        const fs::path p = workdir / (record.id + "_photo." + prop.photo_ext);
        write_binary(p, prop.photo);
        record.photo_path = fs::absolute(p).lexically_normal();
      }
      if (!prop.floorplan.empty()) {
        const fs::path p = workdir / (record.id + "_floorplan." + prop.floorplan_ext);
        write_binary(p, prop.floorplan);
        record.floorplan_path = fs::absolute(p).lexically_normal();
      }
      write_text(workdir / (record.id + ".json"), doc.dump(2) + "\n");
      report.records.push_back(std::move(record));
    } catch (const json::exception& e) {
      report.issues.push_back({label, std::string("unparseable JSON: ") + e.what(), true});
    } catch (const Error& e) {
      report.issues.push_back({label, e.what(), true});
    }
  }
  std::sort(report.records.begin(), report.records.end(),
            [](const HomeRecord& a, const HomeRecord& b) { return a.id < b.id; });
  return report;
}

}  // namespace synthhome
