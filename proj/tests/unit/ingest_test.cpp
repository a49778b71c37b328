#include <gtest/gtest.h>

#include "support.hpp"
#include "synthhome/error.hpp"
#include "synthhome/ingest.hpp"
#include "synthhome/util.hpp"

using namespace synthhome;
namespace fs = std::filesystem;

TEST(LoadHomeRecords, FixtureDataset) {
  const auto report = load_home_records(test::fixture("homes"));
  ASSERT_EQ(report.records.size(), 5u);
  EXPECT_TRUE(report.issues.empty());
  EXPECT_EQ(report.records[0].id, "H001");
  EXPECT_TRUE(report.records[0].photo_path && report.records[0].photo_path->is_absolute());
  EXPECT_TRUE(report.records[0].floorplan_path);
  EXPECT_TRUE(report.records[3].photo_path);
  EXPECT_FALSE(report.records[3].floorplan_path);
  EXPECT_FALSE(report.records[4].has_any_image());
  EXPECT_EQ(report.records[2].number("total_square_feet_living_area"), 2576.0);
}

TEST(LoadHomeRecords, MalformedAndDuplicateSkipped) {
  test::TempDir dir;
  write_text(dir / "a.json", R"({"id":"A","year_built":1950})");
  write_text(dir / "b.json", R"({"id":"A","year_built":1960})");
  write_text(dir / "c.json", "{not json");
  write_text(dir / "d.json", R"({"id":"D","photo":"missing.jpg"})");
  write_text(dir / "notes.txt", "ignored");
  const auto report = load_home_records(dir.path());
  ASSERT_EQ(report.records.size(), 2u);
  EXPECT_EQ(report.records[0].number("year_built"), 1950.0);
  EXPECT_EQ(report.records[1].id, "D");
  EXPECT_FALSE(report.records[1].photo_path);
  ASSERT_EQ(report.issues.size(), 3u);
  EXPECT_TRUE(report.issues[0].skipped);   // b.json duplicate
  EXPECT_TRUE(report.issues[1].skipped);   // c.json
  EXPECT_FALSE(report.issues[2].skipped);  // d.json missing image is a warning
}

TEST(LoadHomeRecords, MissingDirectory) {
  EXPECT_THROW(load_home_records("/nonexistent/synthhome"), InputError);
}

TEST(LoadHomeRecords, EmptyDirectory) {
  test::TempDir dir;
  const auto report = load_home_records(dir.path());
  EXPECT_TRUE(report.records.empty());
}

TEST(FetchStreet, RetriesTransientFailures) {
  FixtureScrapeBackend backend;
  ScrapedProperty p;
  p.record_json = R"({"id":"S1","year_built":1970,"photo":"whatever.jpg"})";
  p.photo = test::solid_png(8, 8);
  p.photo_ext = "png";
  backend.add("Elm Street", p);
  backend.add("Elm Street", ScrapedProperty{"{bad", {}, "jpg", {}, "jpg"});
  backend.fail_next_calls(2);

  test::TempDir dir;
  const auto report = fetch_street(backend, "Elm Street", dir.path());
  EXPECT_EQ(backend.calls(), 3);
  ASSERT_EQ(report.records.size(), 1u);
  EXPECT_EQ(report.issues.size(), 1u);
  EXPECT_TRUE(fs::is_regular_file(dir / "S1_photo.png"));
  // The written directory loads back as a dataset.
  const auto reloaded = load_home_records(dir.path());
  ASSERT_EQ(reloaded.records.size(), 1u);
  EXPECT_EQ(reloaded.records[0].photo_path, report.records[0].photo_path);
}

TEST(FetchStreet, GivesUpAfterPolicy) {
  FixtureScrapeBackend backend;
  backend.fail_next_calls(10);
  test::TempDir dir;
  EXPECT_THROW(fetch_street(backend, "Elm Street", dir.path()), BackendError);
  EXPECT_EQ(backend.calls(), 3);
}

TEST(FetchStreet, FixtureDirectory) {
  test::TempDir root;
  fs::create_directories(root / "Maple Street");
  for (const auto& e : fs::directory_iterator(test::fixture("homes")))
    fs::copy_file(e.path(), root / "Maple Street" / e.path().filename());
  FixtureScrapeBackend backend;
  backend.add_directory(root.path());
  test::TempDir out;
  const auto report = fetch_street(backend, "Maple Street", out.path());
  EXPECT_EQ(report.records.size(), 5u);
  EXPECT_TRUE(fetch_street(backend, "Unknown Street", out / "x").records.empty());
}
