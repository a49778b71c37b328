#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "synthhome/domain.hpp"
#include "synthhome/geometry.hpp"

namespace synthhome::test {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(SYNTHHOME_FIXTURES) / rel; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("synthhome-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::uint8_t> png_bytes(const cv::Mat& img) {
  std::vector<std::uint8_t> out;
  cv::imencode(".png", img, out);
  return out;
}

// Flat-colored BGR test image.
inline std::vector<std::uint8_t> solid_png(int w, int h, cv::Scalar color = {200, 150, 100}) {
  return png_bytes(cv::Mat(h, w, CV_8UC3, color));
}

// Square building, one story, with the given U-value on every opaque
// surface (R in imperial units = 1 / (u * 0.1761)).
inline BuildingFeature square_building(double side_m, double u_value, double ach, double heat_cop = 0.8,
                                       double cool_cop = 3.0) {
  BuildingFeature f;
  f.name = "Square";
  f.floor_area_ft2 = side_m * side_m * geometry::kSquareFeetPerSquareMeter;
  f.building_type = "Single family";
  f.inspection_note = "test";
  const double r = 1.0 / (u_value * 0.1761);
  f.params = {heat_cop, cool_cop, r, r, ach};
  f.footprint = geometry::rectangle_footprint({-75.0, 40.0}, side_m, side_m);
  return f;
}

}  // namespace synthhome::test
