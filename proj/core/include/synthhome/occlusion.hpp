#pragma once

// Occlusion sensitivity: mask one grid cell at a time, re-describe the
// image, and measure how far each description drifts from the baseline in
// embedding space.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

#include "synthhome/backend.hpp"
#include "synthhome/domain.hpp"

namespace synthhome {

struct GridCell {
  int row = 0;
  int col = 0;
  cv::Rect rect;
};

// k for n = k*k. Throws InputError if n is not a positive perfect square.
int grid_side(int n);

// k x k cells in row-major order. Base size is floor(w/k) x floor(h/k); the
// last column and row absorb the remainder, so the cells tile the image.
// Throws InputError if n is not a perfect square or the image is smaller
// than k in either dimension.
std::vector<GridCell> grid_cells(int width, int height, int n);

// Copy of `image` with the cell painted opaque black.
cv::Mat mask_cell(const cv::Mat& image, const cv::Rect& cell);

// 1 - u.v / (|u||v|), clamped to [0, 2].
double cosine_distance(std::span<const double> u, std::span<const double> v);

struct OcclusionOptions {
  int cells = 100;
  std::size_t workers = 4;
  std::string image_id;
};

// Describes the image once for the baseline, then once per masked cell.
// Any backend failure aborts the run.
OcclusionReport occlusion_run(std::span<const std::uint8_t> image, std::string_view prompt, VisionBackend& vision,
                              EmbeddingBackend& embed, const OcclusionOptions& options = {});

struct RegionStats {
  double rmd = 0.0;   // mean over mask-true cells
  double nrmd = 0.0;  // mean over mask-false cells
  int region_cells = 0;
  int other_cells = 0;
};

// Throws StatsError when either partition is empty, InputError when the
// mask does not match the grid.
RegionStats region_stats(const OcclusionReport& report, const std::vector<bool>& mask);

// k x k grid of 0/1 values, comma separated, no header.
std::vector<bool> parse_region_mask(std::string_view csv, int rows, int cols);
// "<dir>/<stem>.mask.csv" for "<dir>/<stem>.<ext>".
std::filesystem::path mask_sidecar_path(const std::filesystem::path& image);

// Grid CSV: header "row,c0,...", one line per grid row, 6 decimals.
std::string distance_grid_csv(const OcclusionReport& report);
std::vector<double> parse_distance_grid_csv(std::string_view csv, int* rows = nullptr, int* cols = nullptr);

// Heatmap with `cell_px` square cells. Color ramp is linear from white at 0
// to pure red at the report's maximum: the red channel stays 255 and blue
// and green are 255 - ceil(255 d / max). An all-zero grid renders white.
cv::Mat heatmap_image(const OcclusionReport& report, int cell_px = 24);

// Writes the grid CSV and the heatmap PNG. Throws IoError.
void render_heatmap(const OcclusionReport& report, const std::filesystem::path& csv_path,
                    const std::filesystem::path& png_path, int cell_px = 24);

}  // namespace synthhome
