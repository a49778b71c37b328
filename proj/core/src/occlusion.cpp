#include "synthhome/occlusion.hpp"

#include <cmath>
#include <numeric>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "synthhome/concurrency.hpp"
#include "synthhome/error.hpp"
#include "synthhome/util.hpp"
#include "synthhome/vision.hpp"

namespace synthhome {

int grid_side(int n) {
  if (n <= 0) throw InputError("cell count must be positive");
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (k * k != n) throw InputError("cell count " + std::to_string(n) + " is not a perfect square");
  return k;
}

std::vector<GridCell> grid_cells(int width, int height, int n) {
  const int k = grid_side(n);
  if (width < k || height < k)
    throw InputError("image " + std::to_string(width) + "x" + std::to_string(height) + " too small for a " +
                     std::to_string(k) + "x" + std::to_string(k) + " grid");
  const int cw = width / k;
  const int ch = height / k;
  std::vector<GridCell> cells;
  cells.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const int x = c * cw;
      const int y = r * ch;
      const int w = c == k - 1 ? width - x : cw;
      const int h = r == k - 1 ? height - y : ch;
      cells.push_back({r, c, cv::Rect(x, y, w, h)});
    }
  }
  return cells;
}

cv::Mat mask_cell(const cv::Mat& image, const cv::Rect& cell) {
  if (image.empty()) throw InputError("mask_cell: empty image");
  if (cell.width <= 0 || cell.height <= 0 || cell.x < 0 || cell.y < 0 || cell.x + cell.width > image.cols ||
      cell.y + cell.height > image.rows)
    throw InputError("mask_cell: cell outside the image");
  cv::Mat out = image.clone();
  cv::Scalar black = cv::Scalar::all(0);
  if (image.channels() == 4) {
    const double opaque = image.depth() == CV_16U ? 65535.0 : image.depth() == CV_32F ? 1.0 : 255.0;
    black[3] = opaque;
  }
  out(cell).setTo(black);
  return out;
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.empty() || u.size() != v.size()) throw InputError("cosine distance: vectors must have equal nonzero length");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw InputError("cosine distance: zero vector");
  // sqrt(uu * vv) keeps identical inputs at exactly 0
  const double d = 1.0 - dot / std::sqrt(uu * vv);
  return std::clamp(d, 0.0, 2.0);
}

namespace {

std::vector<double> embed_text(EmbeddingBackend& embed, const std::string& text) {
  return with_retries(embed.retry_policy(), "embed", [&] { return embed.embed(text); });
}

}  // namespace

OcclusionReport occlusion_run(std::span<const std::uint8_t> image, std::string_view prompt, VisionBackend& vision,
                              EmbeddingBackend& embed, const OcclusionOptions& options) {
  const std::vector<std::uint8_t> buf(image.begin(), image.end());
  const cv::Mat decoded = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
  if (decoded.empty()) throw InputError("occlusion: image does not decode");
  const auto cells = grid_cells(decoded.cols, decoded.rows, options.cells);
  const int k = grid_side(options.cells);

  OcclusionReport report;
  report.image_id = options.image_id.empty() ? sha256_hex(image).substr(0, 16) : options.image_id;
  report.grid_rows = k;
  report.grid_cols = k;
  report.baseline_text = describe_image(vision, image, prompt);
  const std::vector<double> baseline = embed_text(embed, report.baseline_text);

  const std::string prompt_copy(prompt);
  auto results = parallel_map(
      cells,
      [&](const GridCell& cell) {
        std::vector<std::uint8_t> png;
        if (!cv::imencode(".png", mask_cell(decoded, cell.rect), png))
          throw InputError("occlusion: could not encode masked image");
        const std::string text = describe_image(vision, png, prompt_copy);
        return cosine_distance(baseline, embed_text(embed, text));
      },
      options.workers);

  report.distances.reserve(results.size());
  for (auto& r : results) {
    if (!r.ok()) std::rethrow_exception(r.error);
    report.distances.push_back(*r.value);
  }
  return report;
}

RegionStats region_stats(const OcclusionReport& report, const std::vector<bool>& mask) {
  const auto n = static_cast<std::size_t>(report.grid_rows) * static_cast<std::size_t>(report.grid_cols);
  if (report.distances.size() != n) throw InputError("report distances do not match its grid");
  if (mask.size() != n) throw InputError("mask has " + std::to_string(mask.size()) + " cells, grid has " + std::to_string(n));
  RegionStats s;
  double in = 0.0, out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) {
      in += report.distances[i];
      ++s.region_cells;
    } else {
      out += report.distances[i];
      ++s.other_cells;
    }
  }
  if (s.region_cells == 0) throw StatsError("region mask selects no cells");
  if (s.other_cells == 0) throw StatsError("region mask selects every cell");
  s.rmd = in / s.region_cells;
  s.nrmd = out / s.other_cells;
  return s;
}

std::vector<bool> parse_region_mask(std::string_view csv, int rows, int cols) {
  std::vector<bool> mask;
  int seen_rows = 0;
  for (const auto& row : parse_csv(csv)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (static_cast<int>(row.size()) != cols)
      throw InputError("mask row " + std::to_string(seen_rows + 1) + " has " + std::to_string(row.size()) +
                       " values, expected " + std::to_string(cols));
    for (const auto& f : row) {
      const auto v = trim(f);
      if (v == "1") mask.push_back(true);
      else if (v == "0") mask.push_back(false);
      else throw InputError("mask value \"" + v + "\" is not 0 or 1");
    }
    ++seen_rows;
  }
  if (seen_rows != rows)
    throw InputError("mask has " + std::to_string(seen_rows) + " rows, expected " + std::to_string(rows));
  return mask;
}

std::filesystem::path mask_sidecar_path(const std::filesystem::path& image) {
  return image.parent_path() / (image.stem().string() + ".mask.csv");
}

std::string distance_grid_csv(const OcclusionReport& report) {
  std::vector<std::string> header{"row"};
  for (int c = 0; c < report.grid_cols; ++c) header.push_back("c" + std::to_string(c));
  std::string out = csv_row(header);
  for (int r = 0; r < report.grid_rows; ++r) {
    std::vector<std::string> fields{std::to_string(r)};
    for (int c = 0; c < report.grid_cols; ++c) fields.push_back(format_fixed(report.at(r, c), 6));
    out += csv_row(fields);
  }
  return out;
}

std::vector<double> parse_distance_grid_csv(std::string_view csv, int* rows, int* cols) {
  const auto table = parse_csv(csv);
  if (table.empty() || table[0].empty() || table[0][0] != "row") throw ParseError("distance grid: missing header");
  const std::size_t width = table[0].size() - 1;
  std::vector<double> out;
  int n_rows = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& row = table[i];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != width + 1) throw ParseError("distance grid: ragged row " + std::to_string(i));
    for (std::size_t c = 1; c < row.size(); ++c) {
      try {
        out.push_back(std::stod(row[c]));
      } catch (const std::exception&) {
        throw ParseError("distance grid: bad number \"" + row[c] + "\"");
      }
    }
    ++n_rows;
  }
  if (rows) *rows = n_rows;
  if (cols) *cols = static_cast<int>(width);
  return out;
}

cv::Mat heatmap_image(const OcclusionReport& report, int cell_px) {
  if (report.grid_rows <= 0 || report.grid_cols <= 0) throw InputError("heatmap: empty grid");
  cell_px = std::max(1, cell_px);
  cv::Mat img(report.grid_rows * cell_px, report.grid_cols * cell_px, CV_8UC3, cv::Scalar(255, 255, 255));
  const double max = report.distances.empty() ? 0.0 : *std::max_element(report.distances.begin(), report.distances.end());
  if (max <= 0.0) return img;
  for (int r = 0; r < report.grid_rows; ++r) {
    for (int c = 0; c < report.grid_cols; ++c) {
      const double t = std::clamp(report.at(r, c) / max, 0.0, 1.0);
      const double fade = 255.0 - std::ceil(255.0 * t);
      img(cv::Rect(c * cell_px, r * cell_px, cell_px, cell_px)).setTo(cv::Scalar(fade, fade, 255));
    }
  }
  return img;
}

void render_heatmap(const OcclusionReport& report, const std::filesystem::path& csv_path,
                    const std::filesystem::path& png_path, int cell_px) {
  write_text(csv_path, distance_grid_csv(report));
  std::vector<std::uint8_t> png;
  if (!cv::imencode(".png", heatmap_image(report, cell_px), png)) throw IoError("heatmap: PNG encode failed");
  write_binary(png_path, png);
}

}  // namespace synthhome
