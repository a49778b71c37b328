#include "synthhome/geometry.hpp"

#include <cmath>
#include <numbers>

namespace synthhome::geometry {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;

LonLat centroid_of(std::span<const LonLat> ring) {
  LonLat c;
  if (ring.empty()) return c;
  for (const auto& p : ring) {
    c.lon += p.lon;
    c.lat += p.lat;
  }
  c.lon /= static_cast<double>(ring.size());
  c.lat /= static_cast<double>(ring.size());
  return c;
}
}  // namespace

LocalProjection::LocalProjection(std::span<const LonLat> ring) : origin_(centroid_of(ring)) {}

PointM LocalProjection::forward(LonLat p) const {
  const double k = kEarthRadiusM * kDegToRad;
  return {k * std::cos(origin_.lat * kDegToRad) * (p.lon - origin_.lon), k * (p.lat - origin_.lat)};
}

LonLat LocalProjection::inverse(PointM p) const {
  const double k = kEarthRadiusM * kDegToRad;
  return {origin_.lon + p.x / (k * std::cos(origin_.lat * kDegToRad)), origin_.lat + p.y / k};
}

std::vector<PointM> LocalProjection::forward(std::span<const LonLat> ring) const {
  std::vector<PointM> out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back(forward(p));
  return out;
}

double polygon_area(std::span<const PointM> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PointM& a = ring[i];
    const PointM& b = ring[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::fabs(twice) / 2.0;
}

double polygon_perimeter(std::span<const PointM> ring) {
  const std::size_t n = ring.size();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PointM& a = ring[i];
    const PointM& b = ring[(i + 1) % n];
    total += std::hypot(b.x - a.x, b.y - a.y);
  }
  return total;
}

double footprint_area_m2(std::span<const LonLat> ring) {
  return polygon_area(LocalProjection(ring).forward(ring));
}

double footprint_perimeter_m(std::span<const LonLat> ring) {
  return polygon_perimeter(LocalProjection(ring).forward(ring));
}

std::vector<LonLat> rectangle_footprint(LonLat origin, double width_m, double depth_m) {
  const LocalProjection proj(origin);
  const double hw = width_m / 2.0;
  const double hd = depth_m / 2.0;
  return {proj.inverse({-hw, -hd}), proj.inverse({hw, -hd}), proj.inverse({hw, hd}),
          proj.inverse({-hw, hd})};
}

}  // namespace synthhome::geometry
