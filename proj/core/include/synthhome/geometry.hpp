#pragma once

#include <span>
#include <vector>

#include "synthhome/domain.hpp"

namespace synthhome::geometry {

inline constexpr double kEarthRadiusM = 6371008.8;
inline constexpr double kSquareFeetPerSquareMeter = 10.763910416709722;

struct PointM {
  double x = 0.0;  // east, metres
  double y = 0.0;  // north, metres
};

// Equirectangular projection about the vertex centroid. Adequate at building
// scale; not meant for anything larger than a parcel.
class LocalProjection {
 public:
  explicit LocalProjection(std::span<const LonLat> ring);
  LocalProjection(LonLat origin) : origin_(origin) {}

  PointM forward(LonLat p) const;
  LonLat inverse(PointM p) const;
  std::vector<PointM> forward(std::span<const LonLat> ring) const;
  LonLat origin() const { return origin_; }

 private:
  LonLat origin_;
};

// Shoelace area (always non-negative) and closed-ring perimeter, both for an
// open ring (last vertex implicitly joins the first).
double polygon_area(std::span<const PointM> ring);
double polygon_perimeter(std::span<const PointM> ring);

double footprint_area_m2(std::span<const LonLat> ring);
double footprint_perimeter_m(std::span<const LonLat> ring);

// Axis-aligned rectangle of the given size centred on `origin`,
// counter-clockwise from the south-west corner.
std::vector<LonLat> rectangle_footprint(LonLat origin, double width_m, double depth_m);

}  // namespace synthhome::geometry
