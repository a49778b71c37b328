#include <gtest/gtest.h>

#include <cmath>

#include "synthhome/geometry.hpp"

using namespace synthhome;
using namespace synthhome::geometry;

TEST(Polygon, ShoelaceOnUnitSquareAndTriangle) {
  const std::vector<PointM> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_DOUBLE_EQ(polygon_area(square), 1.0);
  EXPECT_DOUBLE_EQ(polygon_perimeter(square), 4.0);
  const std::vector<PointM> cw{{0, 0}, {0, 2}, {3, 0}};
  EXPECT_DOUBLE_EQ(polygon_area(cw), 3.0);
  EXPECT_DOUBLE_EQ(polygon_perimeter(cw), 5.0 + std::sqrt(13.0));
}

TEST(Rectangle, AreaAndPerimeterInMetres) {
  const auto ring = rectangle_footprint({-75.3, 40.7}, 12.0, 8.0);
  ASSERT_EQ(ring.size(), 4u);
  EXPECT_NEAR(footprint_area_m2(ring), 96.0, 1e-6);
  EXPECT_NEAR(footprint_perimeter_m(ring), 40.0, 1e-6);
}

TEST(Rectangle, CounterClockwise) {
  const auto ring = rectangle_footprint({10.0, 50.0}, 20.0, 10.0);
  const LocalProjection proj(ring);
  const auto pts = proj.forward(ring);
  double signed_area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    signed_area += a.x * b.y - b.x * a.y;
  }
  EXPECT_GT(signed_area, 0.0);
}

TEST(Projection, RoundTrip) {
  const LocalProjection proj(LonLat{-75.3, 40.7});
  const LonLat p{-75.2999, 40.7003};
  const auto back = proj.inverse(proj.forward(p));
  EXPECT_NEAR(back.lon, p.lon, 1e-12);
  EXPECT_NEAR(back.lat, p.lat, 1e-12);
}
