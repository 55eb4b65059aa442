// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "branchloc/geo.h"

#include <cmath>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "gtest/gtest.h"
#include "oracles.h"

namespace branchloc {
namespace {

using testing::KindOf;
using Big = boost::multiprecision::cpp_dec_float_50;

double BigHypot(double ax, double ay, double bx, double by) {
  const Big dx = Big(ax) - Big(bx);
  const Big dy = Big(ay) - Big(by);
  return static_cast<double>(boost::multiprecision::sqrt(dx * dx + dy * dy));
}

double BigHaversine(Point a, Point b) {
  const Big pi = boost::math::constants::pi<Big>();
  const Big lat1 = Big(a.y) * pi / 180, lat2 = Big(b.y) * pi / 180;
  const Big dlat = lat2 - lat1;
  const Big dlon = (Big(b.x) - Big(a.x)) * pi / 180;
  const Big s1 = boost::multiprecision::sin(dlat / 2);
  const Big s2 = boost::multiprecision::sin(dlon / 2);
  const Big h = s1 * s1 + boost::multiprecision::cos(lat1) *
                              boost::multiprecision::cos(lat2) * s2 * s2;
  return static_cast<double>(2 * Big(kEarthRadiusMeters) *
                             boost::multiprecision::asin(boost::multiprecision::sqrt(h)));
}

TEST(PlanarDistance, Basics) {
  EXPECT_EQ(PlanarDistance({0, 0}, {0, 0}), 0.0);
  EXPECT_EQ(PlanarDistance({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(PlanarDistance({12.3, -7.1}, {-4.0, 9.9}),
                   BigHypot(12.3, -7.1, -4.0, 9.9));
}

TEST(PlanarDistance, RandomAgainstHighPrecision) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e5, 1e5);
  for (int k = 0; k < 2000; ++k) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double want = BigHypot(a.x, a.y, b.x, b.y);
    EXPECT_NEAR(PlanarDistance(a, b), want, 1e-15 * want);
  }
}

TEST(GeodesicDistance, KnownValues) {
  EXPECT_EQ(GeodesicDistance({51.67, 32.65}, {51.67, 32.65}), 0.0);
  EXPECT_NEAR(GeodesicDistance({0, 0}, {180, 0}), M_PI * kEarthRadiusMeters,
              1e-6);
  const Point a{51.67, 32.65}, b{51.68, 32.65};
  EXPECT_NEAR(GeodesicDistance(a, b), BigHaversine(a, b),
              1e-6 * BigHaversine(a, b));
}

TEST(GeodesicDistance, RandomAgainstHighPrecision) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lon(-180, 180), lat(-90, 90);
  for (int k = 0; k < 500; ++k) {
    const Point a{lon(rng), lat(rng)}, b{lon(rng), lat(rng)};
    const double want = BigHaversine(a, b);
    EXPECT_NEAR(GeodesicDistance(a, b), want, 1e-9 * want + 1e-6);
  }
}

TEST(GeodesicDistance, RejectsOutOfRange) {
  EXPECT_EQ(KindOf([] { GeodesicDistance({181, 0}, {0, 0}); }),
            ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] { GeodesicDistance({0, 0}, {0, -90.5}); }),
            ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] { ValidatePoint(CoordinateMode::kPlanar, {NAN, 0}); }),
            ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] {
              ValidatePoint(CoordinateMode::kPlanar, {INFINITY, 0});
            }),
            ErrorKind::kDomain);
}

TEST(Distance, MetricAxioms) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5000, 5000);
  std::uniform_real_distribution<double> lon(-180, 180), lat(-89, 89);
  for (int k = 0; k < 1000; ++k) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    EXPECT_EQ(PlanarDistance(a, b), PlanarDistance(b, a));
    EXPECT_GE(PlanarDistance(a, b), 0.0);
    EXPECT_LE(PlanarDistance(a, c),
              (PlanarDistance(a, b) + PlanarDistance(b, c)) * (1 + 1e-12));
    const Point ga{lon(rng), lat(rng)}, gb{lon(rng), lat(rng)},
        gc{lon(rng), lat(rng)};
    EXPECT_NEAR(GeodesicDistance(ga, gb), GeodesicDistance(gb, ga),
                1e-9 * GeodesicDistance(ga, gb));
    EXPECT_LE(GeodesicDistance(ga, gc),
              (GeodesicDistance(ga, gb) + GeodesicDistance(gb, gc)) * (1 + 1e-9));
  }
}

TEST(Polygon, ValidatesAndCloses) {
  const Polygon sq = Polygon::Create({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  EXPECT_EQ(sq.exterior().front(), sq.exterior().back());
  EXPECT_EQ(sq.Area(), 100.0);
  EXPECT_EQ(sq.VertexCentroid(), (Point{5, 5}));

  EXPECT_EQ(KindOf([] { Polygon::Create({{0, 0}, {1, 0}}); }), ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] { Polygon::Create({{0, 0}, {1, 1}, {2, 2}}); }),
            ErrorKind::kDomain);
  // Bow tie.
  EXPECT_EQ(KindOf([] { Polygon::Create({{0, 0}, {10, 10}, {10, 0}, {0, 10}}); }),
            ErrorKind::kDomain);
}

TEST(PointInPolygon, BoundaryIsInside) {
  const Polygon sq = Polygon::Create({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  EXPECT_TRUE(PointInPolygon({5, 5}, sq));
  EXPECT_TRUE(PointInPolygon({0, 5}, sq));
  EXPECT_TRUE(PointInPolygon({10, 10}, sq));
  EXPECT_TRUE(PointInPolygon({5, 0}, sq));
  EXPECT_FALSE(PointInPolygon({20, 20}, sq));
  EXPECT_FALSE(PointInPolygon({-0.001, 5}, sq));
}

TEST(PointInPolygon, Holes) {
  const Polygon p = Polygon::Create({{0, 0}, {10, 0}, {10, 10}, {0, 10}},
                                    {{{4, 4}, {6, 4}, {6, 6}, {4, 6}}});
  EXPECT_EQ(p.Area(), 96.0);
  EXPECT_FALSE(PointInPolygon({5, 5}, p));
  EXPECT_TRUE(PointInPolygon({4, 5}, p));
  EXPECT_TRUE(PointInPolygon({2, 2}, p));
}

TEST(PointInPolygon, MatchesWindingNumber) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-150, 150);
  int checked = 0;
  for (int poly = 0; poly < 40; ++poly) {
    const auto ring = testing::StarPolygon(rng, {0, 0}, 3 + poly % 12, 20, 100);
    Polygon p = Polygon::Create(ring);
    for (int k = 0; k < 1000; ++k) {
      const Point q{u(rng), u(rng)};
      ASSERT_EQ(PointInPolygon(q, p), testing::WindingNumber(q, ring) != 0)
          << "poly " << poly << " q=(" << q.x << "," << q.y << ")";
      ++checked;
    }
    // Vertices themselves.
    for (const Point& v : ring) EXPECT_TRUE(PointInPolygon(v, p));
  }
  EXPECT_EQ(checked, 40000);
}

TEST(SpatialIndex, SmallCases) {
  const std::vector<Point> one = {{3, 4}};
  SpatialIndex idx(CoordinateMode::kPlanar, one);
  EXPECT_EQ(idx.NearestDistance({0, 0}), 5.0);
  EXPECT_EQ(idx.NearestDistance({3, 4}), 0.0);
  EXPECT_EQ(idx.BucketOf({3, 4}).size(), 1u);

  SpatialIndex empty(CoordinateMode::kPlanar, std::vector<Point>{});
  try {
    empty.NearestDistance({0, 0});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDomain);
    EXPECT_NE(std::string(e.what()).find("empty feature layer"), std::string::npos);
  }
}

TEST(SpatialIndex, MatchesLinearScanExactly) {
  std::mt19937_64 rng(5);
  for (double cell : {50.0, 500.0, 3000.0}) {
    std::uniform_real_distribution<double> u(-2000, 12000);
    std::vector<Point> pts(500);
    for (Point& p : pts) p = {u(rng), u(rng)};
    SpatialIndex idx(CoordinateMode::kPlanar, pts, cell);
    for (int q = 0; q < 100; ++q) {
      const Point query{u(rng) * 1.5, u(rng) * 1.5};
      ASSERT_EQ(idx.NearestDistance(query),
                testing::LinearScanNearest(CoordinateMode::kPlanar, pts, query));
    }
    for (const Point& p : pts) ASSERT_EQ(idx.NearestDistance(p), 0.0);
  }
}

TEST(SpatialIndex, GeodesicMatchesLinearScan) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> lon(51.5, 51.9), lat(32.5, 32.8);
  std::vector<Point> pts(200);
  for (Point& p : pts) p = {lon(rng), lat(rng)};
  SpatialIndex idx(CoordinateMode::kGeodesic, pts, 0.01);
  for (int q = 0; q < 100; ++q) {
    const Point query{lon(rng), lat(rng)};
    ASSERT_EQ(idx.NearestDistance(query),
              testing::LinearScanNearest(CoordinateMode::kGeodesic, pts, query));
  }
}

TEST(SpatialIndex, InsertionOrderDoesNotMatter) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 5000);
  std::vector<Point> pts(300);
  for (Point& p : pts) p = {u(rng), u(rng)};
  std::vector<Point> shuffled = pts;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  SpatialIndex a(CoordinateMode::kPlanar, pts, 250);
  SpatialIndex b(CoordinateMode::kPlanar, shuffled, 250);
  for (int q = 0; q < 200; ++q) {
    const Point query{u(rng), u(rng)};
    ASSERT_EQ(a.NearestDistance(query), b.NearestDistance(query));
  }
}

}  // namespace
}  // namespace branchloc
