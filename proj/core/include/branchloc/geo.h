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

// Planar and geodesic geometry primitives: distance kernels, polygons with
// inclusive containment, and a bucket-grid index for nearest-feature queries.

#ifndef BRANCHLOC_GEO_H_
#define BRANCHLOC_GEO_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace branchloc {

// Coordinates are meters in planar mode and (longitude, latitude) degrees in
// geodesic mode. One mode is active per project.
enum class CoordinateMode { kPlanar, kGeodesic };

std::string_view CoordinateModeName(CoordinateMode mode);
CoordinateMode ParseCoordinateMode(std::string_view name);

inline constexpr double kEarthRadiusMeters = 6371000.0;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Throws kDomain for non-finite coordinates, and for out-of-range
// longitude/latitude in geodesic mode.
void ValidatePoint(CoordinateMode mode, Point p);

double PlanarDistance(Point a, Point b);

// Haversine great-circle distance in meters on a sphere of radius
// kEarthRadiusMeters. Points are (lon, lat) in degrees.
double GeodesicDistance(Point a, Point b);

double Distance(CoordinateMode mode, Point a, Point b);

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool Contains(Point p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

// A simple polygon with optional holes. Rings are stored closed (first vertex
// repeated at the end). Construction validates the exterior: at least three
// distinct vertices, no self-intersection, strictly positive area.
class Polygon {
 public:
  static Polygon Create(std::vector<Point> exterior,
                        std::vector<std::vector<Point>> holes = {});

  const std::vector<Point>& exterior() const { return exterior_; }
  const std::vector<std::vector<Point>>& holes() const { return holes_; }
  const BoundingBox& bounds() const { return bounds_; }

  // Exterior area minus hole areas, in squared coordinate units.
  double Area() const;

  // Arithmetic mean of the exterior vertices (closing vertex excluded).
  Point VertexCentroid() const;

 private:
  Polygon() = default;

  std::vector<Point> exterior_;
  std::vector<std::vector<Point>> holes_;
  BoundingBox bounds_;
};

// Ray-crossing containment. Points on the exterior boundary or on a hole
// boundary count as inside.
bool PointInPolygon(Point p, const Polygon& poly);

inline constexpr double kDefaultIndexCellSize = 3000.0;

// Immutable uniform bucket grid over a point set. In planar mode queries scan
// rings of buckets outward from the query bucket and stop once no unvisited
// bucket can hold a closer point. Geodesic indexes scan every point.
class SpatialIndex {
 public:
  SpatialIndex(CoordinateMode mode, std::span<const Point> points,
               double cell_size = kDefaultIndexCellSize);

  CoordinateMode mode() const { return mode_; }
  double cell_size() const { return cell_size_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }

  // Points stored in the bucket containing `p` (planar mode only).
  std::span<const Point> BucketOf(Point p) const;

  // Minimum distance from `q` to any indexed point under the index's kernel.
  // Throws kDomain ("empty feature layer") when the index is empty.
  double NearestDistance(Point q) const;

 private:
  struct Key {
    std::int64_t cx;
    std::int64_t cy;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Key KeyOf(Point p) const;

  CoordinateMode mode_;
  double cell_size_;
  std::vector<Point> points_;
  std::unordered_map<Key, std::vector<Point>, KeyHash> buckets_;
  std::int64_t min_cx_ = 0;
  std::int64_t max_cx_ = 0;
  std::int64_t min_cy_ = 0;
  std::int64_t max_cy_ = 0;
};

inline double NearestDistance(const SpatialIndex& index, Point q) {
  return index.NearestDistance(q);
}

}  // namespace branchloc

#endif  // BRANCHLOC_GEO_H_
