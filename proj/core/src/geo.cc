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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "branchloc/errors.h"

namespace branchloc {
namespace {

double Cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool OnSegment(Point p, Point a, Point b) {
  if (Cross(a, b, p) != 0.0) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
         p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

int Sign(double v) { return (v > 0.0) - (v < 0.0); }

bool SegmentsIntersect(Point a, Point b, Point c, Point d) {
  const int d1 = Sign(Cross(c, d, a));
  const int d2 = Sign(Cross(c, d, b));
  const int d3 = Sign(Cross(a, b, c));
  const int d4 = Sign(Cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  return (d1 == 0 && OnSegment(a, c, d)) || (d2 == 0 && OnSegment(b, c, d)) ||
         (d3 == 0 && OnSegment(c, a, b)) || (d4 == 0 && OnSegment(d, a, b));
}

double SignedArea(const std::vector<Point>& ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  }
  return 0.5 * twice;
}

// Drops consecutive duplicates and closes the ring.
std::vector<Point> NormalizeRing(std::vector<Point> ring,
                                 std::string_view what) {
  std::vector<Point> out;
  out.reserve(ring.size() + 1);
  for (const Point& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      Fail(ErrorKind::kDomain,
           std::string(what) + " has a non-finite coordinate");
    }
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  if (out.size() > 1 && out.front() == out.back()) out.pop_back();
  if (out.size() < 3) {
    Fail(ErrorKind::kDomain,
         std::string(what) + " needs at least 3 distinct vertices");
  }
  const std::size_t n = out.size();
  out.push_back(out.front());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (SegmentsIntersect(out[i], out[i + 1], out[j], out[j + 1])) {
        Fail(ErrorKind::kDomain, std::string(what) + " self-intersects");
      }
    }
  }
  if (SignedArea(out) == 0.0) {
    Fail(ErrorKind::kDomain, std::string(what) + " has zero area");
  }
  return out;
}

// Boundary counts as inside.
bool InRing(Point p, const std::vector<Point>& ring, bool* on_boundary) {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Point a = ring[i];
    const Point b = ring[i + 1];
    if (OnSegment(p, a, b)) {
      *on_boundary = true;
      return true;
    }
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  *on_boundary = false;
  return inside;
}

}  // namespace

std::string_view CoordinateModeName(CoordinateMode mode) {
  return mode == CoordinateMode::kPlanar ? "planar" : "geodesic";
}

CoordinateMode ParseCoordinateMode(std::string_view name) {
  if (name == "planar") return CoordinateMode::kPlanar;
  if (name == "geodesic") return CoordinateMode::kGeodesic;
  Fail(ErrorKind::kConfig, "unknown coordinate mode '" + std::string(name) +
                               "' (expected planar or geodesic)");
}

void ValidatePoint(CoordinateMode mode, Point p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    Fail(ErrorKind::kDomain, "non-finite coordinate");
  }
  if (mode == CoordinateMode::kGeodesic &&
      (p.x < -180.0 || p.x > 180.0 || p.y < -90.0 || p.y > 90.0)) {
    Fail(ErrorKind::kDomain, "coordinate (" + std::to_string(p.x) + ", " +
                                 std::to_string(p.y) +
                                 ") outside longitude/latitude range");
  }
}

double PlanarDistance(Point a, Point b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double GeodesicDistance(Point a, Point b) {
  ValidatePoint(CoordinateMode::kGeodesic, a);
  ValidatePoint(CoordinateMode::kGeodesic, b);
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double lat1 = a.y * kDeg;
  const double lat2 = b.y * kDeg;
  const double s_lat = std::sin((lat2 - lat1) / 2.0);
  const double s_lon = std::sin((b.x - a.x) * kDeg / 2.0);
  const double h =
      s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

double Distance(CoordinateMode mode, Point a, Point b) {
  return mode == CoordinateMode::kPlanar ? PlanarDistance(a, b)
                                         : GeodesicDistance(a, b);
}

Polygon Polygon::Create(std::vector<Point> exterior,
                        std::vector<std::vector<Point>> holes) {
  Polygon poly;
  poly.exterior_ = NormalizeRing(std::move(exterior), "polygon exterior");
  for (auto& hole : holes) {
    poly.holes_.push_back(NormalizeRing(std::move(hole), "polygon hole"));
  }
  BoundingBox box{poly.exterior_[0].x, poly.exterior_[0].y,
                  poly.exterior_[0].x, poly.exterior_[0].y};
  for (const Point& p : poly.exterior_) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  poly.bounds_ = box;
  if (poly.Area() <= 0.0) {
    Fail(ErrorKind::kDomain, "polygon area is not strictly positive");
  }
  return poly;
}

double Polygon::Area() const {
  double area = std::abs(SignedArea(exterior_));
  for (const auto& hole : holes_) area -= std::abs(SignedArea(hole));
  return area;
}

Point Polygon::VertexCentroid() const {
  const std::size_t n = exterior_.size() - 1;
  Point c;
  for (std::size_t i = 0; i < n; ++i) {
    c.x += exterior_[i].x;
    c.y += exterior_[i].y;
  }
  c.x /= static_cast<double>(n);
  c.y /= static_cast<double>(n);
  return c;
}

bool PointInPolygon(Point p, const Polygon& poly) {
  if (!poly.bounds().Contains(p)) return false;
  bool boundary = false;
  if (!InRing(p, poly.exterior(), &boundary)) return false;
  if (boundary) return true;
  for (const auto& hole : poly.holes()) {
    if (InRing(p, hole, &boundary) && !boundary) return false;
  }
  return true;
}

std::size_t SpatialIndex::KeyHash::operator()(const Key& k) const noexcept {
  const auto ux = static_cast<std::uint64_t>(k.cx);
  const auto uy = static_cast<std::uint64_t>(k.cy);
  return static_cast<std::size_t>(ux * 0x9E3779B97F4A7C15ULL ^
                                  (uy + 0x632BE59BD9B4E019ULL + (ux << 6)));
}

SpatialIndex::SpatialIndex(CoordinateMode mode, std::span<const Point> points,
                           double cell_size)
    : mode_(mode), cell_size_(cell_size), points_(points.begin(), points.end()) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    Fail(ErrorKind::kDomain, "spatial index cell size must be positive");
  }
  for (const Point& p : points_) ValidatePoint(mode_, p);
  if (mode_ == CoordinateMode::kGeodesic) return;
  bool first = true;
  for (const Point& p : points_) {
    const Key k = KeyOf(p);
    buckets_[k].push_back(p);
    if (first) {
      min_cx_ = max_cx_ = k.cx;
      min_cy_ = max_cy_ = k.cy;
      first = false;
    } else {
      min_cx_ = std::min(min_cx_, k.cx);
      max_cx_ = std::max(max_cx_, k.cx);
      min_cy_ = std::min(min_cy_, k.cy);
      max_cy_ = std::max(max_cy_, k.cy);
    }
  }
}

SpatialIndex::Key SpatialIndex::KeyOf(Point p) const {
  return Key{static_cast<std::int64_t>(std::floor(p.x / cell_size_)),
             static_cast<std::int64_t>(std::floor(p.y / cell_size_))};
}

std::span<const Point> SpatialIndex::BucketOf(Point p) const {
  if (mode_ != CoordinateMode::kPlanar) return {};
  auto it = buckets_.find(KeyOf(p));
  if (it == buckets_.end()) return {};
  return it->second;
}

double SpatialIndex::NearestDistance(Point q) const {
  if (points_.empty()) {
    Fail(ErrorKind::kDomain, "empty feature layer");
  }
  ValidatePoint(mode_, q);
  double best = std::numeric_limits<double>::infinity();
  auto scan_all = [&] {
    for (const Point& p : points_) best = std::min(best, Distance(mode_, q, p));
    return best;
  };
  if (mode_ == CoordinateMode::kGeodesic) return scan_all();

  const Key qk = KeyOf(q);
  const std::int64_t max_ring =
      std::max({std::abs(qk.cx - min_cx_), std::abs(qk.cx - max_cx_),
                std::abs(qk.cy - min_cy_), std::abs(qk.cy - max_cy_)});
  auto visit = [&](std::int64_t cx, std::int64_t cy) {
    auto it = buckets_.find(Key{cx, cy});
    if (it == buckets_.end()) return;
    for (const Point& p : it->second) {
      best = std::min(best, PlanarDistance(q, p));
    }
  };
  for (std::int64_t k = 0; k <= max_ring; ++k) {
    // A ring wider than the number of occupied buckets is cheaper to replace
    // by a full scan; the minimum is the same either way.
    if ((2 * k + 1) > 8 * static_cast<std::int64_t>(buckets_.size()) + 8) {
      return scan_all();
    }
    if (k == 0) {
      visit(qk.cx, qk.cy);
    } else {
      for (std::int64_t dx = -k; dx <= k; ++dx) {
        visit(qk.cx + dx, qk.cy - k);
        visit(qk.cx + dx, qk.cy + k);
      }
      for (std::int64_t dy = -k + 1; dy <= k - 1; ++dy) {
        visit(qk.cx - k, qk.cy + dy);
        visit(qk.cx + k, qk.cy + dy);
      }
    }
    // Any bucket at ring k+1 or beyond lies at least k cells away.
    if (best <= static_cast<double>(k) * cell_size_) return best;
  }
  return best;
}

}  // namespace branchloc
