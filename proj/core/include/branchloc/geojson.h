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

// Minimal GeoJSON (RFC 7946) FeatureCollection reader for point and polygon
// layers.

#ifndef BRANCHLOC_GEOJSON_H_
#define BRANCHLOC_GEOJSON_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "branchloc/geo.h"

namespace branchloc {

using PropertyValue =
    std::variant<std::monostate, bool, double, std::string, std::vector<double>>;

struct GeoFeature {
  std::optional<std::string> id;
  // Point and MultiPoint geometries.
  std::vector<Point> points;
  // Polygon and MultiPolygon geometries.
  std::vector<Polygon> polygons;
  std::map<std::string, PropertyValue> properties;

  std::optional<double> NumberProperty(const std::string& key) const;
  std::optional<std::string> StringProperty(const std::string& key) const;
  std::optional<bool> BoolProperty(const std::string& key) const;
  std::optional<Point> PointProperty(const std::string& key) const;
  // `id` property, falling back to the feature id.
  std::optional<std::string> Identifier() const;
};

// Parses a FeatureCollection and validates every coordinate in `mode`.
// Throws kInput for malformed documents or unsupported geometry types and
// kDomain for bad coordinates or degenerate polygons.
std::vector<GeoFeature> ParseFeatureCollection(std::string_view text,
                                               CoordinateMode mode);

}  // namespace branchloc

#endif  // BRANCHLOC_GEOJSON_H_
