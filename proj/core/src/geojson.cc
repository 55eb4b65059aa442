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

#include "branchloc/geojson.h"

#include "branchloc/errors.h"
#include "json.hpp"

namespace branchloc {
namespace {

using nlohmann::json;

Point ReadPosition(const json& pos, CoordinateMode mode) {
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() ||
      !pos[1].is_number()) {
    Fail(ErrorKind::kInput, "GeoJSON position must be [x, y]");
  }
  Point p{pos[0].get<double>(), pos[1].get<double>()};
  ValidatePoint(mode, p);
  return p;
}

std::vector<Point> ReadRing(const json& ring, CoordinateMode mode) {
  std::vector<Point> out;
  for (const auto& pos : ring) out.push_back(ReadPosition(pos, mode));
  return out;
}

Polygon ReadPolygon(const json& rings, CoordinateMode mode) {
  if (!rings.is_array() || rings.empty()) {
    Fail(ErrorKind::kInput, "GeoJSON polygon needs at least one ring");
  }
  std::vector<std::vector<Point>> holes;
  for (std::size_t i = 1; i < rings.size(); ++i) {
    holes.push_back(ReadRing(rings[i], mode));
  }
  return Polygon::Create(ReadRing(rings[0], mode), std::move(holes));
}

PropertyValue ToProperty(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) return std::monostate{};
      out.push_back(e.get<double>());
    }
    return out;
  }
  return std::monostate{};
}

}  // namespace

std::optional<double> GeoFeature::NumberProperty(const std::string& key) const {
  auto it = properties.find(key);
  if (it == properties.end()) return std::nullopt;
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  return std::nullopt;
}

std::optional<std::string> GeoFeature::StringProperty(
    const std::string& key) const {
  auto it = properties.find(key);
  if (it == properties.end()) return std::nullopt;
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  return std::nullopt;
}

std::optional<bool> GeoFeature::BoolProperty(const std::string& key) const {
  auto it = properties.find(key);
  if (it == properties.end()) return std::nullopt;
  if (const bool* b = std::get_if<bool>(&it->second)) return *b;
  return std::nullopt;
}

std::optional<Point> GeoFeature::PointProperty(const std::string& key) const {
  auto it = properties.find(key);
  if (it == properties.end()) return std::nullopt;
  const auto* v = std::get_if<std::vector<double>>(&it->second);
  if (v == nullptr || v->size() != 2) return std::nullopt;
  return Point{(*v)[0], (*v)[1]};
}

std::optional<std::string> GeoFeature::Identifier() const {
  if (auto s = StringProperty("id")) return s;
  return id;
}

std::vector<GeoFeature> ParseFeatureCollection(std::string_view text,
                                               CoordinateMode mode) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorKind::kInput, std::string("GeoJSON parse error: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    Fail(ErrorKind::kInput, "GeoJSON document is not a FeatureCollection");
  }
  if (!doc.contains("features") || !doc["features"].is_array()) {
    Fail(ErrorKind::kInput, "GeoJSON FeatureCollection lacks a features array");
  }
  std::vector<GeoFeature> out;
  std::size_t index = 0;
  for (const auto& f : doc["features"]) {
    const std::string where = "feature " + std::to_string(index++);
    if (!f.is_object() || f.value("type", "") != "Feature") {
      Fail(ErrorKind::kInput, where + " is not a Feature");
    }
    GeoFeature feature;
    if (f.contains("id")) {
      feature.id = f["id"].is_string() ? f["id"].get<std::string>()
                                       : f["id"].dump();
    }
    if (f.contains("properties") && f["properties"].is_object()) {
      for (const auto& [k, v] : f["properties"].items()) {
        feature.properties[k] = ToProperty(v);
      }
    }
    if (!f.contains("geometry") || !f["geometry"].is_object()) {
      Fail(ErrorKind::kInput, where + " has no geometry");
    }
    const json& g = f["geometry"];
    const std::string type = g.value("type", "");
    if (!g.contains("coordinates")) {
      Fail(ErrorKind::kInput, where + " geometry has no coordinates");
    }
    const json& c = g["coordinates"];
    try {
      if (type == "Point") {
        feature.points.push_back(ReadPosition(c, mode));
      } else if (type == "MultiPoint") {
        for (const auto& pos : c) feature.points.push_back(ReadPosition(pos, mode));
      } else if (type == "Polygon") {
        feature.polygons.push_back(ReadPolygon(c, mode));
      } else if (type == "MultiPolygon") {
        for (const auto& rings : c) {
          feature.polygons.push_back(ReadPolygon(rings, mode));
        }
      } else {
        Fail(ErrorKind::kInput,
             where + " has unsupported geometry type '" + type + "'");
      }
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
    out.push_back(std::move(feature));
  }
  return out;
}

}  // namespace branchloc
