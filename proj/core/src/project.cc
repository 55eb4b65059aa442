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

#include "branchloc/project.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "branchloc/digest.h"
#include "branchloc/errors.h"
#include "branchloc/geojson.h"
#include "json.hpp"
#include "text_util.h"

namespace branchloc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Runs `f`, prefixing any failure with the config field path.
template <typename F>
auto AtPath(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, path + ": " + e.what());
  }
}

const json& Require(const json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    Fail(ErrorKind::kConfig, path + "." + key + ": required field missing");
  }
  return obj.at(key);
}

std::string RequireString(const json& obj, const std::string& key,
                          const std::string& path) {
  const json& v = Require(obj, key, path);
  if (!v.is_string()) {
    Fail(ErrorKind::kConfig, path + "." + key + ": expected a string");
  }
  return v.get<std::string>();
}

double RequireNumber(const json& obj, const std::string& key,
                     const std::string& path) {
  const json& v = Require(obj, key, path);
  if (!v.is_number()) {
    Fail(ErrorKind::kConfig, path + "." + key + ": expected a number");
  }
  return v.get<double>();
}

double OptNumber(const json& obj, const std::string& key, double fallback,
                 const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) {
    Fail(ErrorKind::kConfig, path + "." + key + ": expected a number");
  }
  return obj.at(key).get<double>();
}

class Loader {
 public:
  Loader(const std::string& path, LoadOptions options)
      : options_(options) {
    cfg_.config_path = path;
    cfg_.base_dir = fs::path(path).parent_path().string();
  }

  ProjectConfig Load() {
    if (!fs::is_regular_file(cfg_.config_path)) {
      Fail(ErrorKind::kConfig,
           "config: file '" + cfg_.config_path + "' does not exist");
    }
    const std::string text = internal::ReadFile(cfg_.config_path);
    cfg_.config_digest = Sha256Hex(text);
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      Fail(ErrorKind::kConfig, "config: " + std::string(e.what()));
    }
    if (!doc.is_object()) Fail(ErrorKind::kConfig, "config: expected an object");

    cfg_.name = doc.value("name", std::string("project"));
    cfg_.mode = AtPath("mode", [&] {
      return ParseCoordinateMode(doc.value("mode", std::string("planar")));
    });
    LoadScheme(doc);
    cfg_.combine_mode = AtPath("combine_mode", [&] {
      return ParseCombineMode(
          doc.value("combine_mode", std::string("weighted_geometric")));
    });
    LoadCriteria(doc);
    LoadDemand(doc);
    LoadGrid(doc);
    LoadExisting(doc);
    LoadConsistency(doc);
    LoadHierarchy(doc);
    LoadSolverSettings(doc);
    return std::move(cfg_);
  }

 private:
  std::string Resolve(const std::string& rel, const std::string& field) {
    const fs::path p = fs::path(cfg_.base_dir) / rel;
    if (!fs::is_regular_file(p)) {
      Fail(ErrorKind::kConfig,
           field + ": referenced file '" + rel + "' does not exist");
    }
    if (!cfg_.input_digests.count(rel)) {
      cfg_.input_digests[rel] = Sha256File(p.string());
    }
    return p.string();
  }

  void LoadScheme(const json& doc) {
    if (!doc.contains("scheme")) return;
    const json& s = doc["scheme"];
    cfg_.scheme = AtPath("scheme", [&] {
      return ScoreScheme::Create(RequireNumber(s, "high", "scheme"),
                                 RequireNumber(s, "mid", "scheme"),
                                 RequireNumber(s, "non", "scheme"));
    });
  }

  CriterionSpec ParseCriterion(const json& c, const std::string& path) {
    CriterionSpec spec;
    spec.id = RequireString(c, "id", path);
    spec.kind = AtPath(path + ".kind", [&] {
      return ParseCriterionKind(RequireString(c, "kind", path));
    });
    if (IsNumericKind(spec.kind)) {
      const json& bands = Require(c, "bands", path);
      if (!bands.is_array() || bands.empty()) {
        Fail(ErrorKind::kConfig, path + ".bands: expected a non-empty array");
      }
      for (std::size_t b = 0; b < bands.size(); ++b) {
        const std::string bp = path + ".bands[" + std::to_string(b) + "]";
        const json& band = bands[b];
        Band out;
        out.suitability = AtPath(bp + ".class", [&] {
          return ParseSuitabilityClass(RequireString(band, "class", bp));
        });
        out.interval.lo = OptNumber(band, "min", 0.0, bp);
        out.interval.hi = band.contains("max") && !band["max"].is_null()
                              ? RequireNumber(band, "max", bp)
                              : kInfinity;
        out.interval.lo_closed = band.value("min_inclusive", true);
        out.interval.hi_closed =
            std::isinf(out.interval.hi) ? false
                                        : band.value("max_inclusive", true);
        spec.bands.push_back(out);
      }
    } else {
      const json& cats = Require(c, "categories", path);
      if (!cats.is_object()) {
        Fail(ErrorKind::kConfig, path + ".categories: expected an object");
      }
      for (const auto& [level, cls] : cats.items()) {
        const std::string cp = path + ".categories." + level;
        CategoryBand cb{AtPath(cp, [&] { return ParseCategoryLevel(level); }),
                        AtPath(cp, [&] {
                          return ParseSuitabilityClass(cls.get<std::string>());
                        })};
        spec.categories.push_back(cb);
      }
    }
    if (c.contains("direction")) {
      const std::string d = RequireString(c, "direction", path);
      if (d == "near_better") {
        spec.direction = Direction::kNearBetter;
      } else if (d == "far_better") {
        spec.direction = Direction::kFarBetter;
      } else if (d == "band_shaped") {
        spec.direction = Direction::kBandShaped;
      } else {
        Fail(ErrorKind::kConfig, path + ".direction: unknown value '" + d + "'");
      }
    }
    return spec;
  }

  void LoadCriteria(const json& doc) {
    const json& list = Require(doc, "criteria", "config");
    if (!list.is_array() || list.empty()) {
      Fail(ErrorKind::kConfig, "criteria: expected a non-empty array");
    }
    NormalizationPolicy policy;
    if (doc.contains("normalization")) {
      policy.resolve_overlaps =
          doc["normalization"].value("resolve_overlaps", true);
      policy.fill_gaps = doc["normalization"].value("fill_gaps", true);
    }
    std::set<std::string> ids;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string path = "criteria[" + std::to_string(k) + "]";
      const json& c = list[k];
      CriterionSpec raw = ParseCriterion(c, path);
      if (!ids.insert(raw.id).second) {
        Fail(ErrorKind::kConfig, path + ".id: duplicate criterion '" + raw.id + "'");
      }
      NormalizedSpec norm =
          AtPath(path, [&] { return ValidateSpec(raw, policy); });
      CriterionEntry entry;
      entry.spec = std::move(norm.spec);
      entry.notes = std::move(norm.notes);
      entry.layer_path = RequireString(c, "layer", path);
      entry.spec.layer_ref = entry.layer_path;
      const std::string resolved = Resolve(entry.layer_path, path + ".layer");
      const std::string property = c.value("property", std::string());
      entry.layer = AtPath(path + ".layer", [&] {
        return LoadLayer(resolved, entry.spec, cfg_.mode, property);
      });
      cfg_.criteria.push_back(std::move(entry));
    }
  }

  void LoadDemand(const json& doc) {
    cfg_.demand_path = RequireString(doc, "demand", "config");
    const std::string resolved = Resolve(cfg_.demand_path, "demand");
    cfg_.demand_areas = AtPath("demand", [&] {
      return LoadDemandAreas(resolved, cfg_.mode);
    });
    if (cfg_.demand_areas.empty()) {
      Fail(ErrorKind::kConfig, "demand: layer has no demand areas");
    }
  }

  void LoadGrid(const json& doc) {
    const json grid = doc.value("grid", json::object());
    const double cell = OptNumber(grid, "cell_size", kDefaultCellSize, "grid");
    const auto max_cells = static_cast<std::int64_t>(
        OptNumber(grid, "max_cells", static_cast<double>(kDefaultMaxCells),
                  "grid"));
    cfg_.grid = AtPath("grid", [&] {
      if (grid.contains("origin") && grid.contains("ncols") &&
          grid.contains("nrows")) {
        const json& o = grid["origin"];
        return GridSpec::Create({o.at(0).get<double>(), o.at(1).get<double>()},
                                cell, grid["ncols"].get<int>(),
                                grid["nrows"].get<int>(), max_cells);
      }
      // Snap the demand-area extent outward to whole cells.
      BoundingBox box = cfg_.demand_areas.front().geometry
                            ? cfg_.demand_areas.front().geometry->bounds()
                            : BoundingBox{};
      for (const DemandArea& a : cfg_.demand_areas) {
        if (!a.geometry) continue;
        const BoundingBox& b = a.geometry->bounds();
        box.min_x = std::min(box.min_x, b.min_x);
        box.min_y = std::min(box.min_y, b.min_y);
        box.max_x = std::max(box.max_x, b.max_x);
        box.max_y = std::max(box.max_y, b.max_y);
      }
      const double ox = std::floor(box.min_x / cell) * cell;
      const double oy = std::floor(box.min_y / cell) * cell;
      const int ncols = std::max(1, static_cast<int>(std::ceil((box.max_x - ox) / cell)));
      const int nrows = std::max(1, static_cast<int>(std::ceil((box.max_y - oy) / cell)));
      return GridSpec::Create({ox, oy}, cell, ncols, nrows, max_cells);
    });
  }

  void LoadExisting(const json& doc) {
    if (!doc.contains("existing_branches")) return;
    cfg_.existing_path = RequireString(doc, "existing_branches", "config");
    const std::string resolved = Resolve(cfg_.existing_path, "existing_branches");
    cfg_.existing_branches = AtPath("existing_branches", [&] {
      return LoadExistingBranches(resolved, cfg_.mode);
    });
  }

  void LoadConsistency(const json& doc) {
    if (!doc.contains("consistency")) return;
    const json& c = doc["consistency"];
    cfg_.consistency_threshold = OptNumber(
        c, "threshold", kDefaultConsistencyThreshold, "consistency");
    if (!(cfg_.consistency_threshold > 0.0)) {
      Fail(ErrorKind::kConfig, "consistency.threshold: must be positive");
    }
    if (c.contains("random_index")) {
      std::map<int, double> table;
      for (const auto& [n, ri] : c["random_index"].items()) {
        table[std::stoi(n)] = ri.get<double>();
      }
      cfg_.random_index = AtPath("consistency.random_index",
                                 [&] { return RandomIndexTable(table); });
    }
  }

  HierarchyNode ParseNode(const json& n, const std::string& path) {
    HierarchyNode node;
    if (n.contains("criterion")) {
      node.id = RequireString(n, "criterion", path);
      return node;
    }
    node.id = RequireString(n, "id", path);
    const json& children = Require(n, "children", path);
    if (!children.is_array() || children.empty()) {
      Fail(ErrorKind::kConfig, path + ".children: expected a non-empty array");
    }
    for (std::size_t k = 0; k < children.size(); ++k) {
      node.children.push_back(
          ParseNode(children[k], path + ".children[" + std::to_string(k) + "]"));
    }
    if (n.contains("matrix")) {
      const std::string rel = RequireString(n, "matrix", path);
      const std::string resolved = Resolve(rel, path + ".matrix");
      cfg_.matrix_paths[node.id] = rel;
      node.matrix = AtPath(path + ".matrix", [&] {
        return LoadComparisonCsv(resolved, node.id);
      });
    }
    return node;
  }

  void LoadHierarchy(const json& doc) {
    HierarchyNode root = ParseNode(Require(doc, "hierarchy", "config"), "hierarchy");
    cfg_.hierarchy = AtPath("hierarchy", [&] { return Hierarchy::Create(root); });

    std::set<std::string> leaves;
    for (const std::string& id : cfg_.hierarchy.LeafIds()) {
      leaves.insert(id);
      bool declared = false;
      for (const auto& c : cfg_.criteria) declared |= c.spec.id == id;
      if (!declared) {
        Fail(ErrorKind::kConfig,
             "hierarchy: leaf '" + id + "' is not a declared criterion");
      }
    }
    for (const auto& c : cfg_.criteria) {
      if (!leaves.count(c.spec.id)) {
        Fail(ErrorKind::kConfig, "criteria: '" + c.spec.id +
                                     "' does not appear in the hierarchy");
      }
    }

    std::string failing;
    auto visit = [&](auto&& self, const HierarchyNode& node) -> void {
      if (node.matrix) {
        GateResult g =
            Gate(*node.matrix, cfg_.consistency_threshold, cfg_.random_index);
        if (!g.passed) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%.4f", g.consistency_ratio);
          failing += (failing.empty() ? "'" : ", '") + node.id + "' (CR " +
                     buf + ")";
        }
        cfg_.gates.push_back(std::move(g));
      }
      for (const auto& c : node.children) self(self, c);
    };
    visit(visit, cfg_.hierarchy.root());
    if (!failing.empty() && options_.enforce_gates) {
      Fail(ErrorKind::kGate, "hierarchy: consistency gate failed for " + failing);
    }
  }

  void LoadSolverSettings(const json& doc) {
    const json ex = doc.value("extraction", json::object());
    cfg_.extraction.min_score = OptNumber(ex, "min_score", 0.0, "extraction");
    cfg_.extraction.min_separation =
        OptNumber(ex, "min_separation", 500.0, "extraction");
    cfg_.extraction.max_proposed =
        static_cast<int>(OptNumber(ex, "max_proposed", 14, "extraction"));
    AtPath("extraction", [&] { cfg_.extraction.Validate(); });

    const json tiering = doc.value("tiering", json::object());
    const std::string method = tiering.value("method", std::string("tercile"));
    if (method == "tercile") {
      cfg_.tiering.method = TieringConfig::Method::kTercile;
    } else if (method == "threshold") {
      cfg_.tiering.method = TieringConfig::Method::kThreshold;
      cfg_.tiering.first_min = RequireNumber(tiering, "first_min", "tiering");
      cfg_.tiering.second_min = RequireNumber(tiering, "second_min", "tiering");
      if (!(cfg_.tiering.first_min >= cfg_.tiering.second_min)) {
        Fail(ErrorKind::kConfig, "tiering: first_min must be >= second_min");
      }
    } else {
      Fail(ErrorKind::kConfig, "tiering.method: unknown value '" + method + "'");
    }

    const json& st = Require(doc, "standard", "config");
    const std::string kind = RequireString(st, "kind", "standard");
    cfg_.standard = AtPath("standard", [&] {
      if (kind == "radius") {
        return CoverageStandard::Radius(RequireNumber(st, "radius", "standard"));
      }
      if (kind == "travel_time") {
        return CoverageStandard::TravelTime(
            RequireNumber(st, "minutes", "standard"),
            RequireNumber(st, "speed_kmh", "standard"));
      }
      Fail(ErrorKind::kConfig, "kind: unknown value '" + kind + "'");
    });

    const double p_max = OptNumber(doc, "p_max", 3, "config");
    if (p_max < 1 || p_max != std::floor(p_max)) {
      Fail(ErrorKind::kConfig, "p_max: must be a positive integer");
    }
    cfg_.p_max = static_cast<int>(p_max);
    cfg_.solver = AtPath("solver", [&] {
      return ParseSolverMethod(doc.value("solver", std::string("exact")));
    });
    cfg_.exact.size_cap = static_cast<int>(
        OptNumber(doc, "exact_size_cap", kDefaultExactSizeCap, "config"));
    cfg_.exact.override_cap = doc.value("exact_override_cap", false);
  }

  LoadOptions options_;
  ProjectConfig cfg_;
};

}  // namespace

const CriterionEntry& ProjectConfig::Criterion(const std::string& id) const {
  for (const CriterionEntry& c : criteria) {
    if (c.spec.id == id) return c;
  }
  Fail(ErrorKind::kConfig, "unknown criterion '" + id + "'");
}

ProjectConfig LoadProject(const std::string& path, LoadOptions options) {
  return Loader(path, options).Load();
}

FeatureLayer LoadLayer(const std::string& path, const CriterionSpec& spec,
                       CoordinateMode mode, const std::string& property) {
  const std::vector<GeoFeature> features =
      ParseFeatureCollection(internal::ReadFile(path), mode);
  FeatureLayer layer;
  layer.id = spec.id;
  if (spec.kind == CriterionKind::kDistance) {
    for (const GeoFeature& f : features) {
      if (!f.polygons.empty() || f.points.empty()) {
        Fail(ErrorKind::kInput, "criterion '" + spec.id +
                                    "' needs point features; layer has "
                                    "non-point geometry");
      }
      layer.points.insert(layer.points.end(), f.points.begin(), f.points.end());
    }
    return layer;
  }
  const bool numeric = spec.kind == CriterionKind::kDensity;
  const std::string key =
      !property.empty() ? property : (numeric ? "density" : "level");
  int index = 0;
  for (const GeoFeature& f : features) {
    ++index;
    if (f.polygons.empty() || !f.points.empty()) {
      Fail(ErrorKind::kInput, "criterion '" + spec.id +
                                  "' needs polygon features; layer has "
                                  "non-polygon geometry");
    }
    const std::string zone_id =
        f.Identifier().value_or("zone" + std::to_string(index));
    std::optional<double> value;
    std::optional<CategoryLevel> level;
    if (numeric) {
      value = f.NumberProperty(key);
      if (!value || *value < 0.0) {
        Fail(ErrorKind::kInput, "zone '" + zone_id +
                                    "' lacks a non-negative numeric '" + key +
                                    "' property");
      }
    } else {
      auto s = f.StringProperty(key);
      if (!s) {
        Fail(ErrorKind::kInput,
             "zone '" + zone_id + "' lacks a '" + key + "' property");
      }
      level = ParseCategoryLevel(*s);
    }
    for (const Polygon& poly : f.polygons) {
      layer.zones.push_back({zone_id, poly, level, value});
    }
  }
  return layer;
}

std::vector<DemandArea> LoadDemandAreas(const std::string& path,
                                        CoordinateMode mode) {
  const std::vector<GeoFeature> features =
      ParseFeatureCollection(internal::ReadFile(path), mode);
  std::vector<DemandArea> out;
  std::set<std::string> ids;
  int index = 0;
  for (const GeoFeature& f : features) {
    ++index;
    char fallback[16];
    std::snprintf(fallback, sizeof(fallback), "A%02d", index);
    const std::string id = f.Identifier().value_or(fallback);
    if (f.polygons.size() != 1 || !f.points.empty()) {
      Fail(ErrorKind::kInput,
           "demand area '" + id + "' must be a single Polygon");
    }
    auto population = f.NumberProperty("population");
    if (!population) {
      Fail(ErrorKind::kInput,
           "demand area '" + id + "' lacks a numeric 'population' property");
    }
    std::optional<Point> centroid = f.PointProperty("centroid");
    if (centroid) ValidatePoint(mode, *centroid);
    if (!ids.insert(id).second) {
      Fail(ErrorKind::kInput, "duplicate demand area id '" + id + "'");
    }
    out.push_back(
        DemandArea::Create(id, f.polygons.front(), *population, centroid));
  }
  return out;
}

std::vector<ExistingBranch> LoadExistingBranches(const std::string& path,
                                                 CoordinateMode mode) {
  const std::vector<GeoFeature> features =
      ParseFeatureCollection(internal::ReadFile(path), mode);
  std::vector<ExistingBranch> out;
  int index = 0;
  for (const GeoFeature& f : features) {
    ++index;
    char fallback[16];
    std::snprintf(fallback, sizeof(fallback), "E%02d", index);
    const std::string id = f.Identifier().value_or(fallback);
    if (f.points.size() != 1 || !f.polygons.empty()) {
      Fail(ErrorKind::kInput,
           "existing branch '" + id + "' must be a single Point");
    }
    out.push_back({id, f.points.front(), f.BoolProperty("fixed_open").value_or(false)});
  }
  return out;
}

}  // namespace branchloc
