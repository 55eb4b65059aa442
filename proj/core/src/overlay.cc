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

#include "branchloc/overlay.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "branchloc/errors.h"
#include "json.hpp"
#include "text_util.h"

namespace branchloc {
namespace {

using internal::FormatDouble;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string CellName(int row, int col) {
  return "cell (row " + std::to_string(row) + ", col " + std::to_string(col) +
         ")";
}

}  // namespace

GridSpec GridSpec::Create(Point origin, double cell_size, int ncols, int nrows,
                          std::int64_t max_cells) {
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    Fail(ErrorKind::kConfig, "grid origin must be finite");
  }
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    Fail(ErrorKind::kConfig, "grid cell_size must be positive");
  }
  if (ncols <= 0 || nrows <= 0) {
    Fail(ErrorKind::kConfig, "grid ncols and nrows must be positive");
  }
  if (static_cast<std::int64_t>(ncols) * nrows > max_cells) {
    Fail(ErrorKind::kConfig, "grid has " +
                                 std::to_string(static_cast<std::int64_t>(ncols) *
                                                nrows) +
                                 " cells, cap is " + std::to_string(max_cells));
  }
  GridSpec g;
  g.origin_ = origin;
  g.cell_size_ = cell_size;
  g.ncols_ = ncols;
  g.nrows_ = nrows;
  return g;
}

Point GridSpec::CellCenter(int row, int col) const {
  return {origin_.x + (col + 0.5) * cell_size_,
          origin_.y + (nrows_ - row - 0.5) * cell_size_};
}

std::optional<std::size_t> GridSpec::CellAt(Point p) const {
  const double fx = (p.x - origin_.x) / cell_size_;
  const double fy = (p.y - origin_.y) / cell_size_;
  if (!(fx >= 0.0 && fy >= 0.0 && fx < ncols_ && fy < nrows_)) {
    return std::nullopt;
  }
  const int col = static_cast<int>(fx);
  const int row = nrows_ - 1 - static_cast<int>(fy);
  return Index(row, col);
}

CellMask BuildMask(const GridSpec& grid, std::span<const Polygon> areas) {
  CellMask mask(grid.cell_count(), 0);
  for (int r = 0; r < grid.nrows(); ++r) {
    for (int c = 0; c < grid.ncols(); ++c) {
      const Point center = grid.CellCenter(r, c);
      for (const Polygon& poly : areas) {
        if (PointInPolygon(center, poly)) {
          mask[grid.Index(r, c)] = 1;
          break;
        }
      }
    }
  }
  return mask;
}

std::string_view CombineModeName(CombineMode mode) {
  switch (mode) {
    case CombineMode::kWeightedSum:
      return "weighted_sum";
    case CombineMode::kLiteralProduct:
      return "literal_product";
    case CombineMode::kWeightedGeometric:
      return "weighted_geometric";
  }
  return "weighted_geometric";
}

CombineMode ParseCombineMode(std::string_view name) {
  if (name == "weighted_sum") return CombineMode::kWeightedSum;
  if (name == "literal_product") return CombineMode::kLiteralProduct;
  if (name == "weighted_geometric") return CombineMode::kWeightedGeometric;
  Fail(ErrorKind::kConfig,
       "unknown combine mode '" + std::string(name) +
           "' (expected weighted_sum, literal_product or weighted_geometric)");
}

SuitabilityRaster Rasterize(const CriterionSpec& spec, const FeatureLayer& layer,
                            const GridSpec& grid, const CellMask& mask,
                            const ScoreScheme& scheme, CoordinateMode mode) {
  if (mask.size() != grid.cell_count()) {
    Fail(ErrorKind::kInput, "mask size does not match grid");
  }
  SuitabilityRaster out;
  out.grid = grid;
  out.criterion_id = spec.id;
  out.mask = mask;
  out.values.assign(grid.cell_count(), kNaN);

  if (spec.kind == CriterionKind::kDistance) {
    if (layer.points.empty()) {
      Fail(ErrorKind::kInput,
           "criterion '" + spec.id + "': empty feature layer");
    }
    const SpatialIndex index(mode, layer.points);
    for (int r = 0; r < grid.nrows(); ++r) {
      for (int c = 0; c < grid.ncols(); ++c) {
        const std::size_t i = grid.Index(r, c);
        if (!mask[i]) continue;
        const double d = index.NearestDistance(grid.CellCenter(r, c));
        out.values[i] = Score(Classify(spec, d), scheme);
      }
    }
    return out;
  }

  const bool numeric = spec.kind == CriterionKind::kDensity;
  for (const Zone& z : layer.zones) {
    if (numeric && !z.value) {
      Fail(ErrorKind::kInput, "criterion '" + spec.id + "': zone '" + z.id +
                                  "' has no numeric value");
    }
    if (!numeric && !z.level) {
      Fail(ErrorKind::kInput, "criterion '" + spec.id + "': zone '" + z.id +
                                  "' has no level");
    }
  }
  for (int r = 0; r < grid.nrows(); ++r) {
    for (int c = 0; c < grid.ncols(); ++c) {
      const std::size_t i = grid.Index(r, c);
      if (!mask[i]) continue;
      const Point center = grid.CellCenter(r, c);
      std::optional<SuitabilityClass> best;
      for (const Zone& z : layer.zones) {
        if (!PointInPolygon(center, z.polygon)) continue;
        const SuitabilityClass cls =
            numeric ? Classify(spec, *z.value) : Classify(spec, *z.level);
        if (!best || SuitabilityRank(cls) > SuitabilityRank(*best)) best = cls;
      }
      if (!best) {
        Fail(ErrorKind::kInput, "criterion '" + spec.id + "': " +
                                    CellName(r, c) +
                                    " lies in no zoning polygon");
      }
      out.values[i] = Score(*best, scheme);
    }
  }
  return out;
}

ScoreRaster Combine(std::span<const SuitabilityRaster> rasters,
                    const WeightVector& weights, CombineMode mode) {
  if (rasters.empty()) Fail(ErrorKind::kInput, "no rasters to combine");
  if (weights.size() != rasters.size()) {
    Fail(ErrorKind::kInput, std::to_string(weights.size()) + " weights for " +
                                std::to_string(rasters.size()) + " rasters");
  }
  const GridSpec& grid = rasters.front().grid;
  const CellMask& mask = rasters.front().mask;
  for (const SuitabilityRaster& r : rasters) {
    if (!(r.grid == grid)) {
      Fail(ErrorKind::kInput,
           "raster '" + r.criterion_id + "' is on a different grid");
    }
    if (r.mask != mask) {
      Fail(ErrorKind::kInput,
           "raster '" + r.criterion_id + "' has a different study mask");
    }
  }
  ScoreRaster out;
  out.grid = grid;
  out.mode = mode;
  out.mask = mask;
  out.values.assign(grid.cell_count(), kNaN);
  const std::size_t k = rasters.size();
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    if (!mask[i]) continue;
    double acc = mode == CombineMode::kWeightedSum ? 0.0 : 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double s = rasters[j].values[i];
      const double w = weights[j];
      switch (mode) {
        case CombineMode::kWeightedSum:
          acc += w * s;
          break;
        case CombineMode::kLiteralProduct:
          acc *= w * s;
          break;
        case CombineMode::kWeightedGeometric:
          acc = s == 0.0 ? 0.0 : acc * std::pow(s, w);
          break;
      }
    }
    out.values[i] = acc;
  }
  return out;
}

std::string FormatEsriAscii(const GridSpec& grid, std::span<const double> values,
                            const CellMask& mask, double nodata) {
  std::string out;
  out += "NCOLS " + std::to_string(grid.ncols()) + "\n";
  out += "NROWS " + std::to_string(grid.nrows()) + "\n";
  out += "XLLCORNER " + FormatDouble(grid.origin().x) + "\n";
  out += "YLLCORNER " + FormatDouble(grid.origin().y) + "\n";
  out += "CELLSIZE " + FormatDouble(grid.cell_size()) + "\n";
  out += "NODATA_VALUE " + FormatDouble(nodata) + "\n";
  for (int r = 0; r < grid.nrows(); ++r) {
    for (int c = 0; c < grid.ncols(); ++c) {
      const std::size_t i = grid.Index(r, c);
      if (c > 0) out += ' ';
      out += mask[i] ? FormatDouble(values[i]) : FormatDouble(nodata);
    }
    out += '\n';
  }
  return out;
}

AsciiGrid ParseEsriAscii(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::map<std::string, double> header;
  std::string token;
  std::streampos data_start = in.tellg();
  while (in >> token) {
    std::string key = token;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (key.empty() || !(std::isalpha(static_cast<unsigned char>(key[0])))) {
      break;
    }
    std::string value;
    if (!(in >> value)) {
      Fail(ErrorKind::kInput, "ASCII grid header '" + token + "' has no value");
    }
    auto parsed = internal::ParseDouble(value);
    if (!parsed) {
      Fail(ErrorKind::kInput, "ASCII grid header '" + token +
                                  "' has non-numeric value '" + value + "'");
    }
    header[key] = *parsed;
    data_start = in.tellg();
  }
  for (const char* required : {"ncols", "nrows", "cellsize"}) {
    if (!header.count(required)) {
      Fail(ErrorKind::kInput,
           std::string("ASCII grid header lacks ") + required);
    }
  }
  const double cell = header["cellsize"];
  const int ncols = static_cast<int>(header["ncols"]);
  const int nrows = static_cast<int>(header["nrows"]);
  Point origin;
  if (header.count("xllcorner") && header.count("yllcorner")) {
    origin = {header["xllcorner"], header["yllcorner"]};
  } else if (header.count("xllcenter") && header.count("yllcenter")) {
    origin = {header["xllcenter"] - cell / 2, header["yllcenter"] - cell / 2};
  } else {
    Fail(ErrorKind::kInput, "ASCII grid header lacks the lower-left corner");
  }
  const double nodata =
      header.count("nodata_value") ? header["nodata_value"] : kEsriNoData;

  AsciiGrid out;
  out.grid = GridSpec::Create(origin, cell, ncols, nrows);
  out.values.assign(out.grid.cell_count(), kNaN);
  out.mask.assign(out.grid.cell_count(), 0);
  in.clear();
  in.seekg(data_start);
  for (std::size_t i = 0; i < out.grid.cell_count(); ++i) {
    if (!(in >> token)) {
      Fail(ErrorKind::kInput, "ASCII grid ends after " + std::to_string(i) +
                                  " of " +
                                  std::to_string(out.grid.cell_count()) +
                                  " values");
    }
    auto v = internal::ParseDouble(token);
    if (!v) Fail(ErrorKind::kInput, "ASCII grid value '" + token + "'");
    if (*v != nodata) {
      out.values[i] = *v;
      out.mask[i] = 1;
    }
  }
  return out;
}

std::string ScorePointsGeoJson(
    const ScoreRaster& raster,
    const std::map<std::string, std::string>& metadata) {
  nlohmann::ordered_json fc;
  fc["type"] = "FeatureCollection";
  if (!metadata.empty()) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : metadata) meta[k] = v;
    fc["metadata"] = meta;
  }
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  const GridSpec& g = raster.grid;
  for (int r = 0; r < g.nrows(); ++r) {
    for (int c = 0; c < g.ncols(); ++c) {
      const std::size_t i = g.Index(r, c);
      if (!raster.mask[i]) continue;
      const Point p = g.CellCenter(r, c);
      nlohmann::ordered_json f;
      f["type"] = "Feature";
      f["geometry"] = {{"type", "Point"}, {"coordinates", {p.x, p.y}}};
      f["properties"] = {{"row", r}, {"col", c}, {"score", raster.values[i]}};
      features.push_back(std::move(f));
    }
  }
  fc["features"] = std::move(features);
  return fc.dump() + "\n";
}

}  // namespace branchloc
