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

// Raster suitability overlay: per-criterion rasterization over a uniform grid
// and weighted combination into a single score surface.

#ifndef BRANCHLOC_OVERLAY_H_
#define BRANCHLOC_OVERLAY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "branchloc/criteria.h"
#include "branchloc/geo.h"
#include "branchloc/weights.h"

namespace branchloc {

inline constexpr std::int64_t kDefaultMaxCells = 4'000'000;
inline constexpr double kDefaultCellSize = 100.0;
inline constexpr double kEsriNoData = -9999.0;

// Uniform grid anchored at its lower-left corner. Row 0 is the northernmost
// row; column 0 the westernmost.
class GridSpec {
 public:
  GridSpec() = default;
  // Throws kConfig unless cell_size > 0, counts are positive, and
  // ncols * nrows <= max_cells.
  static GridSpec Create(Point origin, double cell_size, int ncols, int nrows,
                         std::int64_t max_cells = kDefaultMaxCells);

  Point origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  int ncols() const { return ncols_; }
  int nrows() const { return nrows_; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(ncols_) * static_cast<std::size_t>(nrows_);
  }
  std::size_t Index(int row, int col) const {
    return static_cast<std::size_t>(row) * ncols_ + col;
  }
  Point CellCenter(int row, int col) const;
  // Cell containing `p`, or nullopt outside the grid.
  std::optional<std::size_t> CellAt(Point p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  Point origin_;
  double cell_size_ = kDefaultCellSize;
  int ncols_ = 1;
  int nrows_ = 1;
};

// Per-cell study-area flag: 1 inside, 0 outside.
using CellMask = std::vector<std::uint8_t>;

// Cells whose centers fall inside any of `areas` (inclusive boundaries).
CellMask BuildMask(const GridSpec& grid, std::span<const Polygon> areas);

struct Zone {
  std::string id;
  Polygon polygon;
  std::optional<CategoryLevel> level;  // categorical / cost-level zoning
  std::optional<double> value;         // density zoning
};

struct FeatureLayer {
  std::string id;
  std::vector<Point> points;
  std::vector<Zone> zones;
};

struct SuitabilityRaster {
  GridSpec grid;
  std::string criterion_id;
  std::vector<double> values;  // NaN on masked-out cells
  CellMask mask;
};

enum class CombineMode { kWeightedSum, kLiteralProduct, kWeightedGeometric };

std::string_view CombineModeName(CombineMode mode);
CombineMode ParseCombineMode(std::string_view name);

struct ScoreRaster {
  GridSpec grid;
  CombineMode mode = CombineMode::kWeightedGeometric;
  std::vector<double> values;  // NaN on masked-out cells
  CellMask mask;

  bool IsActive(std::size_t cell) const { return mask[cell] != 0; }
};

// Scores every unmasked cell: distance kinds classify the distance from the
// cell center to the nearest layer point; density and categorical kinds
// classify the attribute of the zone containing the center (when zones
// overlap at a shared edge the best-scoring one wins). `spec` must be
// normalized.
//
// Throws kInput for an empty point layer on a distance criterion, and for an
// unmasked cell that no zone contains.
SuitabilityRaster Rasterize(const CriterionSpec& spec, const FeatureLayer& layer,
                            const GridSpec& grid, const CellMask& mask,
                            const ScoreScheme& scheme, CoordinateMode mode);

// Per unmasked cell c:
//   kWeightedSum        sum_k w_k * s_k(c)
//   kLiteralProduct     prod_k (w_k * s_k(c))
//   kWeightedGeometric  prod_k s_k(c)^w_k, with 0^w = 0
// Weights pair with rasters by position. Throws kInput on grid or mask
// mismatch, or when the weight count differs from the raster count.
ScoreRaster Combine(std::span<const SuitabilityRaster> rasters,
                    const WeightVector& weights, CombineMode mode);

struct AsciiGrid {
  GridSpec grid;
  std::vector<double> values;  // NaN where NODATA
  CellMask mask;
};

// Esri ASCII grid text: NCOLS, NROWS, XLLCORNER, YLLCORNER, CELLSIZE,
// NODATA_VALUE header, then rows north to south. Values use the shortest
// round-trip decimal form.
std::string FormatEsriAscii(const GridSpec& grid, std::span<const double> values,
                            const CellMask& mask, double nodata = kEsriNoData);
AsciiGrid ParseEsriAscii(std::string_view text);

// GeoJSON FeatureCollection of unmasked cell centers with `row`, `col` and
// `score` properties. `metadata` is emitted as a top-level foreign member.
std::string ScorePointsGeoJson(
    const ScoreRaster& raster,
    const std::map<std::string, std::string>& metadata = {});

}  // namespace branchloc

#endif  // BRANCHLOC_OVERLAY_H_
