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

#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "branchloc/criteria.h"
#include "branchloc/overlay.h"

namespace branchloc {
namespace {

void BM_RasterizeDistance(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const GridSpec grid = GridSpec::Create({0, 0}, 10, side, side);
  const CellMask mask(grid.cell_count(), 1);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 10.0 * side);
  FeatureLayer layer{"atm", {}, {}};
  for (int k = 0; k < 200; ++k) layer.points.push_back({u(rng), u(rng)});
  CriterionSpec spec;
  spec.id = "atm";
  spec.bands = {{Interval::AtMost(100), SuitabilityClass::kHighSuitable},
                {Interval::Between(100, 300), SuitabilityClass::kSuitable},
                {Interval::AtLeast(300), SuitabilityClass::kNonSuitable}};
  spec = ValidateSpec(spec).spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        Rasterize(spec, layer, grid, mask, ScoreScheme(), CoordinateMode::kPlanar)
            .values);
  }
  state.SetItemsProcessed(state.iterations() * grid.cell_count());
}
BENCHMARK(BM_RasterizeDistance)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Combine(benchmark::State& state) {
  const GridSpec grid = GridSpec::Create({0, 0}, 10, 500, 500);
  const CellMask mask(grid.cell_count(), 1);
  std::mt19937_64 rng(5);
  const double scores[] = {0.6, 0.4, 0.0};
  std::vector<SuitabilityRaster> rasters(12);
  for (auto& r : rasters) {
    r.grid = grid;
    r.mask = mask;
    r.values.resize(grid.cell_count());
    for (double& v : r.values) v = scores[rng() % 3];
  }
  const WeightVector w(std::vector<double>(12, 1.0 / 12));
  const auto mode = static_cast<CombineMode>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Combine(rasters, w, mode).values);
  }
  state.SetLabel(std::string(CombineModeName(mode)));
  state.SetItemsProcessed(state.iterations() * grid.cell_count());
}
BENCHMARK(BM_Combine)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace branchloc
