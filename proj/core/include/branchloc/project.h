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

// Project configuration: one JSON file naming the criteria, their layers, the
// weighting hierarchy, and the extraction and covering parameters. Loading
// validates everything up front so no computation starts on a bad project.

#ifndef BRANCHLOC_PROJECT_H_
#define BRANCHLOC_PROJECT_H_

#include <map>
#include <string>
#include <vector>

#include "branchloc/candidates.h"
#include "branchloc/criteria.h"
#include "branchloc/geo.h"
#include "branchloc/mclp.h"
#include "branchloc/overlay.h"
#include "branchloc/weights.h"

namespace branchloc {

struct CriterionEntry {
  CriterionSpec spec;  // normalized
  std::vector<NormalizationNote> notes;
  std::string layer_path;  // as written in the config
  FeatureLayer layer;
};

struct TieringConfig {
  enum class Method { kTercile, kThreshold };
  Method method = Method::kTercile;
  double first_min = 0.0;
  double second_min = 0.0;
};

struct ProjectConfig {
  std::string name;
  std::string config_path;
  std::string base_dir;

  CoordinateMode mode = CoordinateMode::kPlanar;
  GridSpec grid;
  ScoreScheme scheme;
  CombineMode combine_mode = CombineMode::kWeightedGeometric;

  std::vector<CriterionEntry> criteria;
  Hierarchy hierarchy;
  std::map<std::string, std::string> matrix_paths;  // node id -> path
  double consistency_threshold = kDefaultConsistencyThreshold;
  RandomIndexTable random_index = RandomIndexTable::Saaty();
  std::vector<GateResult> gates;

  std::string demand_path;
  std::vector<DemandArea> demand_areas;
  std::string existing_path;
  std::vector<ExistingBranch> existing_branches;

  ExtractionConfig extraction;
  TieringConfig tiering;
  CoverageStandard standard;
  int p_max = 3;
  SolverMethod solver = SolverMethod::kExact;
  ExactOptions exact;

  std::string config_digest;
  // Relative path (as written) -> SHA-256 of every file the config names.
  std::map<std::string, std::string> input_digests;

  const CriterionEntry& Criterion(const std::string& id) const;
};

struct LoadOptions {
  // When false, gate results are recorded but failing matrices do not abort
  // the load.
  bool enforce_gates = true;
};

// Throws kIo when the config file cannot be read, kConfig for schema
// violations and missing referenced files (messages carry the field path),
// kSpec for irreparable criteria, and kGate when a matrix fails the gate.
ProjectConfig LoadProject(const std::string& path, LoadOptions options = {});

// Reads the feature layer a criterion needs: Point/MultiPoint features for
// distance kinds; polygons carrying `property` (default "level" for zoning,
// "density" for density) otherwise.
FeatureLayer LoadLayer(const std::string& path, const CriterionSpec& spec,
                       CoordinateMode mode, const std::string& property = {});

// Polygons with a numeric `population` property, optional `id` and optional
// explicit `centroid` [x, y]. Ids default to "A01", "A02", ...
std::vector<DemandArea> LoadDemandAreas(const std::string& path,
                                        CoordinateMode mode);

// Points with optional `id` (default "E01", ...) and `fixed_open`.
std::vector<ExistingBranch> LoadExistingBranches(const std::string& path,
                                                 CoordinateMode mode);

}  // namespace branchloc

#endif  // BRANCHLOC_PROJECT_H_
