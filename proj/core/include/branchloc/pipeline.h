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

// End-to-end run: weights, criterion rasters, combined surface, candidate
// sites, coverage instance and curve. Each stage is exposed on its own so the
// CLI can stop early.

#ifndef BRANCHLOC_PIPELINE_H_
#define BRANCHLOC_PIPELINE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "branchloc/candidates.h"
#include "branchloc/mclp.h"
#include "branchloc/overlay.h"
#include "branchloc/project.h"
#include "branchloc/weights.h"

namespace branchloc {

// Synthesized leaf weights. Throws kGate if any matrix fails.
Synthesis ComputeWeights(const ProjectConfig& cfg);

// Cells whose centers fall in some demand area.
CellMask StudyMask(const ProjectConfig& cfg);

// One raster per leaf, in the order of `leaf_order`.
std::vector<SuitabilityRaster> RasterizeCriteria(
    const ProjectConfig& cfg, const CellMask& mask,
    const std::vector<std::string>& leaf_order);

ScoreRaster ScoreSurface(const ProjectConfig& cfg, const Synthesis& weights,
                         std::vector<SuitabilityRaster>* rasters = nullptr);

// Extract, tier and merge with the existing branches.
std::vector<CandidateSite> SelectCandidates(const ProjectConfig& cfg,
                                            const ScoreRaster& surface);

MclpInstance BuildInstance(const ProjectConfig& cfg,
                           std::vector<CandidateSite> candidates);

struct RunReport {
  std::string name;
  CoordinateMode mode = CoordinateMode::kPlanar;
  std::string config_digest;
  std::map<std::string, std::string> input_digests;
  ScoreScheme scheme;
  CombineMode combine_mode = CombineMode::kWeightedGeometric;
  std::vector<std::pair<std::string, std::vector<NormalizationNote>>>
      normalization;
  Synthesis weights;
  std::vector<SuitabilityRaster> rasters;
  ScoreRaster surface;
  std::vector<CandidateSite> candidates;
  std::optional<MclpInstance> instance;
  std::optional<CoverageCurve> curve;
  SolverMethod solver = SolverMethod::kExact;
  int p_max = 0;
  double coverage_radius_m = 0.0;
  // Signals such as "empty_candidate_extraction".
  std::vector<std::string> notes;
};

// Runs every stage. Errors keep their kind and gain a "<stage>: " prefix.
RunReport RunPipeline(const ProjectConfig& cfg);

// Report body as JSON. Contains no timestamps or absolute paths.
std::string ReportToJson(const RunReport& report);

// Writes every artifact under `out_dir`. Files written before a failure are
// removed. Throws kIo when the directory cannot be written.
void RenderReport(const RunReport& report, const std::string& out_dir);

// Re-renders coverage.csv and candidates.geojson from a saved report.json.
void RenderFromReportJson(const std::string& report_path,
                          const std::string& out_dir);

// Metadata embedded in every artifact.
std::map<std::string, std::string> ArtifactMetadata(const RunReport& report);

// Exclusive lock on an output directory, held for the object's lifetime.
// Throws kIo if another process holds it.
class OutputLock {
 public:
  explicit OutputLock(const std::string& out_dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::string path_;
  int fd_ = -1;
};

}  // namespace branchloc

#endif  // BRANCHLOC_PIPELINE_H_
