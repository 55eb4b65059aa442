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

// Maximal covering location problem: coverage construction from demand
// centroids and candidate sites, an exact branch-and-bound solver, the greedy
// heuristic with single-swap improvement, and coverage curves over p.
//
//   maximize   z = sum_i a_i y_i
//   subject to sum_{j in N_i} x_j >= y_i   for every area i
//              sum_j x_j = p
//              x_j, y_i in {0, 1}

#ifndef BRANCHLOC_MCLP_H_
#define BRANCHLOC_MCLP_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "branchloc/candidates.h"
#include "branchloc/geo.h"

namespace branchloc {

struct DemandArea {
  std::string id;
  std::optional<Polygon> geometry;
  Point centroid;
  double population = 0.0;

  // Centroid defaults to the vertex mean of `geometry`. Throws kInput when
  // population is negative or not finite, or the centroid lies outside the
  // geometry.
  static DemandArea Create(std::string id, std::optional<Polygon> geometry,
                           double population,
                           std::optional<Point> centroid = std::nullopt);
};

enum class CoverageKind { kRadius, kTravelTime };

struct CoverageStandard {
  CoverageKind kind = CoverageKind::kRadius;
  double radius_m = 0.0;
  double minutes = 0.0;
  double speed_kmh = 0.0;

  static CoverageStandard Radius(double meters);
  static CoverageStandard TravelTime(double minutes, double speed_kmh);

  // Radius, or speed * time converted to meters. Throws kConfig unless the
  // magnitudes are strictly positive.
  double EffectiveRadius() const;
};

// Binary |I| x |J| coverage matrix stored as one area bitset per candidate.
class CoverageMatrix {
 public:
  CoverageMatrix() = default;
  CoverageMatrix(int num_areas, int num_candidates);

  int num_areas() const { return num_areas_; }
  int num_candidates() const { return num_candidates_; }
  int words() const { return words_; }

  bool Covers(int area, int candidate) const;
  void Set(int area, int candidate, bool value);

  // Bitset words of the areas candidate `j` covers.
  std::span<const std::uint64_t> Column(int j) const;
  // N_i: candidates covering area `i`, ascending.
  std::vector<int> CoveringCandidates(int area) const;

  friend bool operator==(const CoverageMatrix&, const CoverageMatrix&) = default;

 private:
  int num_areas_ = 0;
  int num_candidates_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> bits_;  // candidate-major
};

struct MclpInstance {
  std::vector<DemandArea> areas;
  std::vector<CandidateSite> candidates;
  std::optional<CoverageStandard> standard;
  CoverageMatrix coverage;

  int num_areas() const { return static_cast<int>(areas.size()); }
  int num_candidates() const { return static_cast<int>(candidates.size()); }
  double TotalDemand() const;
  // Demand of areas with at least one covering candidate.
  double CoverableDemand() const;
  int FixedOpenCount() const;

  // Throws kInput on size mismatches between areas, candidates and matrix,
  // or on duplicate ids.
  void Validate() const;
};

// a_ij = 1 iff distance(centroid_i, location_j) <= effective radius.
// Throws kInput on empty inputs and kConfig on a non-positive standard.
MclpInstance BuildCoverage(std::vector<DemandArea> areas,
                           std::vector<CandidateSite> candidates,
                           const CoverageStandard& standard,
                           CoordinateMode mode = CoordinateMode::kPlanar);

enum class Certificate { kOptimal, kHeuristic };
std::string_view CertificateName(Certificate c);

struct MclpSolution {
  int p = 0;
  std::vector<int> selected;  // candidate indices, ascending
  std::vector<std::string> selected_ids;
  std::vector<int> covered;   // area indices, ascending
  std::vector<std::string> covered_ids;
  double z = 0.0;
  double coverage_pct = 0.0;  // 100 * z / total demand
  Certificate certificate = Certificate::kHeuristic;
  // Greedy runs: gain of each pick, in pick order.
  std::vector<double> marginal_gains;
  std::int64_t nodes_explored = 0;
};

// Re-derives y, z and coverage_pct for `selected` from the raw matrix.
MclpSolution Evaluate(const MclpInstance& inst, std::vector<int> selected);

inline constexpr int kDefaultExactSizeCap = 30;

struct ExactOptions {
  int size_cap = kDefaultExactSizeCap;
  bool override_cap = false;
};

// Depth-first branch and bound over candidate subsets in id order, bounded
// by current coverage plus the best residual gains of the remaining
// candidates. Among optimal sets returns the one whose sorted ids are
// lexicographically smallest. Candidates flagged fixed_open are always
// selected.
//
// Throws kDomain unless 1 <= p <= |J| and p >= fixed count, and
// kSolverRefusal when |J| exceeds the size cap without override.
MclpSolution SolveExact(const MclpInstance& inst, int p,
                        const ExactOptions& options = {});

// p rounds of maximal marginal covered demand; ties go to the smallest
// id. Fixed-open candidates are placed first.
MclpSolution SolveGreedy(const MclpInstance& inst, int p);

// Applies the best single (selected out, unselected in) swap while z strictly
// improves. Scans in id order; fixed-open candidates never leave.
MclpSolution ImproveSwap(const MclpInstance& inst, const MclpSolution& sol);

enum class SolverMethod { kExact, kGreedySwap };
std::string_view SolverMethodName(SolverMethod m);
SolverMethod ParseSolverMethod(std::string_view name);

struct CurvePoint {
  int p = 0;
  MclpSolution solution;
  // Uninterrupted greedy run for p (kGreedySwap only).
  std::vector<double> greedy_gains;
};

struct CoverageCurve {
  SolverMethod method = SolverMethod::kExact;
  std::vector<CurvePoint> points;
};

// Solves p = max(1, fixed count) .. p_max. For kGreedySwap a point that would
// fall below its predecessor is re-seeded from the predecessor's selection
// plus one greedy pick, so the curve never decreases.
CoverageCurve ComputeCoverageCurve(const MclpInstance& inst, int p_max,
                                   SolverMethod method,
                                   const ExactOptions& options = {});

// JSON interchange:
//   {"mode": "planar",
//    "areas": [{"id", "population", "centroid": [x, y]}],
//    "candidates": [{"id", "location": [x, y], "fixed_open"}],
//    "standard": {"kind": "radius", "radius": m} |
//                {"kind": "travel_time", "minutes": t, "speed_kmh": v},
//    "matrix": [[0|1, ...], ...]}   // optional, rows are areas
// A missing matrix is rebuilt from the standard.
std::string InstanceToJson(const MclpInstance& inst,
                           CoordinateMode mode = CoordinateMode::kPlanar);
MclpInstance InstanceFromJson(std::string_view text);

std::string SolutionToJson(const MclpSolution& sol);
std::string CurveToJson(const CoverageCurve& curve);

// Columns p, selected_ids (';'-joined), covering_percentage.
std::string CurveToCsv(const CoverageCurve& curve);

struct CoverageRow {
  int p = 0;
  std::vector<std::string> selected_ids;
  double covering_percentage = 0.0;
};
std::vector<CoverageRow> ParseCoverageCsv(std::string_view text);

}  // namespace branchloc

#endif  // BRANCHLOC_MCLP_H_
