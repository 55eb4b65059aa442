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

// Candidate sites: peak extraction from a score surface by greedy
// non-maximum suppression, priority tiers, and merging with existing branches.

#ifndef BRANCHLOC_CANDIDATES_H_
#define BRANCHLOC_CANDIDATES_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "branchloc/geo.h"
#include "branchloc/overlay.h"

namespace branchloc {

enum class SiteOrigin { kProposed, kExisting };
enum class Tier { kFirst, kSecond, kThird };

std::string_view SiteOriginName(SiteOrigin origin);
SiteOrigin ParseSiteOrigin(std::string_view name);
std::string_view TierName(Tier tier);
Tier ParseTier(std::string_view name);

struct CandidateSite {
  std::string id;
  Point location;
  double score = 0.0;
  SiteOrigin origin = SiteOrigin::kProposed;
  std::optional<Tier> tier;
  // Forces x_j = 1 in the covering model.
  bool fixed_open = false;
  // Grid cell the site was extracted from (proposed sites only).
  std::optional<int> row;
  std::optional<int> col;
};

struct ExtractionConfig {
  double min_score = 0.0;
  double min_separation = 500.0;
  int max_proposed = 14;

  // Throws kConfig when min_separation < 0 or max_proposed < 1.
  void Validate() const;
};

// Repeatedly takes the highest-scoring remaining unmasked cell with
// score >= min_score and score > 0, emits its center, and suppresses every
// cell closer than min_separation. Equal scores are taken in (row, col)
// order. Stops after max_proposed sites or when no cell remains; an empty
// result means no cell met the threshold. Ids are "P01", "P02", ...
std::vector<CandidateSite> Extract(const ScoreRaster& raster,
                                   const ExtractionConfig& cfg,
                                   CoordinateMode mode);

// Score-ordered terciles: the top third is kFirst, the middle kSecond, the
// rest kThird. When the count is not divisible by three the extra sites go
// to the higher tiers (14 -> 5/5/4). Equal scores keep their input order.
std::vector<CandidateSite> AssignTiers(std::vector<CandidateSite> sites);

// Fixed cutoffs: score >= first_min is kFirst, >= second_min is kSecond,
// otherwise kThird.
std::vector<CandidateSite> AssignTiersByThreshold(
    std::vector<CandidateSite> sites, double first_min, double second_min);

struct ExistingBranch {
  std::string id;
  Point location;
  bool fixed_open = false;
};

// Proposed sites followed by existing branches (origin kExisting). Existing
// branches take their score from the surface cell they fall in, or 0 when
// outside the study area. Throws kInput on a duplicate id.
std::vector<CandidateSite> Merge(std::span<const CandidateSite> proposed,
                                 std::span<const ExistingBranch> existing,
                                 const ScoreRaster* surface = nullptr);

// FeatureCollection of points with properties {id, score, origin, tier,
// fixed_open}.
std::string CandidatesToGeoJson(
    std::span<const CandidateSite> sites,
    const std::map<std::string, std::string>& metadata = {});
std::vector<CandidateSite> CandidatesFromGeoJson(std::string_view text,
                                                 CoordinateMode mode);

}  // namespace branchloc

#endif  // BRANCHLOC_CANDIDATES_H_
