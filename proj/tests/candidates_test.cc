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

#include "branchloc/candidates.h"

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"

namespace branchloc {
namespace {

using testing::KindOf;

ScoreRaster MakeRaster(const GridSpec& g, std::vector<double> values) {
  ScoreRaster r;
  r.grid = g;
  r.values = std::move(values);
  r.mask.assign(g.cell_count(), 1);
  return r;
}

struct Peak {
  int row;
  int col;
  double score;
};

// Repeatedly scans every surviving cell for the best one, then deletes its
// neighbourhood.
std::vector<Peak> SuppressionOracle(const ScoreRaster& r, double min_sep,
                                    int max_count, double min_score) {
  const GridSpec& g = r.grid;
  std::vector<bool> alive(g.cell_count(), false);
  for (std::size_t i = 0; i < alive.size(); ++i) {
    alive[i] = r.mask[i] && r.values[i] > 0 && r.values[i] >= min_score;
  }
  std::vector<Peak> out;
  while (static_cast<int>(out.size()) < max_count) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(alive.size()); ++i) {
      if (!alive[i]) continue;
      if (best < 0 || r.values[i] > r.values[best]) best = i;  // row-major scan
    }
    if (best < 0) break;
    const int br = best / g.ncols(), bc = best % g.ncols();
    out.push_back({br, bc, r.values[best]});
    const Point c = g.CellCenter(br, bc);
    for (int i = 0; i < static_cast<int>(alive.size()); ++i) {
      if (alive[i] &&
          PlanarDistance(c, g.CellCenter(i / g.ncols(), i % g.ncols())) < min_sep) {
        alive[i] = false;
      }
    }
  }
  return out;
}

TEST(Extract, SingleNonzeroCell) {
  const GridSpec g = GridSpec::Create({0, 0}, 100, 10, 10);
  std::vector<double> v(100, 0.0);
  v[g.Index(3, 4)] = 0.5;
  const auto sites = Extract(MakeRaster(g, v), {}, CoordinateMode::kPlanar);
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].location, g.CellCenter(3, 4));
  EXPECT_EQ(sites[0].id, "P01");
  EXPECT_EQ(sites[0].origin, SiteOrigin::kProposed);
  EXPECT_EQ(*sites[0].row, 3);
}

TEST(Extract, TiesGoToLowerRowThenColumn) {
  const GridSpec g = GridSpec::Create({0, 0}, 10, 10, 10);
  std::vector<double> v(100, 0.0);
  v[g.Index(5, 6)] = 0.5;
  v[g.Index(5, 5)] = 0.5;
  const auto sites = Extract(MakeRaster(g, v), {0.0, 500, 14}, CoordinateMode::kPlanar);
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(*sites[0].col, 5);
}

TEST(Extract, EmptyResultWhenNothingQualifies) {
  const GridSpec g = GridSpec::Create({0, 0}, 10, 5, 5);
  EXPECT_TRUE(Extract(MakeRaster(g, std::vector<double>(25, 0.0)), {},
                      CoordinateMode::kPlanar)
                  .empty());
  EXPECT_TRUE(Extract(MakeRaster(g, std::vector<double>(25, 0.2)), {0.3, 500, 14},
                      CoordinateMode::kPlanar)
                  .empty());
}

TEST(Extract, MatchesSuppressionOracle) {
  std::mt19937_64 rng(41);
  const GridSpec g = GridSpec::Create({0, 0}, 100, 50, 50);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> v(g.cell_count());
    // Coarse levels produce plenty of ties.
    for (double& x : v) x = (rng() % 12) / 20.0;
    ScoreRaster r = MakeRaster(g, v);
    for (int k = 0; k < 30; ++k) r.mask[rng() % r.mask.size()] = 0;
    const double sep = 100.0 * (1 + trial % 9);
    const int max_count = 1 + trial % 20;
    const double min_score = trial % 3 == 0 ? 0.3 : 0.0;
    const auto sites = Extract(r, {min_score, sep, max_count}, CoordinateMode::kPlanar);
    const auto want = SuppressionOracle(r, sep, max_count, min_score);
    ASSERT_EQ(sites.size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      EXPECT_EQ(*sites[k].row, want[k].row);
      EXPECT_EQ(*sites[k].col, want[k].col);
      EXPECT_EQ(sites[k].score, want[k].score);
    }
    for (std::size_t a = 0; a < sites.size(); ++a) {
      EXPECT_GT(sites[a].score, 0.0);
      for (std::size_t b = a + 1; b < sites.size(); ++b) {
        EXPECT_GE(PlanarDistance(sites[a].location, sites[b].location), sep);
      }
    }
  }
}

TEST(Extract, ConfigValidation) {
  const GridSpec g = GridSpec::Create({0, 0}, 10, 5, 5);
  const ScoreRaster r = MakeRaster(g, std::vector<double>(25, 0.5));
  EXPECT_EQ(KindOf([&] { Extract(r, {0, -1, 14}, CoordinateMode::kPlanar); }),
            ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { Extract(r, {0, 10, 0}, CoordinateMode::kPlanar); }),
            ErrorKind::kConfig);
}

std::vector<CandidateSite> Sites(const std::vector<double>& scores) {
  std::vector<CandidateSite> out;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    CandidateSite s;
    s.id = testing::IdOf("P", static_cast<int>(k) + 1);
    s.score = scores[k];
    out.push_back(s);
  }
  return out;
}

std::array<int, 3> TierSizes(const std::vector<CandidateSite>& sites) {
  std::array<int, 3> n = {0, 0, 0};
  for (const auto& s : sites) ++n[static_cast<int>(*s.tier)];
  return n;
}

TEST(AssignTiers, Terciles) {
  const auto three = AssignTiers(Sites({0.9, 0.5, 0.1}));
  EXPECT_EQ(*three[0].tier, Tier::kFirst);
  EXPECT_EQ(*three[1].tier, Tier::kSecond);
  EXPECT_EQ(*three[2].tier, Tier::kThird);

  std::vector<double> fourteen;
  for (int k = 0; k < 14; ++k) fourteen.push_back(1.0 - k * 0.05);
  EXPECT_EQ(TierSizes(AssignTiers(Sites(fourteen))), (std::array<int, 3>{5, 5, 4}));
  EXPECT_EQ(TierSizes(AssignTiers(Sites(std::vector<double>(6, 0.4)))),
            (std::array<int, 3>{2, 2, 2}));
  EXPECT_EQ(TierSizes(AssignTiers(Sites({0.1, 0.2, 0.3, 0.4}))),
            (std::array<int, 3>{2, 1, 1}));
  EXPECT_TRUE(AssignTiers({}).empty());
}

TEST(AssignTiers, Monotone) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores(1 + rng() % 30);
    for (double& s : scores) s = (rng() % 10) / 10.0;
    const auto tiered = AssignTiers(Sites(scores));
    for (const auto& a : tiered) {
      for (const auto& b : tiered) {
        if (*a.tier < *b.tier) {
          EXPECT_GE(a.score, b.score);
        }
      }
    }
  }
}

TEST(AssignTiersByThreshold, Cutoffs) {
  const auto t = AssignTiersByThreshold(Sites({0.6, 0.45, 0.2}), 0.5, 0.3);
  EXPECT_EQ(*t[0].tier, Tier::kFirst);
  EXPECT_EQ(*t[1].tier, Tier::kSecond);
  EXPECT_EQ(*t[2].tier, Tier::kThird);
  EXPECT_EQ(KindOf([] { AssignTiersByThreshold(Sites({0.1}), 0.2, 0.5); }),
            ErrorKind::kConfig);
}

TEST(Merge, CountsAndOrigins) {
  std::vector<double> scores(14, 0.5);
  const auto proposed = Sites(scores);
  std::vector<ExistingBranch> existing;
  for (int k = 0; k < 9; ++k) {
    existing.push_back({testing::IdOf("E", k + 1), {k * 10.0, 0}, false});
  }
  const auto merged = Merge(proposed, existing);
  EXPECT_EQ(merged.size(), 23u);
  EXPECT_EQ(merged[14].origin, SiteOrigin::kExisting);
  EXPECT_FALSE(merged[14].tier.has_value());
  EXPECT_EQ(Merge(proposed, {}).size(), 14u);

  existing.push_back({"P01", {0, 0}, false});
  EXPECT_EQ(KindOf([&] { Merge(proposed, existing); }), ErrorKind::kInput);
}

TEST(Merge, ProposedNearExistingBothKept) {
  auto proposed = Sites({0.5});
  proposed[0].location = {0, 0};
  const std::vector<ExistingBranch> existing = {{"E01", {10, 0}, true}};
  const auto merged = Merge(proposed, existing);
  ASSERT_EQ(merged.size(), 2u);
  EXPECT_TRUE(merged[1].fixed_open);
}

TEST(CandidatesGeoJson, RoundTrip) {
  auto sites = AssignTiers(Sites({0.9, 0.5, 0.1}));
  sites[1].location = {1234.5, 678.25};
  std::vector<ExistingBranch> existing = {{"E01", {5, 6}, true}};
  const auto merged = Merge(sites, existing);
  const std::string text = CandidatesToGeoJson(merged, {{"mode", "planar"}});
  const auto back = CandidatesFromGeoJson(text, CoordinateMode::kPlanar);
  ASSERT_EQ(back.size(), merged.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].id, merged[k].id);
    EXPECT_EQ(back[k].location, merged[k].location);
    EXPECT_EQ(back[k].score, merged[k].score);
    EXPECT_EQ(back[k].origin, merged[k].origin);
    EXPECT_EQ(back[k].tier, merged[k].tier);
    EXPECT_EQ(back[k].fixed_open, merged[k].fixed_open);
  }
}

}  // namespace
}  // namespace branchloc
