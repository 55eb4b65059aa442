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

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "branchloc/errors.h"
#include "json.hpp"

namespace branchloc {
namespace {

std::string ProposedId(int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "P%02d", k);
  return buf;
}

// Indices of `sites` by descending score, ties by input position.
std::vector<std::size_t> ScoreOrder(const std::vector<CandidateSite>& sites) {
  std::vector<std::size_t> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return sites[a].score > sites[b].score;
                   });
  return order;
}

}  // namespace

std::string_view SiteOriginName(SiteOrigin origin) {
  return origin == SiteOrigin::kProposed ? "proposed" : "existing";
}

SiteOrigin ParseSiteOrigin(std::string_view name) {
  if (name == "proposed") return SiteOrigin::kProposed;
  if (name == "existing") return SiteOrigin::kExisting;
  Fail(ErrorKind::kInput, "unknown site origin '" + std::string(name) + "'");
}

std::string_view TierName(Tier tier) {
  switch (tier) {
    case Tier::kFirst:
      return "first";
    case Tier::kSecond:
      return "second";
    case Tier::kThird:
      return "third";
  }
  return "third";
}

Tier ParseTier(std::string_view name) {
  if (name == "first") return Tier::kFirst;
  if (name == "second") return Tier::kSecond;
  if (name == "third") return Tier::kThird;
  Fail(ErrorKind::kInput, "unknown tier '" + std::string(name) + "'");
}

void ExtractionConfig::Validate() const {
  if (!(min_separation >= 0.0)) {
    Fail(ErrorKind::kConfig, "extraction.min_separation must be >= 0");
  }
  if (max_proposed < 1) {
    Fail(ErrorKind::kConfig, "extraction.max_proposed must be >= 1");
  }
}

std::vector<CandidateSite> Extract(const ScoreRaster& raster,
                                   const ExtractionConfig& cfg,
                                   CoordinateMode mode) {
  cfg.Validate();
  const GridSpec& g = raster.grid;
  struct Cell {
    double score;
    int row;
    int col;
  };
  std::vector<Cell> cells;
  for (int r = 0; r < g.nrows(); ++r) {
    for (int c = 0; c < g.ncols(); ++c) {
      const std::size_t i = g.Index(r, c);
      if (!raster.IsActive(i)) continue;
      const double s = raster.values[i];
      if (s > 0.0 && s >= cfg.min_score) cells.push_back({s, r, c});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });

  std::vector<CandidateSite> out;
  for (const Cell& cell : cells) {
    if (static_cast<int>(out.size()) >= cfg.max_proposed) break;
    const Point center = g.CellCenter(cell.row, cell.col);
    // A cell is suppressed iff some accepted site lies closer than the
    // separation distance.
    const bool suppressed =
        std::any_of(out.begin(), out.end(), [&](const CandidateSite& s) {
          return Distance(mode, s.location, center) < cfg.min_separation;
        });
    if (suppressed) continue;
    CandidateSite site;
    site.id = ProposedId(static_cast<int>(out.size()) + 1);
    site.location = center;
    site.score = cell.score;
    site.origin = SiteOrigin::kProposed;
    site.row = cell.row;
    site.col = cell.col;
    out.push_back(std::move(site));
  }
  return out;
}

std::vector<CandidateSite> AssignTiers(std::vector<CandidateSite> sites) {
  const std::size_t n = sites.size();
  const std::size_t base = n / 3;
  const std::size_t rem = n % 3;
  const std::size_t first = base + (rem >= 1 ? 1 : 0);
  const std::size_t second = base + (rem >= 2 ? 1 : 0);
  const std::vector<std::size_t> order = ScoreOrder(sites);
  for (std::size_t k = 0; k < n; ++k) {
    Tier t = Tier::kThird;
    if (k < first) {
      t = Tier::kFirst;
    } else if (k < first + second) {
      t = Tier::kSecond;
    }
    sites[order[k]].tier = t;
  }
  return sites;
}

std::vector<CandidateSite> AssignTiersByThreshold(
    std::vector<CandidateSite> sites, double first_min, double second_min) {
  if (!(first_min >= second_min)) {
    Fail(ErrorKind::kConfig, "tier thresholds must satisfy first >= second");
  }
  for (CandidateSite& s : sites) {
    if (s.score >= first_min) {
      s.tier = Tier::kFirst;
    } else if (s.score >= second_min) {
      s.tier = Tier::kSecond;
    } else {
      s.tier = Tier::kThird;
    }
  }
  return sites;
}

std::vector<CandidateSite> Merge(std::span<const CandidateSite> proposed,
                                 std::span<const ExistingBranch> existing,
                                 const ScoreRaster* surface) {
  std::vector<CandidateSite> out(proposed.begin(), proposed.end());
  for (const ExistingBranch& b : existing) {
    CandidateSite site;
    site.id = b.id;
    site.location = b.location;
    site.origin = SiteOrigin::kExisting;
    site.fixed_open = b.fixed_open;
    if (surface != nullptr) {
      if (auto cell = surface->grid.CellAt(b.location);
          cell && surface->IsActive(*cell)) {
        site.score = surface->values[*cell];
      }
    }
    out.push_back(std::move(site));
  }
  std::set<std::string> ids;
  for (const CandidateSite& s : out) {
    if (s.id.empty()) Fail(ErrorKind::kInput, "candidate with empty id");
    if (!ids.insert(s.id).second) {
      Fail(ErrorKind::kInput, "duplicate candidate id '" + s.id + "'");
    }
  }
  return out;
}

std::string CandidatesToGeoJson(
    std::span<const CandidateSite> sites,
    const std::map<std::string, std::string>& metadata) {
  nlohmann::ordered_json fc;
  fc["type"] = "FeatureCollection";
  if (!metadata.empty()) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : metadata) meta[k] = v;
    fc["metadata"] = meta;
  }
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (const CandidateSite& s : sites) {
    nlohmann::ordered_json props;
    props["id"] = s.id;
    props["score"] = s.score;
    props["origin"] = SiteOriginName(s.origin);
    props["tier"] = s.tier ? nlohmann::ordered_json(TierName(*s.tier))
                           : nlohmann::ordered_json(nullptr);
    props["fixed_open"] = s.fixed_open;
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"},
                     {"coordinates", {s.location.x, s.location.y}}};
    f["properties"] = std::move(props);
    features.push_back(std::move(f));
  }
  fc["features"] = std::move(features);
  return fc.dump(2) + "\n";
}

std::vector<CandidateSite> CandidatesFromGeoJson(std::string_view text,
                                                 CoordinateMode mode) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kInput, std::string("candidates GeoJSON: ") + e.what());
  }
  std::vector<CandidateSite> out;
  try {
    for (const auto& f : doc.at("features")) {
      const auto& coords = f.at("geometry").at("coordinates");
      const auto& props = f.at("properties");
      CandidateSite s;
      s.id = props.at("id").get<std::string>();
      s.location = {coords.at(0).get<double>(), coords.at(1).get<double>()};
      ValidatePoint(mode, s.location);
      s.score = props.value("score", 0.0);
      s.origin = ParseSiteOrigin(props.value("origin", std::string("proposed")));
      if (props.contains("tier") && !props["tier"].is_null()) {
        s.tier = ParseTier(props["tier"].get<std::string>());
      }
      s.fixed_open = props.value("fixed_open", false);
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kInput, std::string("candidates GeoJSON: ") + e.what());
  }
  return out;
}

}  // namespace branchloc
