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

#include "branchloc/fixture.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "branchloc/criteria.h"
#include "branchloc/errors.h"
#include "branchloc/geo.h"
#include "branchloc/pipeline.h"
#include "branchloc/project.h"
#include "json.hpp"
#include "text_util.h"

namespace branchloc {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr double kWidth = 8000.0;
constexpr double kHeight = 6000.0;
constexpr int kSectionCols = 5;
constexpr int kSectionRows = 4;
constexpr int kHubs = 16;
constexpr int kExisting = 9;
constexpr int kProposed = 14;
constexpr double kRadius = 2500.0;
constexpr double kTotal = 600000.0;
constexpr double kMinPopulation = 2000.0;
constexpr std::array<double, 3> kTargetShare = {0.90, 0.96, 1.00};
constexpr int kMaxAttempts = 40;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double Uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  int Int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

Point Round(Point p) { return {std::round(p.x), std::round(p.y)}; }

double MinDistance(Point p, const std::vector<Point>& others) {
  double best = kInfinity;
  for (const Point& o : others) best = std::min(best, PlanarDistance(p, o));
  return best;
}

Point Offset(Rng& rng, Point c, double rmin, double rmax) {
  const double a = rng.Uniform(0.0, 2.0 * M_PI);
  const double r = rng.Uniform(rmin, rmax);
  return Round({c.x + r * std::cos(a), c.y + r * std::sin(a)});
}

bool Inside(Point p, double margin) {
  return p.x >= margin && p.x <= kWidth - margin && p.y >= margin &&
         p.y <= kHeight - margin;
}

struct Section {
  std::string id;
  std::vector<Point> ring;
  std::string income;
  std::string cost;
  double density = 0.0;
};

struct City {
  std::vector<Section> sections;
  std::vector<Point> main_street;
  std::vector<Point> hubs;
  std::vector<Point> business, office, medicine, parking, transit;
  std::vector<Point> hotels, competitors, existing;
};

ordered_json PointFeatures(const std::vector<Point>& pts,
                           const std::string& id_prefix = {}) {
  ordered_json features = ordered_json::array();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    ordered_json f;
    f["type"] = "Feature";
    ordered_json props = ordered_json::object();
    if (!id_prefix.empty()) {
      char id[16];
      std::snprintf(id, sizeof(id), "%s%02zu", id_prefix.c_str(), k + 1);
      props["id"] = id;
    }
    f["properties"] = props;
    f["geometry"] = {{"type", "Point"}, {"coordinates", {pts[k].x, pts[k].y}}};
    features.push_back(std::move(f));
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

ordered_json SectionFeatures(const std::vector<Section>& sections,
                             const std::string& key,
                             const std::vector<double>* populations) {
  ordered_json features = ordered_json::array();
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const Section& s = sections[k];
    ordered_json props;
    props["id"] = s.id;
    if (key == "income") props["level"] = s.income;
    if (key == "cost") props["level"] = s.cost;
    if (key == "density") props["density"] = s.density;
    if (populations) props["population"] = (*populations)[k];
    ordered_json ring = ordered_json::array();
    for (const Point& p : s.ring) ring.push_back({p.x, p.y});
    ring.push_back({s.ring.front().x, s.ring.front().y});
    ordered_json f;
    f["type"] = "Feature";
    f["properties"] = props;
    f["geometry"] = {{"type", "Polygon"}, {"coordinates", {ring}}};
    features.push_back(std::move(f));
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

int SectionOf(const City& city, Point p) {
  for (std::size_t k = 0; k < city.sections.size(); ++k) {
    auto poly = Polygon::Create(city.sections[k].ring);
    if (PointInPolygon(p, poly)) return static_cast<int>(k);
  }
  return -1;
}

City BuildCity(Rng& rng) {
  City city;
  // Section corners: boundary vertices fixed, interior ones jittered.
  Point v[kSectionCols + 1][kSectionRows + 1];
  for (int i = 0; i <= kSectionCols; ++i) {
    for (int j = 0; j <= kSectionRows; ++j) {
      Point p{i * kWidth / kSectionCols, j * kHeight / kSectionRows};
      if (i > 0 && i < kSectionCols) p.x += std::round(rng.Uniform(-150, 150));
      if (j > 0 && j < kSectionRows) p.y += std::round(rng.Uniform(-150, 150));
      v[i][j] = p;
    }
  }
  static const char* kLevels[] = {"High", "Middle", "Low"};
  for (int j = 0; j < kSectionRows; ++j) {
    for (int i = 0; i < kSectionCols; ++i) {
      Section s;
      char id[8];
      std::snprintf(id, sizeof(id), "S%02d", j * kSectionCols + i + 1);
      s.id = id;
      s.ring = {v[i][j], v[i + 1][j], v[i + 1][j + 1], v[i][j + 1]};
      s.income = kLevels[rng.Int(0, 2)];
      s.cost = kLevels[rng.Int(0, 2)];
      s.density = std::round(rng.Uniform(120, 900));
      city.sections.push_back(s);
    }
  }

  const double xs[] = {1600, 4000, 6400};
  const double ys[] = {1500, 3000, 4500};
  for (double x : xs) {
    for (double y = 0; y <= kHeight; y += 50) city.main_street.push_back({x, y});
  }
  for (double y : ys) {
    for (double x = 0; x <= kWidth; x += 50) city.main_street.push_back({x, y});
  }

  for (int tries = 0; city.hubs.size() < kHubs && tries < 20000; ++tries) {
    const int street = rng.Int(0, 5);
    const double side = rng.Int(0, 1) ? 1.0 : -1.0;
    const double offset = side * rng.Uniform(100, 250);
    Point h = street < 3 ? Point{xs[street] + offset, rng.Uniform(600, kHeight - 600)}
                         : Point{rng.Uniform(600, kWidth - 600), ys[street - 3] + offset};
    h = Round(h);
    if (MinDistance(h, city.hubs) < 1200) continue;
    city.hubs.push_back(h);
  }

  for (const Point& h : city.hubs) {
    city.business.push_back(Offset(rng, h, 0, 60));
    city.office.push_back(Offset(rng, h, 0, 100));
    city.medicine.push_back(Offset(rng, h, 0, 100));
    city.parking.push_back(Offset(rng, h, 50, 300));
    city.transit.push_back(Offset(rng, h, 50, 300));
    const int s = SectionOf(city, h);
    if (s >= 0) {
      Section& sec = city.sections[s];
      if (sec.income == "Low") sec.income = rng.Int(0, 1) ? "High" : "Middle";
      if (sec.cost == "Low") sec.cost = rng.Int(0, 1) ? "High" : "Middle";
      sec.density = std::max(sec.density, std::round(rng.Uniform(400, 900)));
    }
  }
  for (const Point& h : city.hubs) {
    if (MinDistance(h, city.hotels) <= 2500) continue;
    for (int tries = 0; tries < 100; ++tries) {
      const Point p = Offset(rng, h, 700, 900);
      if (Inside(p, 100) && MinDistance(p, city.hubs) >= 600) {
        city.hotels.push_back(p);
        break;
      }
    }
  }
  for (int tries = 0; city.competitors.size() < 10 && tries < 20000; ++tries) {
    const Point p = Round({rng.Uniform(200, kWidth - 200),
                           rng.Uniform(200, kHeight - 200)});
    if (MinDistance(p, city.hubs) >= 600) city.competitors.push_back(p);
  }
  for (int tries = 0; city.existing.size() < kExisting && tries < 20000;
       ++tries) {
    const Point p = Round({rng.Uniform(300, kWidth - 300),
                           rng.Uniform(300, kHeight - 300)});
    if (MinDistance(p, city.hubs) >= 700 && MinDistance(p, city.existing) >= 1000) {
      city.existing.push_back(p);
    }
  }
  return city;
}

ordered_json CriterionJson(const CriterionSpec& spec, const std::string& layer,
                           const std::string& property) {
  ordered_json c;
  c["id"] = spec.id;
  c["kind"] = CriterionKindName(spec.kind);
  c["layer"] = layer;
  if (!property.empty()) c["property"] = property;
  if (IsNumericKind(spec.kind)) {
    ordered_json bands = ordered_json::array();
    for (const Band& b : spec.bands) {
      ordered_json band;
      band["class"] = SuitabilityClassName(b.suitability);
      band["min"] = b.interval.lo;
      if (!std::isinf(b.interval.hi)) band["max"] = b.interval.hi;
      band["min_inclusive"] = b.interval.lo_closed;
      if (!std::isinf(b.interval.hi)) band["max_inclusive"] = b.interval.hi_closed;
      bands.push_back(band);
    }
    c["bands"] = bands;
  } else {
    ordered_json cats = ordered_json::object();
    for (const CategoryBand& b : spec.categories) {
      cats[std::string(CategoryLevelName(b.level))] =
          SuitabilityClassName(b.suitability);
    }
    c["categories"] = cats;
  }
  return c;
}

void WriteJson(const fs::path& p, const ordered_json& j) {
  internal::WriteFile(p.string(), j.dump(1) + "\n");
}

void WriteLayers(const City& city, const fs::path& dir,
                 const std::vector<double>& populations) {
  fs::create_directories(dir / "layers");
  fs::create_directories(dir / "matrices");
  WriteJson(dir / "layers/main_street.geojson", PointFeatures(city.main_street));
  WriteJson(dir / "layers/business_center.geojson", PointFeatures(city.business));
  WriteJson(dir / "layers/hotel_tourism.geojson", PointFeatures(city.hotels));
  WriteJson(dir / "layers/office.geojson", PointFeatures(city.office));
  WriteJson(dir / "layers/competitor_branch.geojson",
            PointFeatures(city.competitors, "C"));
  WriteJson(dir / "layers/existing_branches.geojson",
            PointFeatures(city.existing, "E"));
  WriteJson(dir / "layers/medicine_center.geojson", PointFeatures(city.medicine));
  WriteJson(dir / "layers/parking.geojson", PointFeatures(city.parking));
  WriteJson(dir / "layers/transit.geojson", PointFeatures(city.transit));
  WriteJson(dir / "layers/income.geojson",
            SectionFeatures(city.sections, "income", nullptr));
  WriteJson(dir / "layers/building_cost.geojson",
            SectionFeatures(city.sections, "cost", nullptr));
  WriteJson(dir / "layers/density.geojson",
            SectionFeatures(city.sections, "density", nullptr));
  WriteJson(dir / "layers/demand.geojson",
            SectionFeatures(city.sections, "", &populations));

  internal::WriteFile((dir / "matrices/goal.csv").string(),
                      "population,cost,urban_facilities,transportation,"
                      "competition,flexibility\n"
                      "1,3,1,2,2,3\n"
                      "1/3,1,1/3,1/2,1,2\n"
                      "1,3,1,1,2,3\n"
                      "1/2,2,1,1,2,2\n"
                      "1/2,1,1/2,1/2,1,2\n"
                      "1/3,1/2,1/3,1/2,1/2,1\n");
  internal::WriteFile((dir / "matrices/population.csv").string(),
                      "population_density,income_level\n"
                      "1,2\n"
                      "1/2,1\n");
  internal::WriteFile((dir / "matrices/urban_facilities.csv").string(),
                      "main_street,business_center,hotel_tourism,office,"
                      "medicine_center\n"
                      "1,1/2,2,1,2\n"
                      "2,1,3,2,3\n"
                      "1/2,1/3,1,1/2,1\n"
                      "1,1/2,2,1,2\n"
                      "1/2,1/3,1,1/2,1\n");
  internal::WriteFile((dir / "matrices/transportation.csv").string(),
                      "parking,transit\n"
                      "1,1\n"
                      "1,1\n");
}

void WriteConfig(const fs::path& dir) {
  ordered_json cfg;
  cfg["name"] = "isfahan20";
  cfg["mode"] = "planar";
  cfg["grid"] = {{"origin", {0, 0}},
                 {"cell_size", 100},
                 {"ncols", 80},
                 {"nrows", 60}};
  cfg["scheme"] = {{"high", 0.6}, {"mid", 0.4}, {"non", 0.0}};
  cfg["combine_mode"] = "weighted_geometric";
  cfg["consistency"] = {{"threshold", 0.1}};

  const std::map<std::string, std::pair<std::string, std::string>> layers = {
      {"main_street", {"layers/main_street.geojson", ""}},
      {"business_center", {"layers/business_center.geojson", ""}},
      {"hotel_tourism", {"layers/hotel_tourism.geojson", ""}},
      {"office", {"layers/office.geojson", ""}},
      {"competitor_branch", {"layers/competitor_branch.geojson", ""}},
      {"familiar_branch", {"layers/existing_branches.geojson", ""}},
      {"income_level", {"layers/income.geojson", "level"}},
      {"building_cost", {"layers/building_cost.geojson", "level"}},
      {"medicine_center", {"layers/medicine_center.geojson", ""}},
      {"population_density", {"layers/density.geojson", "density"}},
      {"parking", {"layers/parking.geojson", ""}},
      {"transit", {"layers/transit.geojson", ""}},
  };
  ordered_json criteria = ordered_json::array();
  for (const CriterionSpec& spec : StandardBankCriteria()) {
    const auto& [layer, prop] = layers.at(spec.id);
    criteria.push_back(CriterionJson(spec, layer, prop));
  }
  cfg["criteria"] = criteria;

  auto leaf = [](const char* id) { return ordered_json{{"criterion", id}}; };
  auto cluster = [](const char* id, ordered_json children,
                    const char* matrix = nullptr) {
    ordered_json n;
    n["id"] = id;
    if (matrix) n["matrix"] = matrix;
    n["children"] = std::move(children);
    return n;
  };
  cfg["hierarchy"] = cluster(
      "goal",
      {cluster("population",
               {leaf("population_density"), leaf("income_level")},
               "matrices/population.csv"),
       cluster("cost", {leaf("building_cost")}),
       cluster("urban_facilities",
               {leaf("main_street"), leaf("business_center"),
                leaf("hotel_tourism"), leaf("office"), leaf("medicine_center")},
               "matrices/urban_facilities.csv"),
       cluster("transportation", {leaf("parking"), leaf("transit")},
               "matrices/transportation.csv"),
       cluster("competition", {leaf("competitor_branch")}),
       cluster("flexibility", {leaf("familiar_branch")})},
      "matrices/goal.csv");

  cfg["demand"] = "layers/demand.geojson";
  cfg["existing_branches"] = "layers/existing_branches.geojson";
  cfg["extraction"] = {
      {"min_score", 0}, {"min_separation", 500}, {"max_proposed", kProposed}};
  cfg["tiering"] = {{"method", "tercile"}};
  cfg["standard"] = {{"kind", "radius"}, {"radius", kRadius}};
  cfg["p_max"] = 3;
  cfg["solver"] = "exact";
  WriteJson(dir / "config.json", cfg);
}

// Best covered population over all subsets of exactly `p` candidates.
double BruteForceBest(const std::vector<std::uint32_t>& masks,
                      const std::vector<double>& pop, int p) {
  const int m = static_cast<int>(masks.size());
  double best = 0.0;
  std::vector<int> idx(p);
  for (int k = 0; k < p; ++k) idx[k] = k;
  while (true) {
    std::uint32_t u = 0;
    for (int k : idx) u |= masks[k];
    double z = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (u >> i & 1u) z += pop[i];
    }
    best = std::max(best, z);
    int k = p - 1;
    while (k >= 0 && idx[k] == m - p + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int t = k + 1; t < p; ++t) idx[t] = idx[t - 1] + 1;
  }
  return best;
}

// Covered population of plain greedy with `p` picks. Ties go to the lowest
// index, as in the library solver.
double GreedyCover(const std::vector<std::uint32_t>& masks,
                   const std::vector<double>& pop, int p) {
  std::uint32_t covered = 0;
  double z = 0.0;
  for (int round = 0; round < p; ++round) {
    double best = -1.0;
    std::uint32_t best_mask = 0;
    for (std::uint32_t m : masks) {
      double gain = 0.0;
      const std::uint32_t fresh = m & ~covered;
      for (std::size_t i = 0; i < pop.size(); ++i) {
        if (fresh >> i & 1u) gain += pop[i];
      }
      if (gain > best) {
        best = gain;
        best_mask = m;
      }
    }
    covered |= best_mask;
    z += best;
  }
  return z;
}

// Searches integer populations (sum kTotal, each >= kMinPopulation) whose
// best single and best pair cover exactly the target shares and for which
// plain greedy also reaches full cover at p = 3.
bool SearchPopulations(const std::vector<std::uint32_t>& masks, int areas,
                       Rng& rng, std::vector<double>* out) {
  std::vector<std::uint32_t> sets = masks;
  const std::size_t singles = masks.size();
  for (std::size_t a = 0; a < masks.size(); ++a) {
    for (std::size_t b = a + 1; b < masks.size(); ++b) {
      sets.push_back(masks[a] | masks[b]);
    }
  }
  const double t1 = kTargetShare[0] * kTotal;
  const double t2 = kTargetShare[1] * kTotal;
  auto cost = [&](const std::vector<double>& sums,
                  const std::vector<double>& pop) {
    double b1 = 0, b2 = 0;
    for (std::size_t s = 0; s < singles; ++s) b1 = std::max(b1, sums[s]);
    for (std::size_t s = singles; s < sums.size(); ++s) b2 = std::max(b2, sums[s]);
    return std::abs(b1 - t1) + std::abs(b2 - t2) +
           (kTotal - GreedyCover(masks, pop, 3));
  };
  for (int restart = 0; restart < 20; ++restart) {
    std::vector<double> pop(areas, kTotal / areas);
    for (int k = 0; k < 200; ++k) {
      const int i = rng.Int(0, areas - 1), j = rng.Int(0, areas - 1);
      const double d = std::min<double>(rng.Int(1, 8000), pop[i] - kMinPopulation);
      if (i == j || d <= 0) continue;
      pop[i] -= d;
      pop[j] += d;
    }
    std::vector<double> sums(sets.size(), 0.0);
    for (std::size_t s = 0; s < sets.size(); ++s) {
      for (int i = 0; i < areas; ++i) {
        if (sets[s] >> i & 1u) sums[s] += pop[i];
      }
    }
    double current = cost(sums, pop);
    std::vector<double> trial(sums.size());
    for (int step = 0; step < 400000 && current > 0; ++step) {
      const int i = rng.Int(0, areas - 1), j = rng.Int(0, areas - 1);
      if (i == j) continue;
      const double d = std::min<double>(rng.Int(1, 5000), pop[i] - kMinPopulation);
      if (d <= 0) continue;
      for (std::size_t s = 0; s < sets.size(); ++s) {
        trial[s] = sums[s] - ((sets[s] >> i & 1u) ? d : 0.0) +
                   ((sets[s] >> j & 1u) ? d : 0.0);
      }
      pop[i] -= d;
      pop[j] += d;
      const double c = cost(trial, pop);
      if (c <= current) {
        current = c;
        sums.swap(trial);
      } else {
        pop[i] += d;
        pop[j] -= d;
      }
    }
    if (current == 0) {
      *out = pop;
      return true;
    }
  }
  return false;
}

}  // namespace

FixtureSummary GenerateFixture(std::uint64_t seed, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const int areas = kSectionCols * kSectionRows;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(seed * 1000003ULL + static_cast<std::uint64_t>(attempt));
    const City city = BuildCity(rng);
    if (city.hubs.size() != kHubs || city.existing.size() != kExisting) continue;

    const std::vector<double> flat(areas, kTotal / areas);
    WriteLayers(city, dir, flat);
    WriteConfig(dir);
    const ProjectConfig cfg = LoadProject((dir / "config.json").string());
    const Synthesis w = ComputeWeights(cfg);
    const ScoreRaster surface = ScoreSurface(cfg, w);
    std::vector<CandidateSite> cands = SelectCandidates(cfg, surface);
    const int proposed = static_cast<int>(
        std::count_if(cands.begin(), cands.end(), [](const CandidateSite& s) {
          return s.origin == SiteOrigin::kProposed;
        }));
    if (proposed != kProposed) continue;
    const MclpInstance inst = BuildInstance(cfg, cands);

    std::vector<std::uint32_t> masks(inst.num_candidates(), 0);
    for (int j = 0; j < inst.num_candidates(); ++j) {
      for (int i = 0; i < areas; ++i) {
        if (inst.coverage.Covers(i, j)) masks[j] |= 1u << i;
      }
    }
    const std::vector<double> ones(areas, 1.0);
    if (BruteForceBest(masks, ones, 3) != areas) continue;  // no full triple
    if (BruteForceBest(masks, ones, 2) == areas) continue;  // a pair suffices

    std::vector<double> pop;
    if (!SearchPopulations(masks, areas, rng, &pop)) continue;
    WriteLayers(city, dir, pop);

    // Certify on the files as written.
    const ProjectConfig final_cfg = LoadProject((dir / "config.json").string());
    std::vector<double> final_pop;
    for (const DemandArea& a : final_cfg.demand_areas) {
      final_pop.push_back(a.population);
    }
    FixtureSummary summary;
    summary.seed = seed;
    summary.attempts = attempt + 1;
    summary.candidates = inst.num_candidates();
    summary.populations = final_pop;
    bool ok = true;
    for (int p = 1; p <= 3; ++p) {
      const double best = BruteForceBest(masks, final_pop, p);
      summary.optimum_pct.push_back(100.0 * best / kTotal);
      ok &= best == kTargetShare[p - 1] * kTotal;
    }
    ok &= GreedyCover(masks, final_pop, 3) == kTotal;
    if (ok) return summary;
  }
  Fail(ErrorKind::kNumerical, "no fixture attempt reached the coverage targets");
}

}  // namespace branchloc
