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

#include "branchloc/mclp.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "branchloc/errors.h"
#include "json.hpp"
#include "text_util.h"

namespace branchloc {
namespace {

using Words = std::vector<std::uint64_t>;

// Sum of populations over areas set in `bits` minus those in `base`,
// accumulated in area order.
double GainOf(const MclpInstance& inst, std::span<const std::uint64_t> bits,
              const Words& base) {
  double gain = 0.0;
  for (std::size_t w = 0; w < bits.size(); ++w) {
    std::uint64_t fresh = bits[w] & ~base[w];
    while (fresh != 0) {
      const int b = std::countr_zero(fresh);
      gain += inst.areas[w * 64 + b].population;
      fresh &= fresh - 1;
    }
  }
  return gain;
}

void OrInto(Words* acc, std::span<const std::uint64_t> bits) {
  for (std::size_t w = 0; w < bits.size(); ++w) (*acc)[w] |= bits[w];
}

// Candidate indices sorted by id.
std::vector<int> IdOrder(const MclpInstance& inst) {
  std::vector<int> order(inst.num_candidates());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return inst.candidates[a].id < inst.candidates[b].id;
  });
  return order;
}

void CheckP(const MclpInstance& inst, int p) {
  if (p < 1 || p > inst.num_candidates()) {
    Fail(ErrorKind::kDomain, "p = " + std::to_string(p) + " outside [1, " +
                                 std::to_string(inst.num_candidates()) + "]");
  }
  if (inst.FixedOpenCount() > p) {
    Fail(ErrorKind::kDomain, std::to_string(inst.FixedOpenCount()) +
                                 " fixed-open candidates exceed p = " +
                                 std::to_string(p));
  }
}

class BranchAndBound {
 public:
  BranchAndBound(const MclpInstance& inst, int p) : inst_(inst), p_(p) {
    for (int j : IdOrder(inst)) {
      if (inst.candidates[j].fixed_open) {
        fixed_.push_back(j);
      } else {
        free_.push_back(j);
      }
    }
  }

  std::vector<int> Run() {
    Words covered(inst_.coverage.words(), 0);
    double z = 0.0;
    for (int j : fixed_) {
      z += GainOf(inst_, inst_.coverage.Column(j), covered);
      OrInto(&covered, inst_.coverage.Column(j));
    }
    const int needed = p_ - static_cast<int>(fixed_.size());
    std::vector<int> chosen;
    Search(0, needed, covered, z, &chosen);
    std::vector<int> result = fixed_;
    result.insert(result.end(), best_.begin(), best_.end());
    std::sort(result.begin(), result.end());
    return result;
  }

  std::int64_t nodes() const { return nodes_; }

 private:
  // Free candidates are branched in id order, include before exclude, so
  // complete selections are met in lexicographic id order and only a
  // strictly better objective replaces the incumbent.
  void Search(std::size_t k, int needed, const Words& covered, double z,
              std::vector<int>* chosen) {
    ++nodes_;
    if (needed == 0) {
      if (!found_ || z > best_z_) {
        found_ = true;
        best_z_ = z;
        best_ = *chosen;
      }
      return;
    }
    if (free_.size() - k < static_cast<std::size_t>(needed)) return;

    gains_scratch_.clear();
    for (std::size_t t = k; t < free_.size(); ++t) {
      gains_scratch_.push_back(
          GainOf(inst_, inst_.coverage.Column(free_[t]), covered));
    }
    const double gain_k = gains_scratch_.front();
    if (found_) {
      std::vector<double> top = gains_scratch_;
      std::partial_sort(top.begin(), top.begin() + needed, top.end(),
                        std::greater<>());
      double bound = z;
      for (int t = 0; t < needed; ++t) bound += top[t];
      if (bound <= best_z_) return;
    }

    const int j = free_[k];
    Words with = covered;
    OrInto(&with, inst_.coverage.Column(j));
    chosen->push_back(j);
    Search(k + 1, needed - 1, with, z + gain_k, chosen);
    chosen->pop_back();
    Search(k + 1, needed, covered, z, chosen);
  }

  const MclpInstance& inst_;
  int p_;
  std::vector<int> fixed_;
  std::vector<int> free_;
  bool found_ = false;
  double best_z_ = 0.0;
  std::vector<int> best_;
  std::vector<double> gains_scratch_;
  std::int64_t nodes_ = 0;
};

nlohmann::ordered_json SolutionJson(const MclpSolution& sol) {
  nlohmann::ordered_json j;
  j["p"] = sol.p;
  j["selected_ids"] = sol.selected_ids;
  j["covered_ids"] = sol.covered_ids;
  j["z"] = sol.z;
  j["coverage_pct"] = sol.coverage_pct;
  j["certificate"] = CertificateName(sol.certificate);
  j["marginal_gains"] = sol.marginal_gains;
  j["nodes_explored"] = sol.nodes_explored;
  return j;
}

Point ReadXY(const nlohmann::json& arr) {
  if (!arr.is_array() || arr.size() < 2) {
    Fail(ErrorKind::kInput, "coordinate must be an [x, y] array");
  }
  return {arr.at(0).get<double>(), arr.at(1).get<double>()};
}

std::string JoinIds(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ';';
    out += ids[i];
  }
  return out;
}

}  // namespace

DemandArea DemandArea::Create(std::string id, std::optional<Polygon> geometry,
                              double population,
                              std::optional<Point> centroid) {
  if (!std::isfinite(population) || population < 0.0) {
    Fail(ErrorKind::kInput,
         "demand area '" + id + "': population must be finite and >= 0");
  }
  DemandArea a;
  a.id = std::move(id);
  a.population = population;
  if (centroid) {
    a.centroid = *centroid;
  } else if (geometry) {
    a.centroid = geometry->VertexCentroid();
  } else {
    Fail(ErrorKind::kInput,
         "demand area '" + a.id + "' needs a centroid or a geometry");
  }
  if (geometry && !PointInPolygon(a.centroid, *geometry)) {
    Fail(ErrorKind::kInput,
         "demand area '" + a.id + "': centroid lies outside its polygon");
  }
  a.geometry = std::move(geometry);
  return a;
}

CoverageStandard CoverageStandard::Radius(double meters) {
  CoverageStandard s;
  s.kind = CoverageKind::kRadius;
  s.radius_m = meters;
  s.EffectiveRadius();
  return s;
}

CoverageStandard CoverageStandard::TravelTime(double minutes,
                                              double speed_kmh) {
  CoverageStandard s;
  s.kind = CoverageKind::kTravelTime;
  s.minutes = minutes;
  s.speed_kmh = speed_kmh;
  s.EffectiveRadius();
  return s;
}

double CoverageStandard::EffectiveRadius() const {
  if (kind == CoverageKind::kRadius) {
    if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
      Fail(ErrorKind::kConfig, "coverage radius must be positive");
    }
    return radius_m;
  }
  if (!(minutes > 0.0) || !(speed_kmh > 0.0) || !std::isfinite(minutes) ||
      !std::isfinite(speed_kmh)) {
    Fail(ErrorKind::kConfig,
         "travel-time standard needs positive minutes and speed");
  }
  return speed_kmh * 1000.0 * minutes / 60.0;
}

CoverageMatrix::CoverageMatrix(int num_areas, int num_candidates)
    : num_areas_(num_areas),
      num_candidates_(num_candidates),
      words_((num_areas + 63) / 64),
      bits_(static_cast<std::size_t>(words_) * num_candidates, 0) {}

bool CoverageMatrix::Covers(int area, int candidate) const {
  return (bits_[static_cast<std::size_t>(candidate) * words_ + area / 64] >>
          (area % 64)) &
         1U;
}

void CoverageMatrix::Set(int area, int candidate, bool value) {
  std::uint64_t& w =
      bits_[static_cast<std::size_t>(candidate) * words_ + area / 64];
  const std::uint64_t bit = std::uint64_t{1} << (area % 64);
  w = value ? (w | bit) : (w & ~bit);
}

std::span<const std::uint64_t> CoverageMatrix::Column(int j) const {
  return {bits_.data() + static_cast<std::size_t>(j) * words_,
          static_cast<std::size_t>(words_)};
}

std::vector<int> CoverageMatrix::CoveringCandidates(int area) const {
  std::vector<int> out;
  for (int j = 0; j < num_candidates_; ++j) {
    if (Covers(area, j)) out.push_back(j);
  }
  return out;
}

double MclpInstance::TotalDemand() const {
  double total = 0.0;
  for (const DemandArea& a : areas) total += a.population;
  return total;
}

double MclpInstance::CoverableDemand() const {
  double total = 0.0;
  for (int i = 0; i < num_areas(); ++i) {
    if (!coverage.CoveringCandidates(i).empty()) total += areas[i].population;
  }
  return total;
}

int MclpInstance::FixedOpenCount() const {
  return static_cast<int>(
      std::count_if(candidates.begin(), candidates.end(),
                    [](const CandidateSite& c) { return c.fixed_open; }));
}

void MclpInstance::Validate() const {
  if (coverage.num_areas() != num_areas() ||
      coverage.num_candidates() != num_candidates()) {
    Fail(ErrorKind::kInput, "coverage matrix is " +
                                std::to_string(coverage.num_areas()) + "x" +
                                std::to_string(coverage.num_candidates()) +
                                ", instance has " + std::to_string(num_areas()) +
                                " areas and " +
                                std::to_string(num_candidates()) +
                                " candidates");
  }
  std::set<std::string> ids;
  for (const DemandArea& a : areas) {
    if (!ids.insert(a.id).second) {
      Fail(ErrorKind::kInput, "duplicate demand area id '" + a.id + "'");
    }
  }
  ids.clear();
  for (const CandidateSite& c : candidates) {
    if (!ids.insert(c.id).second) {
      Fail(ErrorKind::kInput, "duplicate candidate id '" + c.id + "'");
    }
  }
}

MclpInstance BuildCoverage(std::vector<DemandArea> areas,
                           std::vector<CandidateSite> candidates,
                           const CoverageStandard& standard,
                           CoordinateMode mode) {
  if (areas.empty()) Fail(ErrorKind::kInput, "no demand areas");
  if (candidates.empty()) Fail(ErrorKind::kInput, "no candidate sites");
  const double radius = standard.EffectiveRadius();
  MclpInstance inst;
  inst.coverage = CoverageMatrix(static_cast<int>(areas.size()),
                                 static_cast<int>(candidates.size()));
  for (std::size_t i = 0; i < areas.size(); ++i) {
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const double d =
          Distance(mode, areas[i].centroid, candidates[j].location);
      inst.coverage.Set(static_cast<int>(i), static_cast<int>(j), d <= radius);
    }
  }
  inst.areas = std::move(areas);
  inst.candidates = std::move(candidates);
  inst.standard = standard;
  inst.Validate();
  return inst;
}

std::string_view CertificateName(Certificate c) {
  return c == Certificate::kOptimal ? "optimal" : "heuristic";
}

MclpSolution Evaluate(const MclpInstance& inst, std::vector<int> selected) {
  std::sort(selected.begin(), selected.end());
  MclpSolution sol;
  sol.p = static_cast<int>(selected.size());
  for (int j : selected) {
    if (j < 0 || j >= inst.num_candidates()) {
      Fail(ErrorKind::kDomain, "candidate index out of range");
    }
    sol.selected_ids.push_back(inst.candidates[j].id);
  }
  for (int i = 0; i < inst.num_areas(); ++i) {
    const bool hit = std::any_of(selected.begin(), selected.end(),
                                 [&](int j) { return inst.coverage.Covers(i, j); });
    if (!hit) continue;
    sol.covered.push_back(i);
    sol.covered_ids.push_back(inst.areas[i].id);
    sol.z += inst.areas[i].population;
  }
  const double total = inst.TotalDemand();
  sol.coverage_pct = total > 0.0 ? 100.0 * sol.z / total : 0.0;
  sol.selected = std::move(selected);
  return sol;
}

MclpSolution SolveExact(const MclpInstance& inst, int p,
                        const ExactOptions& options) {
  inst.Validate();
  CheckP(inst, p);
  if (inst.num_candidates() > options.size_cap && !options.override_cap) {
    Fail(ErrorKind::kSolverRefusal,
         "exact solver refuses " + std::to_string(inst.num_candidates()) +
             " candidates (cap " + std::to_string(options.size_cap) +
             "); use the greedy+swap solver or override the cap");
  }
  BranchAndBound bb(inst, p);
  MclpSolution sol = Evaluate(inst, bb.Run());
  sol.certificate = Certificate::kOptimal;
  sol.nodes_explored = bb.nodes();
  return sol;
}

MclpSolution SolveGreedy(const MclpInstance& inst, int p) {
  inst.Validate();
  CheckP(inst, p);
  const int m = inst.num_candidates();
  const std::vector<int> order = IdOrder(inst);
  Words covered(inst.coverage.words(), 0);
  std::vector<bool> taken(m, false);
  std::vector<int> picks;
  std::vector<double> gains;
  for (int j : order) {
    if (!inst.candidates[j].fixed_open) continue;
    gains.push_back(GainOf(inst, inst.coverage.Column(j), covered));
    OrInto(&covered, inst.coverage.Column(j));
    taken[j] = true;
    picks.push_back(j);
  }
  while (static_cast<int>(picks.size()) < p) {
    int best = -1;
    double best_gain = -1.0;
    for (int j : order) {
      if (taken[j]) continue;
      const double g = GainOf(inst, inst.coverage.Column(j), covered);
      if (g > best_gain) {
        best_gain = g;
        best = j;
      }
    }
    OrInto(&covered, inst.coverage.Column(best));
    taken[best] = true;
    picks.push_back(best);
    gains.push_back(best_gain);
  }
  MclpSolution sol = Evaluate(inst, picks);
  sol.marginal_gains = std::move(gains);
  sol.certificate = Certificate::kHeuristic;
  return sol;
}

MclpSolution ImproveSwap(const MclpInstance& inst, const MclpSolution& start) {
  inst.Validate();
  const int m = inst.num_candidates();
  const std::vector<int> order = IdOrder(inst);
  std::vector<int> rank(m);
  for (int r = 0; r < m; ++r) rank[order[r]] = r;
  const auto by_id = [&](int a, int b) { return rank[a] < rank[b]; };
  std::vector<int> current = start.selected;
  std::sort(current.begin(), current.end(), by_id);
  double current_z = Evaluate(inst, current).z;
  while (true) {
    std::vector<bool> in_set(m, false);
    for (int j : current) in_set[j] = true;
    double best_z = current_z;
    int best_out = -1;
    int best_in = -1;
    for (std::size_t o = 0; o < current.size(); ++o) {
      if (inst.candidates[current[o]].fixed_open) continue;
      Words rest(inst.coverage.words(), 0);
      double rest_z = 0.0;
      for (std::size_t t = 0; t < current.size(); ++t) {
        if (t == o) continue;
        rest_z += GainOf(inst, inst.coverage.Column(current[t]), rest);
        OrInto(&rest, inst.coverage.Column(current[t]));
      }
      for (int j : order) {
        if (in_set[j]) continue;
        const double z = rest_z + GainOf(inst, inst.coverage.Column(j), rest);
        if (z > best_z) {
          best_z = z;
          best_out = static_cast<int>(o);
          best_in = j;
        }
      }
    }
    if (best_in < 0) break;
    current[best_out] = best_in;
    std::sort(current.begin(), current.end(), by_id);
    current_z = Evaluate(inst, current).z;
  }
  MclpSolution sol = Evaluate(inst, current);
  sol.certificate = start.certificate;
  sol.marginal_gains = start.marginal_gains;
  sol.nodes_explored = start.nodes_explored;
  return sol;
}

std::string_view SolverMethodName(SolverMethod m) {
  return m == SolverMethod::kExact ? "exact" : "greedy+swap";
}

SolverMethod ParseSolverMethod(std::string_view name) {
  if (name == "exact") return SolverMethod::kExact;
  if (name == "greedy+swap" || name == "greedy") return SolverMethod::kGreedySwap;
  Fail(ErrorKind::kConfig, "unknown solver '" + std::string(name) +
                               "' (expected exact or greedy+swap)");
}

CoverageCurve ComputeCoverageCurve(const MclpInstance& inst, int p_max,
                                   SolverMethod method,
                                   const ExactOptions& options) {
  if (p_max < 1 || p_max > inst.num_candidates()) {
    Fail(ErrorKind::kDomain, "p_max = " + std::to_string(p_max) +
                                 " outside [1, " +
                                 std::to_string(inst.num_candidates()) + "]");
  }
  CoverageCurve curve;
  curve.method = method;
  const int p_min = std::max(1, inst.FixedOpenCount());
  for (int p = p_min; p <= p_max; ++p) {
    CurvePoint point;
    point.p = p;
    if (method == SolverMethod::kExact) {
      point.solution = SolveExact(inst, p, options);
    } else {
      MclpSolution greedy = SolveGreedy(inst, p);
      point.greedy_gains = greedy.marginal_gains;
      point.solution = ImproveSwap(inst, greedy);
      if (!curve.points.empty() &&
          point.solution.z < curve.points.back().solution.z) {
        // Extend the previous selection by its best single addition.
        std::vector<int> seed = curve.points.back().solution.selected;
        std::vector<bool> in_set(inst.num_candidates(), false);
        for (int j : seed) in_set[j] = true;
        int best = -1;
        double best_z = -1.0;
        for (int j : IdOrder(inst)) {
          if (in_set[j]) continue;
          std::vector<int> trial = seed;
          trial.push_back(j);
          const double z = Evaluate(inst, trial).z;
          if (z > best_z) {
            best_z = z;
            best = j;
          }
        }
        seed.push_back(best);
        MclpSolution reseeded = Evaluate(inst, seed);
        reseeded.marginal_gains = greedy.marginal_gains;
        reseeded = ImproveSwap(inst, reseeded);
        if (reseeded.z > point.solution.z) point.solution = reseeded;
      }
    }
    curve.points.push_back(std::move(point));
  }
  return curve;
}

std::string InstanceToJson(const MclpInstance& inst, CoordinateMode mode) {
  nlohmann::ordered_json j;
  j["mode"] = CoordinateModeName(mode);
  nlohmann::ordered_json areas = nlohmann::ordered_json::array();
  for (const DemandArea& a : inst.areas) {
    areas.push_back({{"id", a.id},
                     {"population", a.population},
                     {"centroid", {a.centroid.x, a.centroid.y}}});
  }
  j["areas"] = std::move(areas);
  nlohmann::ordered_json cands = nlohmann::ordered_json::array();
  for (const CandidateSite& c : inst.candidates) {
    cands.push_back({{"id", c.id},
                     {"location", {c.location.x, c.location.y}},
                     {"fixed_open", c.fixed_open},
                     {"origin", SiteOriginName(c.origin)},
                     {"score", c.score}});
  }
  j["candidates"] = std::move(cands);
  if (inst.standard) {
    const CoverageStandard& s = *inst.standard;
    if (s.kind == CoverageKind::kRadius) {
      j["standard"] = {{"kind", "radius"}, {"radius", s.radius_m}};
    } else {
      j["standard"] = {{"kind", "travel_time"},
                       {"minutes", s.minutes},
                       {"speed_kmh", s.speed_kmh}};
    }
  }
  nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
  for (int i = 0; i < inst.num_areas(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int c = 0; c < inst.num_candidates(); ++c) {
      row.push_back(inst.coverage.Covers(i, c) ? 1 : 0);
    }
    matrix.push_back(std::move(row));
  }
  j["matrix"] = std::move(matrix);
  return j.dump(2) + "\n";
}

MclpInstance InstanceFromJson(std::string_view text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    const CoordinateMode mode =
        ParseCoordinateMode(j.value("mode", std::string("planar")));
    std::vector<DemandArea> areas;
    for (const auto& a : j.at("areas")) {
      const Point c = ReadXY(a.at("centroid"));
      ValidatePoint(mode, c);
      areas.push_back(DemandArea::Create(a.at("id").get<std::string>(),
                                         std::nullopt,
                                         a.at("population").get<double>(), c));
    }
    std::vector<CandidateSite> cands;
    for (const auto& c : j.at("candidates")) {
      CandidateSite s;
      s.id = c.at("id").get<std::string>();
      s.location = ReadXY(c.at("location"));
      ValidatePoint(mode, s.location);
      s.fixed_open = c.value("fixed_open", false);
      s.origin = ParseSiteOrigin(c.value("origin", std::string("proposed")));
      s.score = c.value("score", 0.0);
      cands.push_back(std::move(s));
    }
    std::optional<CoverageStandard> standard;
    if (j.contains("standard")) {
      const auto& s = j.at("standard");
      const std::string kind = s.at("kind").get<std::string>();
      if (kind == "radius") {
        standard = CoverageStandard::Radius(s.at("radius").get<double>());
      } else if (kind == "travel_time") {
        standard = CoverageStandard::TravelTime(s.at("minutes").get<double>(),
                                                s.at("speed_kmh").get<double>());
      } else {
        Fail(ErrorKind::kInput, "unknown coverage standard kind '" + kind + "'");
      }
    }
    if (!j.contains("matrix")) {
      if (!standard) {
        Fail(ErrorKind::kInput, "instance needs a matrix or a standard");
      }
      return BuildCoverage(std::move(areas), std::move(cands), *standard, mode);
    }
    MclpInstance inst;
    const auto& rows = j.at("matrix");
    if (rows.size() != areas.size()) {
      Fail(ErrorKind::kInput, "matrix has " + std::to_string(rows.size()) +
                                  " rows for " + std::to_string(areas.size()) +
                                  " areas");
    }
    inst.coverage = CoverageMatrix(static_cast<int>(areas.size()),
                                   static_cast<int>(cands.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cands.size()) {
        Fail(ErrorKind::kInput, "matrix row " + std::to_string(i) +
                                    " has the wrong length");
      }
      for (std::size_t c = 0; c < cands.size(); ++c) {
        const int v = rows[i][c].get<int>();
        if (v != 0 && v != 1) {
          Fail(ErrorKind::kInput, "matrix entries must be 0 or 1");
        }
        inst.coverage.Set(static_cast<int>(i), static_cast<int>(c), v == 1);
      }
    }
    inst.areas = std::move(areas);
    inst.candidates = std::move(cands);
    inst.standard = standard;
    inst.Validate();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kInput, std::string("instance JSON: ") + e.what());
  }
}

std::string SolutionToJson(const MclpSolution& sol) {
  return SolutionJson(sol).dump(2) + "\n";
}

std::string CurveToJson(const CoverageCurve& curve) {
  nlohmann::ordered_json j;
  j["method"] = SolverMethodName(curve.method);
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const CurvePoint& pt : curve.points) {
    nlohmann::ordered_json p = SolutionJson(pt.solution);
    if (curve.method == SolverMethod::kGreedySwap) {
      p["greedy_gains"] = pt.greedy_gains;
    }
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  return j.dump(2) + "\n";
}

std::string CurveToCsv(const CoverageCurve& curve) {
  std::string out = "p,selected_ids,covering_percentage\n";
  for (const CurvePoint& pt : curve.points) {
    out += std::to_string(pt.p) + "," + JoinIds(pt.solution.selected_ids) +
           "," + internal::FormatDouble(pt.solution.coverage_pct) + "\n";
  }
  return out;
}

std::vector<CoverageRow> ParseCoverageCsv(std::string_view text) {
  std::vector<CoverageRow> rows;
  std::size_t start = 0;
  bool header_seen = false;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "p,selected_ids,covering_percentage") {
        Fail(ErrorKind::kInput, "unexpected coverage CSV header");
      }
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
      Fail(ErrorKind::kInput, "coverage CSV row needs three columns");
    }
    CoverageRow row;
    auto p = internal::ParseDouble(line.substr(0, c1));
    auto pct = internal::ParseDouble(line.substr(c2 + 1));
    if (!p || !pct) Fail(ErrorKind::kInput, "coverage CSV has a bad number");
    row.p = static_cast<int>(*p);
    row.covering_percentage = *pct;
    std::string_view ids = line.substr(c1 + 1, c2 - c1 - 1);
    std::size_t s = 0;
    while (s <= ids.size() && !ids.empty()) {
      auto semi = ids.find(';', s);
      if (semi == std::string_view::npos) semi = ids.size();
      row.selected_ids.emplace_back(ids.substr(s, semi - s));
      s = semi + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace branchloc
