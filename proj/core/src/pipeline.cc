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

#include "branchloc/pipeline.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <utility>

#include "branchloc/errors.h"
#include "json.hpp"
#include "text_util.h"

namespace branchloc {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

template <typename F>
auto Stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

ordered_json MetadataJson(const std::map<std::string, std::string>& meta) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

// Puts a "metadata" member first in a serialized JSON object.
std::string WithMetadata(const std::string& body,
                         const std::map<std::string, std::string>& meta) {
  const ordered_json parsed = ordered_json::parse(body);
  ordered_json out;
  out["metadata"] = MetadataJson(meta);
  for (auto it = parsed.begin(); it != parsed.end(); ++it) {
    out[it.key()] = it.value();
  }
  return out.dump(2) + "\n";
}

std::string CsvComment(const std::map<std::string, std::string>& meta) {
  std::string line = "#";
  for (const auto& [k, v] : meta) line += " " + k + "=" + v;
  return line + "\n";
}

ordered_json GridJson(const GridSpec& g) {
  return {{"origin", {g.origin().x, g.origin().y}},
          {"cell_size", g.cell_size()},
          {"ncols", g.ncols()},
          {"nrows", g.nrows()}};
}

std::string AsciiSidecar(const GridSpec& g, const std::string& layer,
                         const std::map<std::string, std::string>& meta) {
  ordered_json j;
  j["metadata"] = MetadataJson(meta);
  j["layer"] = layer;
  j["grid"] = GridJson(g);
  j["nodata"] = kEsriNoData;
  return j.dump(2) + "\n";
}

ordered_json CandidateJson(const CandidateSite& s) {
  ordered_json j;
  j["id"] = s.id;
  j["location"] = {s.location.x, s.location.y};
  j["score"] = s.score;
  j["origin"] = SiteOriginName(s.origin);
  j["tier"] = s.tier ? ordered_json(TierName(*s.tier)) : ordered_json(nullptr);
  j["fixed_open"] = s.fixed_open;
  if (s.row) j["row"] = *s.row;
  if (s.col) j["col"] = *s.col;
  return j;
}

CandidateSite CandidateFromJson(const nlohmann::json& j) {
  CandidateSite s;
  s.id = j.at("id").get<std::string>();
  s.location = {j.at("location").at(0).get<double>(),
                j.at("location").at(1).get<double>()};
  s.score = j.at("score").get<double>();
  s.origin = ParseSiteOrigin(j.at("origin").get<std::string>());
  if (j.contains("tier") && !j["tier"].is_null()) {
    s.tier = ParseTier(j["tier"].get<std::string>());
  }
  s.fixed_open = j.value("fixed_open", false);
  if (j.contains("row")) s.row = j["row"].get<int>();
  if (j.contains("col")) s.col = j["col"].get<int>();
  return s;
}

// Removes files written by a failed render.
class WriteTracker {
 public:
  explicit WriteTracker(std::string out_dir) : out_dir_(std::move(out_dir)) {}
  ~WriteTracker() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = written_.rbegin(); it != written_.rend(); ++it) {
      fs::remove(*it, ec);
    }
    for (auto it = made_dirs_.rbegin(); it != made_dirs_.rend(); ++it) {
      fs::remove(*it, ec);  // only succeeds when empty
    }
  }

  void Dir(const std::string& rel) {
    const fs::path p = fs::path(out_dir_) / rel;
    std::error_code ec;
    if (fs::is_directory(p)) return;
    if (!fs::create_directories(p, ec) || ec) {
      Fail(ErrorKind::kIo, "cannot create directory '" + p.string() + "'");
    }
    made_dirs_.push_back(p.string());
  }

  void Write(const std::string& rel, const std::string& content) {
    const std::string p = (fs::path(out_dir_) / rel).string();
    written_.push_back(p);
    internal::WriteFile(p, content);
  }

  void Remove(const std::string& rel) {
    std::error_code ec;
    fs::remove(fs::path(out_dir_) / rel, ec);
  }

  void Commit() { committed_ = true; }

 private:
  std::string out_dir_;
  std::vector<std::string> written_;
  std::vector<std::string> made_dirs_;
  bool committed_ = false;
};

void EnsureOutDir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    Fail(ErrorKind::kIo, "cannot create output directory '" + out_dir + "'");
  }
}

}  // namespace

Synthesis ComputeWeights(const ProjectConfig& cfg) {
  return Synthesize(cfg.hierarchy, cfg.consistency_threshold, cfg.random_index);
}

CellMask StudyMask(const ProjectConfig& cfg) {
  std::vector<Polygon> polys;
  for (const DemandArea& a : cfg.demand_areas) {
    if (a.geometry) polys.push_back(*a.geometry);
  }
  return BuildMask(cfg.grid, polys);
}

std::vector<SuitabilityRaster> RasterizeCriteria(
    const ProjectConfig& cfg, const CellMask& mask,
    const std::vector<std::string>& leaf_order) {
  std::vector<SuitabilityRaster> out;
  out.reserve(leaf_order.size());
  for (const std::string& id : leaf_order) {
    const CriterionEntry& c = cfg.Criterion(id);
    try {
      out.push_back(
          Rasterize(c.spec, c.layer, cfg.grid, mask, cfg.scheme, cfg.mode));
    } catch (const Error& e) {
      throw Error(e.kind(), "criterion '" + id + "': " + e.what());
    }
  }
  return out;
}

ScoreRaster ScoreSurface(const ProjectConfig& cfg, const Synthesis& weights,
                         std::vector<SuitabilityRaster>* rasters) {
  const CellMask mask = StudyMask(cfg);
  std::vector<SuitabilityRaster> local =
      RasterizeCriteria(cfg, mask, weights.leaf_weights.labels());
  ScoreRaster surface = Combine(local, weights.leaf_weights, cfg.combine_mode);
  if (rasters != nullptr) *rasters = std::move(local);
  return surface;
}

std::vector<CandidateSite> SelectCandidates(const ProjectConfig& cfg,
                                            const ScoreRaster& surface) {
  std::vector<CandidateSite> proposed =
      Extract(surface, cfg.extraction, cfg.mode);
  if (cfg.tiering.method == TieringConfig::Method::kThreshold) {
    proposed = AssignTiersByThreshold(std::move(proposed),
                                      cfg.tiering.first_min,
                                      cfg.tiering.second_min);
  } else {
    proposed = AssignTiers(std::move(proposed));
  }
  return Merge(proposed, cfg.existing_branches, &surface);
}

MclpInstance BuildInstance(const ProjectConfig& cfg,
                           std::vector<CandidateSite> candidates) {
  return BuildCoverage(cfg.demand_areas, std::move(candidates), cfg.standard,
                       cfg.mode);
}

RunReport RunPipeline(const ProjectConfig& cfg) {
  RunReport report;
  report.name = cfg.name;
  report.mode = cfg.mode;
  report.config_digest = cfg.config_digest;
  report.input_digests = cfg.input_digests;
  report.scheme = cfg.scheme;
  report.combine_mode = cfg.combine_mode;
  report.solver = cfg.solver;
  for (const CriterionEntry& c : cfg.criteria) {
    report.normalization.emplace_back(c.spec.id, c.notes);
  }
  report.coverage_radius_m =
      Stage("standard", [&] { return cfg.standard.EffectiveRadius(); });

  report.weights = Stage("weights", [&] { return ComputeWeights(cfg); });
  report.surface = Stage("overlay", [&] {
    return ScoreSurface(cfg, report.weights, &report.rasters);
  });
  report.candidates =
      Stage("candidates", [&] { return SelectCandidates(cfg, report.surface); });
  const bool none_proposed = std::none_of(
      report.candidates.begin(), report.candidates.end(),
      [](const CandidateSite& s) { return s.origin == SiteOrigin::kProposed; });
  if (none_proposed) report.notes.push_back("empty_candidate_extraction");
  if (report.candidates.empty()) {
    report.notes.push_back("no_candidates_to_solve");
    return report;
  }

  report.instance =
      Stage("coverage", [&] { return BuildInstance(cfg, report.candidates); });
  report.p_max = std::min(cfg.p_max, report.instance->num_candidates());
  if (report.p_max < cfg.p_max) report.notes.push_back("p_max_clipped");
  report.curve = Stage("mclp", [&] {
    return ComputeCoverageCurve(*report.instance, report.p_max, cfg.solver,
                                cfg.exact);
  });
  return report;
}

std::map<std::string, std::string> ArtifactMetadata(const RunReport& report) {
  return {{"config_digest", report.config_digest},
          {"mode", std::string(CoordinateModeName(report.mode))},
          {"project", report.name}};
}

std::string ReportToJson(const RunReport& r) {
  ordered_json j;
  j["format"] = "branchloc-report";
  j["version"] = 1;
  j["metadata"] = MetadataJson(ArtifactMetadata(r));
  ordered_json inputs = ordered_json::object();
  for (const auto& [path, digest] : r.input_digests) inputs[path] = digest;
  j["inputs"] = std::move(inputs);
  j["scheme"] = {{"high", r.scheme.high()},
                 {"mid", r.scheme.mid()},
                 {"non", r.scheme.non()}};
  j["combine_mode"] = CombineModeName(r.combine_mode);
  j["grid"] = GridJson(r.surface.grid);

  ordered_json norm = ordered_json::array();
  for (const auto& [id, notes] : r.normalization) {
    ordered_json list = ordered_json::array();
    for (const NormalizationNote& n : notes) {
      list.push_back({{"kind", NormalizationKindName(n.kind)},
                      {"span", n.span.ToString()},
                      {"detail", n.detail}});
    }
    norm.push_back({{"criterion", id}, {"notes", std::move(list)}});
  }
  j["normalization"] = std::move(norm);

  ordered_json weights = ordered_json::object();
  const WeightVector& w = r.weights.leaf_weights;
  for (std::size_t k = 0; k < w.size(); ++k) weights[w.labels()[k]] = w[k];
  j["weights"] = std::move(weights);
  ordered_json local = ordered_json::object();
  for (const auto& [parent, lw] : r.weights.local_weights) {
    ordered_json m = ordered_json::object();
    for (std::size_t k = 0; k < lw.size(); ++k) m[lw.labels()[k]] = lw[k];
    local[parent] = std::move(m);
  }
  j["local_weights"] = std::move(local);
  ordered_json gates = ordered_json::array();
  for (const GateResult& g : r.weights.gates) {
    gates.push_back({{"matrix", g.matrix_id},
                     {"consistency_ratio", g.consistency_ratio},
                     {"threshold", g.threshold},
                     {"passed", g.passed}});
  }
  j["consistency"] = std::move(gates);

  std::size_t active = 0;
  double lo = kInfinity, hi = -kInfinity;
  for (std::size_t i = 0; i < r.surface.values.size(); ++i) {
    if (!r.surface.IsActive(i)) continue;
    ++active;
    lo = std::min(lo, r.surface.values[i]);
    hi = std::max(hi, r.surface.values[i]);
  }
  j["surface"] = {{"active_cells", active},
                  {"min_score", active ? lo : 0.0},
                  {"max_score", active ? hi : 0.0}};

  ordered_json cands = ordered_json::array();
  for (const CandidateSite& s : r.candidates) cands.push_back(CandidateJson(s));
  j["candidates"] = std::move(cands);

  if (r.instance) {
    j["coverage"] = {{"radius_m", r.coverage_radius_m},
                     {"areas", r.instance->num_areas()},
                     {"candidates", r.instance->num_candidates()},
                     {"total_demand", r.instance->TotalDemand()},
                     {"coverable_demand", r.instance->CoverableDemand()}};
  }
  if (r.curve) {
    j["solver"] = SolverMethodName(r.solver);
    j["p_max"] = r.p_max;
    j["curve"] = ordered_json::parse(CurveToJson(*r.curve));
  }
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

void RenderReport(const RunReport& report, const std::string& out_dir) {
  EnsureOutDir(out_dir);
  const auto meta = ArtifactMetadata(report);
  WriteTracker out(out_dir);

  out.Write("report.json", ReportToJson(report));
  const ScoreRaster& s = report.surface;
  out.Write("score.asc", FormatEsriAscii(s.grid, s.values, s.mask));
  out.Write("score.asc.json", AsciiSidecar(s.grid, "score", meta));
  out.Write("score_points.geojson", ScorePointsGeoJson(s, meta));
  if (!report.rasters.empty()) out.Dir("rasters");
  for (const SuitabilityRaster& r : report.rasters) {
    const std::string base = "rasters/" + r.criterion_id + ".asc";
    out.Write(base, FormatEsriAscii(r.grid, r.values, r.mask));
    out.Write(base + ".json", AsciiSidecar(r.grid, r.criterion_id, meta));
  }
  out.Write("candidates.geojson", CandidatesToGeoJson(report.candidates, meta));
  if (report.instance) {
    out.Write("instance.json",
              WithMetadata(InstanceToJson(*report.instance, report.mode), meta));
  }
  if (report.curve && !report.curve->points.empty()) {
    out.Write("solution.json", WithMetadata(CurveToJson(*report.curve), meta));
    out.Write("coverage.csv", CsvComment(meta) + CurveToCsv(*report.curve));
  } else {
    out.Remove("coverage.csv");
  }
  out.Commit();
}

void RenderFromReportJson(const std::string& report_path,
                          const std::string& out_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(internal::ReadFile(report_path));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kInput, "report: " + std::string(e.what()));
  }
  std::map<std::string, std::string> meta;
  std::vector<CandidateSite> sites;
  CoverageCurve curve;
  try {
    if (j.value("format", std::string()) != "branchloc-report") {
      Fail(ErrorKind::kInput, "report: not a branchloc report");
    }
    for (const auto& [k, v] : j.at("metadata").items()) {
      meta[k] = v.get<std::string>();
    }
    for (const auto& c : j.at("candidates")) sites.push_back(CandidateFromJson(c));
    if (j.contains("curve")) {
      curve.method = ParseSolverMethod(j["curve"].at("method").get<std::string>());
      for (const auto& p : j["curve"].at("points")) {
        CurvePoint pt;
        pt.p = p.at("p").get<int>();
        pt.solution.p = pt.p;
        pt.solution.selected_ids =
            p.at("selected_ids").get<std::vector<std::string>>();
        pt.solution.coverage_pct = p.at("coverage_pct").get<double>();
        curve.points.push_back(std::move(pt));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kInput, "report: " + std::string(e.what()));
  }
  EnsureOutDir(out_dir);
  WriteTracker out(out_dir);
  out.Write("candidates.geojson", CandidatesToGeoJson(sites, meta));
  if (!curve.points.empty()) {
    out.Write("coverage.csv", CsvComment(meta) + CurveToCsv(curve));
  }
  out.Commit();
}

OutputLock::OutputLock(const std::string& out_dir) {
  EnsureOutDir(out_dir);
  path_ = (fs::path(out_dir) / ".branchloc.lock").string();
  fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd_ < 0) {
    if (errno == EEXIST) {
      Fail(ErrorKind::kIo, "output directory '" + out_dir +
                               "' is locked by another run (" + path_ + ")");
    }
    Fail(ErrorKind::kIo,
         "cannot create lock '" + path_ + "': " + std::strerror(errno));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  if (::write(fd_, pid.data(), pid.size()) < 0) {
    // The lock is held regardless of the pid note.
  }
}

OutputLock::~OutputLock() {
  if (fd_ >= 0) {
    ::close(fd_);
    ::unlink(path_.c_str());
  }
}

}  // namespace branchloc
