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

// Command-line front end: one subcommand per pipeline stage plus the full run.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "branchloc/candidates.h"
#include "branchloc/digest.h"
#include "branchloc/errors.h"
#include "branchloc/fixture.h"
#include "branchloc/mclp.h"
#include "branchloc/overlay.h"
#include "branchloc/pipeline.h"
#include "branchloc/project.h"
#include "branchloc/weights.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using branchloc::ErrorKind;
using branchloc::Fail;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolverRefusal = 3;
constexpr int kExitIo = 4;

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kSpec:
    case ErrorKind::kInput:
    case ErrorKind::kGate:
    case ErrorKind::kDomain:
      return kExitValidation;
    case ErrorKind::kSolverRefusal:
      return kExitSolverRefusal;
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kNumerical:
      return kExitOther;
  }
  return kExitOther;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void Spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) Fail(ErrorKind::kIo, "short write to '" + path.string() + "'");
}

void NeedFlag(const std::string& value, const char* flag, const char* cmd) {
  if (value.empty()) {
    Fail(ErrorKind::kConfig,
         std::string(cmd) + " requires " + flag);
  }
}

std::map<std::string, std::string> Metadata(const branchloc::ProjectConfig& cfg) {
  branchloc::RunReport r;
  r.name = cfg.name;
  r.mode = cfg.mode;
  r.config_digest = cfg.config_digest;
  return branchloc::ArtifactMetadata(r);
}

std::string MetaJson(const std::map<std::string, std::string>& meta) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j.dump();
}

struct Globals {
  std::string config;
  std::string out;
  std::uint64_t seed = branchloc::kDefaultFixtureSeed;
};

int RunWeights(const Globals& g) {
  NeedFlag(g.config, "--config", "weights");
  branchloc::LoadOptions opts;
  opts.enforce_gates = false;
  const branchloc::ProjectConfig cfg = branchloc::LoadProject(g.config, opts);
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::parse(MetaJson(Metadata(cfg)));
  nlohmann::ordered_json gates = nlohmann::ordered_json::array();
  bool all_pass = true;
  for (const auto& gate : cfg.gates) {
    gates.push_back({{"matrix", gate.matrix_id},
                     {"consistency_ratio", gate.consistency_ratio},
                     {"threshold", gate.threshold},
                     {"passed", gate.passed}});
    all_pass &= gate.passed;
  }
  j["consistency"] = gates;
  if (all_pass) {
    const branchloc::Synthesis s = branchloc::ComputeWeights(cfg);
    nlohmann::ordered_json w = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < s.leaf_weights.size(); ++k) {
      w[s.leaf_weights.labels()[k]] = s.leaf_weights[k];
    }
    j["weights"] = w;
  }
  const std::string body = j.dump(2) + "\n";
  if (!g.out.empty()) {
    branchloc::OutputLock lock(g.out);
    Spit(fs::path(g.out) / "weights.json", body);
  }
  std::cout << body;
  if (!all_pass) {
    std::cerr << "error: consistency gate failed\n";
    return kExitValidation;
  }
  return kExitOk;
}

int RunScore(const Globals& g) {
  NeedFlag(g.config, "--config", "score");
  NeedFlag(g.out, "--out", "score");
  const branchloc::ProjectConfig cfg = branchloc::LoadProject(g.config);
  const branchloc::Synthesis w = branchloc::ComputeWeights(cfg);
  std::vector<branchloc::SuitabilityRaster> rasters;
  const branchloc::ScoreRaster surface =
      branchloc::ScoreSurface(cfg, w, &rasters);
  branchloc::OutputLock lock(g.out);
  const auto meta = Metadata(cfg);
  const fs::path out(g.out);
  fs::create_directories(out / "rasters");
  for (const auto& r : rasters) {
    Spit(out / "rasters" / (r.criterion_id + ".asc"),
         branchloc::FormatEsriAscii(r.grid, r.values, r.mask));
  }
  Spit(out / "score.asc",
       branchloc::FormatEsriAscii(surface.grid, surface.values, surface.mask));
  Spit(out / "score.asc.json", "{\"metadata\": " + MetaJson(meta) + "}\n");
  Spit(out / "score_points.geojson", branchloc::ScorePointsGeoJson(surface, meta));
  std::cout << "wrote " << rasters.size() << " criterion rasters and score.asc to "
            << g.out << "\n";
  return kExitOk;
}

int RunCandidates(const Globals& g, const std::string& surface_path) {
  NeedFlag(g.config, "--config", "candidates");
  NeedFlag(g.out, "--out", "candidates");
  const branchloc::ProjectConfig cfg = branchloc::LoadProject(g.config);
  branchloc::ScoreRaster surface;
  if (!surface_path.empty()) {
    const branchloc::AsciiGrid grid = branchloc::ParseEsriAscii(Slurp(surface_path));
    surface.grid = grid.grid;
    surface.values = grid.values;
    surface.mask = grid.mask;
    surface.mode = cfg.combine_mode;
  } else {
    surface = branchloc::ScoreSurface(cfg, branchloc::ComputeWeights(cfg));
  }
  const auto sites = branchloc::SelectCandidates(cfg, surface);
  branchloc::OutputLock lock(g.out);
  Spit(fs::path(g.out) / "candidates.geojson",
       branchloc::CandidatesToGeoJson(sites, Metadata(cfg)));
  for (const auto& s : sites) {
    std::printf("%s\t%.1f\t%.1f\t%.6f\t%s\t%s\n", s.id.c_str(), s.location.x,
                s.location.y, s.score,
                std::string(branchloc::SiteOriginName(s.origin)).c_str(),
                s.tier ? std::string(branchloc::TierName(*s.tier)).c_str() : "-");
  }
  return kExitOk;
}

int RunSolve(const Globals& g, const std::string& instance_path, int p_max,
             const std::string& method_name, bool override_cap) {
  branchloc::MclpInstance inst;
  std::map<std::string, std::string> meta;
  branchloc::ExactOptions exact;
  branchloc::SolverMethod method = branchloc::SolverMethod::kExact;
  if (!instance_path.empty()) {
    const std::string text = Slurp(instance_path);
    inst = branchloc::InstanceFromJson(text);
    const auto j = nlohmann::json::parse(text, nullptr, false);
    meta["instance_digest"] = branchloc::Sha256Hex(text);
    meta["mode"] = j.is_object() ? j.value("mode", std::string("planar"))
                                 : std::string("planar");
    if (p_max <= 0) p_max = 3;
  } else {
    NeedFlag(g.config, "--config", "solve (or pass --instance)");
    const branchloc::ProjectConfig cfg = branchloc::LoadProject(g.config);
    const auto surface =
        branchloc::ScoreSurface(cfg, branchloc::ComputeWeights(cfg));
    inst = branchloc::BuildInstance(cfg, branchloc::SelectCandidates(cfg, surface));
    meta = Metadata(cfg);
    exact = cfg.exact;
    method = cfg.solver;
    if (p_max <= 0) p_max = std::min(cfg.p_max, inst.num_candidates());
  }
  if (!method_name.empty()) method = branchloc::ParseSolverMethod(method_name);
  exact.override_cap = exact.override_cap || override_cap;
  const branchloc::CoverageCurve curve =
      branchloc::ComputeCoverageCurve(inst, p_max, method, exact);
  std::string csv = "#";
  for (const auto& [k, v] : meta) csv += " " + k + "=" + v;
  csv += "\n" + branchloc::CurveToCsv(curve);
  if (!g.out.empty()) {
    branchloc::OutputLock lock(g.out);
    auto body = nlohmann::ordered_json::parse(branchloc::CurveToJson(curve));
    nlohmann::ordered_json wrapped;
    wrapped["metadata"] = nlohmann::ordered_json::parse(MetaJson(meta));
    for (auto it = body.begin(); it != body.end(); ++it) wrapped[it.key()] = it.value();
    Spit(fs::path(g.out) / "solution.json", wrapped.dump(2) + "\n");
    Spit(fs::path(g.out) / "coverage.csv", csv);
  }
  std::cout << csv;
  return kExitOk;
}

int RunPipelineCmd(const Globals& g) {
  NeedFlag(g.config, "--config", "pipeline");
  NeedFlag(g.out, "--out", "pipeline");
  const branchloc::ProjectConfig cfg = branchloc::LoadProject(g.config);
  branchloc::OutputLock lock(g.out);
  const branchloc::RunReport report = branchloc::RunPipeline(cfg);
  branchloc::RenderReport(report, g.out);
  if (report.curve) {
    std::cout << branchloc::CurveToCsv(*report.curve);
  } else {
    std::cout << "no candidates; coverage table not written\n";
  }
  return kExitOk;
}

int RunReportCmd(const Globals& g, const std::string& report_path) {
  NeedFlag(g.out, "--out", "report");
  const std::string path =
      report_path.empty() ? (fs::path(g.out) / "report.json").string() : report_path;
  branchloc::OutputLock lock(g.out);
  branchloc::RenderFromReportJson(path, g.out);
  std::cout << "re-rendered coverage.csv and candidates.geojson in " << g.out
            << "\n";
  return kExitOk;
}

int RunFixture(const Globals& g) {
  NeedFlag(g.out, "--out", "fixture");
  const branchloc::FixtureSummary s = branchloc::GenerateFixture(g.seed, g.out);
  std::printf("fixture written to %s (seed %llu, attempt %d, %d candidates)\n",
              g.out.c_str(), static_cast<unsigned long long>(s.seed), s.attempts,
              s.candidates);
  for (std::size_t p = 0; p < s.optimum_pct.size(); ++p) {
    std::printf("  p=%zu optimum %.6g%%\n", p + 1, s.optimum_pct[p]);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bank branch site selection: weighting, overlay, candidates and "
               "maximal covering."};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Project config JSON");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Fixture generation seed");

  app.add_subcommand("weights", "Comparison matrices to weights and CR report");
  app.add_subcommand("score", "Criterion layers to rasters and combined surface");
  auto* cands = app.add_subcommand("candidates", "Score surface to tiered sites");
  std::string surface_path;
  cands->add_option("--surface", surface_path, "Score surface (Esri ASCII grid)");
  auto* solve = app.add_subcommand("solve", "Covering instance to solution curve");
  std::string instance_path, method;
  int p_max = 0;
  bool override_cap = false;
  solve->add_option("--instance", instance_path, "instance.json from a run");
  solve->add_option("--p-max", p_max, "Largest p on the curve");
  solve->add_option("--method", method, "exact or greedy+swap");
  solve->add_flag("--override-cap", override_cap,
                  "Allow the exact solver above its size cap");
  app.add_subcommand("pipeline", "Run every stage and write all artifacts");
  auto* report = app.add_subcommand("report", "Re-render tables from report.json");
  std::string report_path;
  report->add_option("--report", report_path, "Defaults to <out>/report.json");
  app.add_subcommand("fixture", "Generate the bundled demo fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "weights") return RunWeights(g);
    if (cmd == "score") return RunScore(g);
    if (cmd == "candidates") return RunCandidates(g, surface_path);
    if (cmd == "solve") {
      return RunSolve(g, instance_path, p_max, method, override_cap);
    }
    if (cmd == "pipeline") return RunPipelineCmd(g);
    if (cmd == "report") return RunReportCmd(g, report_path);
    if (cmd == "fixture") return RunFixture(g);
  } catch (const branchloc::Error& e) {
    std::cerr << "error [" << branchloc::ErrorKindName(e.kind())
              << "]: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
