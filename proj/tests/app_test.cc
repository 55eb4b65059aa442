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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "branchloc/pipeline.h"
#include "branchloc/project.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "oracles.h"

namespace branchloc {
namespace {

namespace fs = std::filesystem;
using testing::KindOf;

const fs::path kFixture = BRANCHLOC_FIXTURE_DIR;
const std::string kCli = BRANCHLOC_CLI_PATH;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void Spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("branchloc_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Copy of the fixture with `edit` applied to its config.
  fs::path Project(const std::function<void(nlohmann::json&)>& edit = {}) {
    const fs::path root = dir_ / "project";
    fs::copy(kFixture, root, fs::copy_options::recursive);
    if (edit) {
      nlohmann::json cfg = nlohmann::json::parse(Slurp(root / "config.json"));
      edit(cfg);
      Spit(root / "config.json", cfg.dump(2));
    }
    return root / "config.json";
  }

  fs::path dir_;
};

std::string ErrorText(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

constexpr char kCyclicUrban[] =
    "main_street,business_center,hotel_tourism,office,medicine_center\n"
    "1,9,1/9,1,1\n1/9,1,9,1,1\n9,1/9,1,1,1\n1,1,1,1,1\n1,1,1,1,1\n";

nlohmann::json& Node(nlohmann::json& cfg, const std::string& id) {
  for (auto& child : cfg["hierarchy"]["children"]) {
    if (child["id"] == id) return child;
  }
  return cfg["hierarchy"];
}

TEST(LoadProject, Fixture) {
  const ProjectConfig cfg = LoadProject((kFixture / "config.json").string());
  EXPECT_EQ(cfg.name, "isfahan20");
  EXPECT_EQ(cfg.criteria.size(), 12u);
  EXPECT_EQ(cfg.demand_areas.size(), 20u);
  EXPECT_EQ(cfg.existing_branches.size(), 9u);
  EXPECT_EQ(cfg.gates.size(), 4u);
  for (const GateResult& g : cfg.gates) EXPECT_TRUE(g.passed) << g.matrix_id;
  EXPECT_EQ(cfg.standard.EffectiveRadius(), 2500.0);
  EXPECT_EQ(cfg.input_digests.count("layers/demand.geojson"), 1u);
  EXPECT_EQ(cfg.input_digests.count("matrices/goal.csv"), 1u);
  EXPECT_EQ(cfg.config_digest.size(), 64u);
  double total = 0.0;
  for (const auto& a : cfg.demand_areas) total += a.population;
  EXPECT_EQ(total, 600000.0);
}

TEST_F(Scratch, UndeclaredLeafIsNamed) {
  const fs::path cfg = Project([](nlohmann::json& j) {
    Node(j, "competition")["children"].push_back({{"criterion", "ghost_layer"}});
    Node(j, "competition")["matrix"] = "matrices/competition.csv";
  });
  Spit(cfg.parent_path() / "matrices/competition.csv",
       "competitor_branch,ghost_layer\n1,2\n1/2,1\n");
  const std::string msg = ErrorText([&] { LoadProject(cfg.string()); });
  EXPECT_NE(msg.find("ghost_layer"), std::string::npos) << msg;
  EXPECT_EQ(KindOf([&] { LoadProject(cfg.string()); }), ErrorKind::kConfig);
}

TEST_F(Scratch, CriterionMissingFromHierarchyIsNamed) {
  const fs::path cfg = Project([](nlohmann::json& j) {
    auto& node = Node(j, "flexibility");
    node["children"] = nlohmann::json::array({{{"criterion", "familiar_branch"}}});
    auto& transport = Node(j, "transportation");
    transport["children"] = nlohmann::json::array({{{"criterion", "parking"}}});
    transport.erase("matrix");
  });
  const std::string msg = ErrorText([&] { LoadProject(cfg.string()); });
  EXPECT_NE(msg.find("transit"), std::string::npos) << msg;
}

TEST_F(Scratch, InconsistentMatrixFailsGate) {
  const fs::path cfg = Project();
  Spit(cfg.parent_path() / "matrices/urban_facilities.csv", kCyclicUrban);
  const std::string msg = ErrorText([&] { LoadProject(cfg.string()); });
  EXPECT_NE(msg.find("urban_facilities"), std::string::npos) << msg;
  EXPECT_NE(msg.find("CR "), std::string::npos) << msg;
  EXPECT_EQ(KindOf([&] { LoadProject(cfg.string()); }), ErrorKind::kGate);
  LoadOptions lax;
  lax.enforce_gates = false;
  const ProjectConfig loaded = LoadProject(cfg.string(), lax);
  int failing = 0;
  for (const auto& g : loaded.gates) failing += !g.passed;
  EXPECT_EQ(failing, 1);
}

TEST_F(Scratch, MissingFilesAreConfigErrors) {
  const fs::path cfg = Project();
  fs::remove(cfg.parent_path() / "layers/parking.geojson");
  EXPECT_EQ(KindOf([&] { LoadProject(cfg.string()); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { LoadProject((dir_ / "nope.json").string()); }),
            ErrorKind::kConfig);
  Spit(dir_ / "bad.json", "{not json");
  EXPECT_EQ(KindOf([&] { LoadProject((dir_ / "bad.json").string()); }),
            ErrorKind::kConfig);
}

TEST_F(Scratch, ConfigFieldErrors) {
  const auto kind_with = [&](const std::function<void(nlohmann::json&)>& edit) {
    const fs::path cfg = Project(edit);
    const auto k = KindOf([&] { LoadProject(cfg.string()); });
    fs::remove_all(dir_ / "project");
    return k;
  };
  EXPECT_EQ(kind_with([](nlohmann::json& j) { j["p_max"] = 0; }), ErrorKind::kConfig);
  EXPECT_EQ(kind_with([](nlohmann::json& j) { j["standard"]["radius"] = -5; }),
            ErrorKind::kConfig);
  EXPECT_EQ(kind_with([](nlohmann::json& j) { j.erase("demand"); }), ErrorKind::kConfig);
  EXPECT_EQ(kind_with([](nlohmann::json& j) { j["consistency"]["threshold"] = 0; }),
            ErrorKind::kConfig);
  EXPECT_EQ(kind_with([](nlohmann::json& j) { j["tiering"]["method"] = "quartile"; }),
            ErrorKind::kConfig);
}

TEST_F(Scratch, LoadLayerGeometryErrors) {
  CriterionSpec distance;
  distance.id = "atm";
  distance.kind = CriterionKind::kDistance;
  Spit(dir_ / "polys.geojson", R"({"type": "FeatureCollection", "features": [
      {"type": "Feature", "properties": {"level": "High"},
       "geometry": {"type": "Polygon", "coordinates": [[[0,0],[1,0],[1,1],[0,0]]]}}]})");
  EXPECT_EQ(KindOf([&] {
              LoadLayer((dir_ / "polys.geojson").string(), distance,
                        CoordinateMode::kPlanar);
            }),
            ErrorKind::kInput);
  CriterionSpec zoning;
  zoning.id = "zoning";
  zoning.kind = CriterionKind::kCategorical;
  Spit(dir_ / "points.geojson", R"({"type": "FeatureCollection", "features": [
      {"type": "Feature", "properties": {},
       "geometry": {"type": "Point", "coordinates": [3, 4]}}]})");
  EXPECT_EQ(KindOf([&] {
              LoadLayer((dir_ / "points.geojson").string(), zoning,
                        CoordinateMode::kPlanar);
            }),
            ErrorKind::kInput);
  const FeatureLayer pts =
      LoadLayer((dir_ / "points.geojson").string(), distance, CoordinateMode::kPlanar);
  ASSERT_EQ(pts.points.size(), 1u);
  EXPECT_EQ(pts.points[0], (Point{3, 4}));
  EXPECT_EQ(KindOf([&] {
              LoadLayer((dir_ / "polys.geojson").string(), zoning,
                        CoordinateMode::kPlanar, "missing_prop");
            }),
            ErrorKind::kInput);
}

TEST(RunPipeline, FixtureCurve) {
  const RunReport r = RunPipeline(LoadProject((kFixture / "config.json").string()));
  ASSERT_TRUE(r.curve.has_value());
  ASSERT_EQ(r.curve->points.size(), 3u);
  EXPECT_EQ(r.candidates.size(), 23u);
  EXPECT_EQ(r.curve->points[0].solution.coverage_pct, 90.0);
  EXPECT_EQ(r.curve->points[1].solution.coverage_pct, 96.0);
  EXPECT_EQ(r.curve->points[2].solution.coverage_pct, 100.0);
  for (int p = 1; p <= 3; ++p) {
    const MclpSolution& s = r.curve->points[p - 1].solution;
    EXPECT_EQ(testing::EnumerateMclp(*r.instance, p).z, s.z);
    EXPECT_EQ(s.certificate, Certificate::kOptimal);
  }
  EXPECT_NEAR(r.weights.leaf_weights.Get("population_density"), 0.1816, 5e-5);
  EXPECT_NEAR(r.weights.leaf_weights.Get("competitor_branch"), 0.1182, 5e-5);
  int existing = 0;
  for (const auto& c : r.candidates) existing += c.origin == SiteOrigin::kExisting;
  EXPECT_EQ(existing, 9);
}

TEST(RunPipeline, GreedyMatchesExactOnFixture) {
  ProjectConfig cfg = LoadProject((kFixture / "config.json").string());
  cfg.solver = SolverMethod::kGreedySwap;
  const RunReport r = RunPipeline(cfg);
  ASSERT_TRUE(r.curve.has_value());
  EXPECT_EQ(r.curve->points[2].solution.coverage_pct, 100.0);
  EXPECT_EQ(r.curve->points[0].solution.coverage_pct, 90.0);
}

TEST(RunPipeline, PMaxClippedToCandidates) {
  ProjectConfig cfg = LoadProject((kFixture / "config.json").string());
  cfg.p_max = 40;
  cfg.solver = SolverMethod::kGreedySwap;
  const RunReport r = RunPipeline(cfg);
  EXPECT_EQ(r.p_max, 23);
  EXPECT_NE(std::find(r.notes.begin(), r.notes.end(), "p_max_clipped"), r.notes.end());
}

TEST(RunPipeline, EmptyExtractionIsFlagged) {
  ProjectConfig cfg = LoadProject((kFixture / "config.json").string());
  cfg.extraction.min_score = 0.99;
  const RunReport r = RunPipeline(cfg);
  EXPECT_NE(std::find(r.notes.begin(), r.notes.end(), "empty_candidate_extraction"),
            r.notes.end());
  EXPECT_EQ(r.candidates.size(), 9u);
  EXPECT_TRUE(r.curve.has_value());
}

TEST_F(Scratch, RenderedArtifacts) {
  const RunReport r = RunPipeline(LoadProject((kFixture / "config.json").string()));
  RenderReport(r, dir_.string());
  for (const char* f : {"report.json", "score.asc", "score.asc.json",
                        "score_points.geojson", "candidates.geojson", "instance.json",
                        "solution.json", "coverage.csv", "rasters/office.asc"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  const std::string csv = Slurp(dir_ / "coverage.csv");
  EXPECT_EQ(csv.rfind("# config_digest=" + r.config_digest, 0), 0u) << csv;
  const auto rows = ParseCoverageCsv(csv);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(rows[k].selected_ids, r.curve->points[k].solution.selected_ids);
    EXPECT_EQ(rows[k].covering_percentage, r.curve->points[k].solution.coverage_pct);
  }
  const auto report = nlohmann::json::parse(Slurp(dir_ / "report.json"));
  EXPECT_EQ(report["format"], "branchloc-report");
  EXPECT_EQ(report["metadata"]["config_digest"], r.config_digest);
  EXPECT_EQ(Slurp(dir_ / "report.json").find(kFixture.string()), std::string::npos);
  const MclpInstance back = InstanceFromJson(Slurp(dir_ / "instance.json"));
  EXPECT_EQ(back.coverage, r.instance->coverage);

  fs::remove(dir_ / "coverage.csv");
  fs::remove(dir_ / "candidates.geojson");
  RenderFromReportJson((dir_ / "report.json").string(), dir_.string());
  EXPECT_EQ(Slurp(dir_ / "coverage.csv"), csv);
}

TEST_F(Scratch, DeterministicArtifacts) {
  for (const char* run : {"a", "b"}) {
    const RunReport r = RunPipeline(LoadProject((kFixture / "config.json").string()));
    RenderReport(r, (dir_ / run).string());
  }
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir_ / "a");
    EXPECT_EQ(Slurp(e.path()), Slurp(dir_ / "b" / rel)) << rel;
  }
}

TEST_F(Scratch, FailedRenderLeavesNothing) {
  const RunReport r = RunPipeline(LoadProject((kFixture / "config.json").string()));
  Spit(dir_ / "rasters", "in the way");
  EXPECT_EQ(KindOf([&] { RenderReport(r, dir_.string()); }), ErrorKind::kIo);
  EXPECT_FALSE(fs::exists(dir_ / "report.json"));
  EXPECT_FALSE(fs::exists(dir_ / "score.asc"));
}

TEST_F(Scratch, OutputLockIsExclusive) {
  {
    OutputLock first(dir_.string());
    EXPECT_EQ(KindOf([&] { OutputLock second(dir_.string()); }), ErrorKind::kIo);
  }
  OutputLock again(dir_.string());
  SUCCEED();
}

int RunCli(const std::string& args, std::string* out = nullptr) {
  const std::string log = (fs::temp_directory_path() /
                           ("branchloc_cli_" + std::to_string(::getpid()) + ".log"))
                              .string();
  const int status = std::system((kCli + " " + args + " >" + log + " 2>&1").c_str());
  if (out) *out = Slurp(log);
  fs::remove(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(Scratch, CliExitCodes) {
  const std::string cfg = (kFixture / "config.json").string();
  const std::string out = (dir_ / "out").string();
  std::string text;
  EXPECT_EQ(RunCli("pipeline --config " + cfg + " --out " + out, &text), 0) << text;
  EXPECT_NE(text.find("P06;P10;E02"), std::string::npos) << text;
  EXPECT_EQ(RunCli("report --out " + out, &text), 0) << text;
  EXPECT_EQ(RunCli("weights --config " + cfg, &text), 0) << text;
  EXPECT_EQ(RunCli("solve --instance " + out + "/instance.json --method greedy+swap",
                   &text),
            0)
      << text;

  EXPECT_EQ(RunCli("pipeline --config " + (dir_ / "none.json").string() + " --out " + out),
            2);
  EXPECT_EQ(RunCli("solve --instance " + (dir_ / "none.json").string()), 4);

  const fs::path bad = Project();
  Spit(bad.parent_path() / "matrices/urban_facilities.csv", kCyclicUrban);
  EXPECT_EQ(RunCli("weights --config " + bad.string(), &text), 2);
  EXPECT_NE(text.find("\"passed\": false"), std::string::npos) << text;
  EXPECT_EQ(RunCli("pipeline --config " + bad.string() + " --out " + out), 2);

  std::mt19937_64 rng(70);
  MclpInstance big = testing::RandomInstance(rng, 10, 31, 0.2);
  Spit(dir_ / "big.json", InstanceToJson(big));
  EXPECT_EQ(RunCli("solve --instance " + (dir_ / "big.json").string()), 3);
  EXPECT_EQ(RunCli("solve --override-cap --p-max 2 --instance " +
                   (dir_ / "big.json").string()),
            0);

  { OutputLock held(out);
    EXPECT_EQ(RunCli("pipeline --config " + cfg + " --out " + out), 4); }
}

}  // namespace
}  // namespace branchloc
