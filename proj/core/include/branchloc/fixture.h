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

// Generator for the bundled twenty-section demo city. The layers are random
// but seeded; the section populations are then searched so the covering
// optima come out at exactly 90, 96 and 100 percent for p = 1, 2, 3.

#ifndef BRANCHLOC_FIXTURE_H_
#define BRANCHLOC_FIXTURE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace branchloc {

struct FixtureSummary {
  std::uint64_t seed = 0;
  int attempts = 0;
  int candidates = 0;
  std::vector<double> populations;
  // Brute-force optimum covering percentage for p = 1, 2, 3.
  std::vector<double> optimum_pct;
};

inline constexpr std::uint64_t kDefaultFixtureSeed = 20;

// Writes config.json, layers/ and matrices/ under `out_dir`. Throws
// kNumerical if no seeded attempt reaches the targets.
FixtureSummary GenerateFixture(std::uint64_t seed, const std::string& out_dir);

}  // namespace branchloc

#endif  // BRANCHLOC_FIXTURE_H_
