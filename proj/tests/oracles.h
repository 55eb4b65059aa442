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

// Independent reference implementations used by the test suites. None of these
// call into the code they check.

#ifndef BRANCHLOC_TESTS_ORACLES_H_
#define BRANCHLOC_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "branchloc/errors.h"
#include "branchloc/geo.h"
#include "branchloc/mclp.h"

namespace branchloc::testing {

// Kind of the Error thrown by `f`, or nullopt when it returns normally.
template <typename F>
std::optional<ErrorKind> KindOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline std::string IdOf(const char* prefix, int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, k);
  return buf;
}

// Winding number of `ring` (open, no repeated closing vertex) around `p`.
// Points on an edge report 1.
inline int WindingNumber(Point p, const std::vector<Point>& ring) {
  int wn = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i];
    const Point b = ring[(i + 1) % n];
    const double cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    const bool on_segment = cross == 0.0 && p.x >= std::min(a.x, b.x) &&
                            p.x <= std::max(a.x, b.x) &&
                            p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
    if (on_segment) return 1;
    if (a.y <= p.y) {
      if (b.y > p.y && cross > 0) ++wn;
    } else {
      if (b.y <= p.y && cross < 0) --wn;
    }
  }
  return wn;
}

inline double LinearScanNearest(CoordinateMode mode, const std::vector<Point>& pts,
                                Point q) {
  double best = INFINITY;
  for (const Point& p : pts) best = std::min(best, Distance(mode, p, q));
  return best;
}

// Three-way comparison that treats values within a relative 1e-12 as tied.
inline int Order(double a, double b) {
  if (std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b))) return 0;
  return a < b ? -1 : 1;
}

// Random star-shaped polygon around `c`: angles sorted, radii random.
inline std::vector<Point> StarPolygon(std::mt19937_64& rng, Point c, int n,
                                      double rmin, double rmax) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> rad(rmin, rmax);
  std::vector<double> angles(n);
  for (double& a : angles) a = ang(rng);
  std::sort(angles.begin(), angles.end());
  std::vector<Point> ring;
  for (double a : angles) {
    const double r = rad(rng);
    ring.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return ring;
}

// Best covered demand over every subset of exactly `p` candidates, reading
// the raw coverage bits.
struct Enumerated {
  double z = 0.0;
  std::vector<int> selected;  // optimum with the smallest sorted id list
};

// Sorted ids of `a` compare lexicographically below those of `b`.
inline bool IdsBefore(const MclpInstance& inst, const std::vector<int>& a,
                      const std::vector<int>& b) {
  std::vector<std::string> ia, ib;
  for (int j : a) ia.push_back(inst.candidates[j].id);
  for (int j : b) ib.push_back(inst.candidates[j].id);
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());
  return ia < ib;
}

inline Enumerated EnumerateMclp(const MclpInstance& inst, int p) {
  const int m = inst.num_candidates();
  Enumerated best;
  best.z = -1.0;
  std::vector<int> idx(p);
  for (int k = 0; k < p; ++k) idx[k] = k;
  while (true) {
    double z = 0.0;
    for (int i = 0; i < inst.num_areas(); ++i) {
      for (int j : idx) {
        if (inst.coverage.Covers(i, j)) {
          z += inst.areas[i].population;
          break;
        }
      }
    }
    if (z > best.z || (z == best.z && IdsBefore(inst, idx, best.selected))) {
      best.z = z;
      best.selected = idx;
    }
    int k = p - 1;
    while (k >= 0 && idx[k] == m - p + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int t = k + 1; t < p; ++t) idx[t] = idx[t - 1] + 1;
  }
  return best;
}

// Covered demand of `selected`, straight from a_ij.
inline double CoveredDemand(const MclpInstance& inst,
                            const std::vector<int>& selected) {
  double z = 0.0;
  for (int i = 0; i < inst.num_areas(); ++i) {
    for (int j : selected) {
      if (inst.coverage.Covers(i, j)) {
        z += inst.areas[i].population;
        break;
      }
    }
  }
  return z;
}

// Random instance with integer populations and a random coverage matrix.
inline MclpInstance RandomInstance(std::mt19937_64& rng, int areas,
                                   int candidates, double density) {
  std::uniform_int_distribution<int> pop(0, 1000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MclpInstance inst;
  for (int i = 0; i < areas; ++i) {
    inst.areas.push_back(DemandArea::Create(IdOf("A", i + 1), std::nullopt,
                                            pop(rng), Point{unit(rng), unit(rng)}));
  }
  for (int j = 0; j < candidates; ++j) {
    CandidateSite s;
    s.id = IdOf("C", j + 1);
    s.location = {unit(rng), unit(rng)};
    inst.candidates.push_back(s);
  }
  inst.coverage = CoverageMatrix(areas, candidates);
  for (int i = 0; i < areas; ++i) {
    for (int j = 0; j < candidates; ++j) {
      inst.coverage.Set(i, j, unit(rng) < density);
    }
  }
  return inst;
}

}  // namespace branchloc::testing

#endif  // BRANCHLOC_TESTS_ORACLES_H_
