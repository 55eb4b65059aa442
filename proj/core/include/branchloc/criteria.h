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

// Criterion specifications and the banded classifier that maps raw attribute
// values (distances, densities, zoning levels) onto three suitability classes.

#ifndef BRANCHLOC_CRITERIA_H_
#define BRANCHLOC_CRITERIA_H_

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace branchloc {

enum class SuitabilityClass { kHighSuitable, kSuitable, kNonSuitable };

// 2 for kHighSuitable, 1 for kSuitable, 0 for kNonSuitable.
int SuitabilityRank(SuitabilityClass c);
std::string_view SuitabilityClassName(SuitabilityClass c);
SuitabilityClass ParseSuitabilityClass(std::string_view name);

// Numeric score per class. Invariant: 1 >= high > mid > non >= 0.
class ScoreScheme {
 public:
  ScoreScheme() = default;
  static ScoreScheme Create(double high, double mid, double non);

  double high() const { return high_; }
  double mid() const { return mid_; }
  double non() const { return non_; }

 private:
  double high_ = 0.6;
  double mid_ = 0.4;
  double non_ = 0.0;
};

double Score(SuitabilityClass c, const ScoreScheme& scheme);

enum class CriterionKind { kDistance, kDensity, kCategorical, kCostLevel };

std::string_view CriterionKindName(CriterionKind kind);
CriterionKind ParseCriterionKind(std::string_view name);
bool IsNumericKind(CriterionKind kind);

enum class CategoryLevel { kHigh, kMiddle, kLow };

std::string_view CategoryLevelName(CategoryLevel level);
CategoryLevel ParseCategoryLevel(std::string_view name);

enum class Direction { kNearBetter, kFarBetter, kBandShaped };

std::string_view DirectionName(Direction d);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// A range of non-negative raw values. `hi` may be +infinity, in which case
// `hi_closed` is false.
struct Interval {
  double lo = 0.0;
  double hi = kInfinity;
  bool lo_closed = true;
  bool hi_closed = false;

  static Interval AtMost(double x) { return {0.0, x, true, true}; }
  static Interval AtLeast(double x) { return {x, kInfinity, true, false}; }
  static Interval Between(double a, double b) { return {a, b, true, true}; }
  static Interval HalfOpen(double a, double b) { return {a, b, true, false}; }

  bool Contains(double v) const;
  bool IsPoint() const { return lo == hi; }
  std::string ToString() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Band {
  Interval interval;
  SuitabilityClass suitability;

  friend bool operator==(const Band&, const Band&) = default;
};

struct CategoryBand {
  CategoryLevel level;
  SuitabilityClass suitability;

  friend bool operator==(const CategoryBand&, const CategoryBand&) = default;
};

struct CriterionSpec {
  std::string id;
  CriterionKind kind = CriterionKind::kDistance;
  // Feature layer path; empty when supplied out of band.
  std::string layer_ref;
  // Numeric kinds.
  std::vector<Band> bands;
  // Categorical and cost-level kinds.
  std::vector<CategoryBand> categories;
  std::optional<Direction> direction;

  friend bool operator==(const CriterionSpec&, const CriterionSpec&) = default;
};

struct NormalizationNote {
  enum class Kind {
    kOverlap,          // two classes claimed an interior range
    kBoundary,         // shared endpoint handed to the higher class
    kGap,              // uncovered interior range split at its midpoint
    kExtendToZero,     // uncovered prefix given to the first band
    kExtendToInfinity  // uncovered tail given to the last band
  };
  Kind kind;
  Interval span;
  std::string detail;
};

std::string_view NormalizationKindName(NormalizationNote::Kind kind);

struct NormalizationPolicy {
  bool resolve_overlaps = true;
  bool fill_gaps = true;
};

struct NormalizedSpec {
  CriterionSpec spec;
  std::vector<NormalizationNote> notes;
};

// Rewrites numeric bands into disjoint intervals covering [0, inf):
// overlaps go to the higher-suitability class, shared endpoints go to the
// higher-suitability side, uncovered interior ranges are split at their
// midpoint between the neighbouring bands. Categorical specs must name each
// of High/Middle/Low exactly once. Throws kSpec when the spec cannot be
// repaired under `policy`.
NormalizedSpec ValidateSpec(const CriterionSpec& spec,
                            NormalizationPolicy policy = {});

// Class of the unique band containing `raw`. Throws kSpec if no band or more
// than one band contains it.
SuitabilityClass Classify(const CriterionSpec& spec, double raw);
SuitabilityClass Classify(const CriterionSpec& spec, CategoryLevel level);

// Monotonicity of class rank along increasing raw value (normalized numeric
// specs). Categorical specs are read along Low -> Middle -> High.
Direction InferDirection(const CriterionSpec& spec);

// The twelve bank-branch criteria with their standard distance, density and
// zoning bands, un-normalized. Layer refs are left empty.
std::vector<CriterionSpec> StandardBankCriteria();

}  // namespace branchloc

#endif  // BRANCHLOC_CRITERIA_H_
