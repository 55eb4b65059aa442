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

#include "branchloc/criteria.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "branchloc/errors.h"

namespace branchloc {
namespace {

std::string FormatNumber(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

SuitabilityClass Higher(SuitabilityClass a, SuitabilityClass b) {
  return SuitabilityRank(a) >= SuitabilityRank(b) ? a : b;
}

// Elementary piece of the value axis, optionally claimed by a class.
struct Piece {
  Interval span;
  std::optional<SuitabilityClass> owner;
};

// A sample value strictly inside an open piece.
double InteriorSample(const Interval& span) {
  if (std::isinf(span.hi)) return span.lo + 1.0;
  return span.lo + (span.hi - span.lo) / 2.0;
}

void ValidateNumericBand(const CriterionSpec& spec, const Band& band) {
  const Interval& iv = band.interval;
  const std::string where = "criterion '" + spec.id + "' band " + iv.ToString();
  if (!std::isfinite(iv.lo) || iv.lo < 0.0) {
    Fail(ErrorKind::kSpec, where + ": lower bound must be finite and >= 0");
  }
  if (std::isnan(iv.hi) || iv.hi < iv.lo) {
    Fail(ErrorKind::kSpec, where + ": upper bound below lower bound");
  }
  if (std::isinf(iv.hi) && iv.hi_closed) {
    Fail(ErrorKind::kSpec, where + ": infinite bound cannot be closed");
  }
  if (iv.lo == iv.hi && !(iv.lo_closed && iv.hi_closed)) {
    Fail(ErrorKind::kSpec, where + ": empty interval");
  }
}

NormalizedSpec NormalizeNumeric(const CriterionSpec& spec,
                                NormalizationPolicy policy) {
  if (spec.bands.empty()) {
    Fail(ErrorKind::kSpec, "criterion '" + spec.id + "' has no bands");
  }
  for (const Band& band : spec.bands) ValidateNumericBand(spec, band);

  std::vector<double> breaks{0.0};
  for (const Band& band : spec.bands) {
    breaks.push_back(band.interval.lo);
    if (std::isfinite(band.interval.hi)) breaks.push_back(band.interval.hi);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    pieces.push_back({Interval{breaks[k], breaks[k], true, true}, {}});
    const double next = k + 1 < breaks.size() ? breaks[k + 1] : kInfinity;
    pieces.push_back({Interval{breaks[k], next, false, false}, {}});
  }

  NormalizedSpec out;
  out.spec = spec;
  std::vector<bool> contested(pieces.size(), false);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Piece& piece = pieces[i];
    const double probe =
        piece.span.IsPoint() ? piece.span.lo : InteriorSample(piece.span);
    std::set<int> ranks;
    for (const Band& band : spec.bands) {
      if (!band.interval.Contains(probe)) continue;
      ranks.insert(SuitabilityRank(band.suitability));
      piece.owner = piece.owner ? Higher(*piece.owner, band.suitability)
                                : band.suitability;
    }
    contested[i] = ranks.size() > 1;
    if (contested[i] && !piece.span.IsPoint() && !policy.resolve_overlaps) {
      Fail(ErrorKind::kSpec, "criterion '" + spec.id +
                                 "': classes overlap on " +
                                 piece.span.ToString() +
                                 " and no precedence is allowed");
    }
  }

  // Overlap notes cover contested open pieces plus their contested endpoints;
  // isolated contested points are boundary hand-offs.
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!contested[i]) continue;
    if (!pieces[i].span.IsPoint()) {
      std::size_t j = i;
      while (j + 1 < pieces.size() && contested[j + 1]) ++j;
      std::size_t start = i;
      if (start > 0 && contested[start - 1]) --start;
      Interval span{pieces[start].span.lo, pieces[j].span.hi, true,
                    pieces[j].span.IsPoint()};
      out.notes.push_back({NormalizationNote::Kind::kOverlap, span,
                           "overlap on " + span.ToString() + " resolved to " +
                               std::string(SuitabilityClassName(
                                   *pieces[i].owner))});
      i = j;
      continue;
    }
    const bool next_open_contested = i + 1 < pieces.size() &&
                                     contested[i + 1] &&
                                     !pieces[i + 1].span.IsPoint();
    if (next_open_contested) continue;
    out.notes.push_back(
        {NormalizationNote::Kind::kBoundary, pieces[i].span,
         "boundary " + FormatNumber(pieces[i].span.lo) + " assigned to " +
             std::string(SuitabilityClassName(*pieces[i].owner))});
  }

  // Fill unclaimed runs.
  std::vector<Piece> filled;
  for (std::size_t i = 0; i < pieces.size();) {
    if (pieces[i].owner) {
      filled.push_back(pieces[i]);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < pieces.size() && !pieces[j + 1].owner) ++j;
    const Interval run{pieces[i].span.lo, pieces[j].span.hi,
                       pieces[i].span.lo_closed, pieces[j].span.hi_closed};
    if (!policy.fill_gaps) {
      Fail(ErrorKind::kSpec, "criterion '" + spec.id + "': no band covers " +
                                 run.ToString());
    }
    const std::optional<SuitabilityClass> left =
        i > 0 ? pieces[i - 1].owner : std::nullopt;
    const std::optional<SuitabilityClass> right =
        j + 1 < pieces.size() ? pieces[j + 1].owner : std::nullopt;
    if (!left && !right) {
      Fail(ErrorKind::kSpec, "criterion '" + spec.id + "' covers nothing");
    }
    if (!left) {
      filled.push_back({run, right});
      out.notes.push_back({NormalizationNote::Kind::kExtendToZero, run,
                           "uncovered " + run.ToString() +
                               " given to the first band"});
    } else if (!right) {
      filled.push_back({run, left});
      out.notes.push_back({NormalizationNote::Kind::kExtendToInfinity, run,
                           "uncovered " + run.ToString() +
                               " given to the last band"});
    } else {
      const double mid = run.lo + (run.hi - run.lo) / 2.0;
      if (mid > run.lo) {
        filled.push_back({{run.lo, mid, run.lo_closed, false}, left});
      }
      filled.push_back({{mid, mid, true, true}, Higher(*left, *right)});
      if (mid < run.hi) {
        filled.push_back({{mid, run.hi, false, run.hi_closed}, right});
      }
      out.notes.push_back({NormalizationNote::Kind::kGap, run,
                           "gap " + run.ToString() + " split at " +
                               FormatNumber(mid)});
    }
    i = j + 1;
  }

  // Merge adjacent pieces of the same class.
  std::vector<Band> bands;
  for (const Piece& piece : filled) {
    if (!bands.empty() && bands.back().suitability == *piece.owner) {
      bands.back().interval.hi = piece.span.hi;
      bands.back().interval.hi_closed = piece.span.hi_closed;
    } else {
      bands.push_back({piece.span, *piece.owner});
    }
  }
  out.spec.bands = std::move(bands);
  if (!out.spec.direction) out.spec.direction = InferDirection(out.spec);
  return out;
}

NormalizedSpec NormalizeCategorical(const CriterionSpec& spec) {
  if (!spec.bands.empty()) {
    Fail(ErrorKind::kSpec,
         "categorical criterion '" + spec.id + "' must not carry numeric bands");
  }
  std::set<CategoryLevel> seen;
  for (const CategoryBand& c : spec.categories) {
    if (!seen.insert(c.level).second) {
      Fail(ErrorKind::kSpec, "criterion '" + spec.id + "' lists level " +
                                 std::string(CategoryLevelName(c.level)) +
                                 " twice");
    }
  }
  if (seen.size() != 3) {
    Fail(ErrorKind::kSpec, "criterion '" + spec.id +
                               "' must map exactly High, Middle and Low");
  }
  NormalizedSpec out;
  out.spec = spec;
  std::sort(out.spec.categories.begin(), out.spec.categories.end(),
            [](const CategoryBand& a, const CategoryBand& b) {
              return static_cast<int>(a.level) < static_cast<int>(b.level);
            });
  if (!out.spec.direction) out.spec.direction = InferDirection(out.spec);
  return out;
}

}  // namespace

int SuitabilityRank(SuitabilityClass c) {
  switch (c) {
    case SuitabilityClass::kHighSuitable:
      return 2;
    case SuitabilityClass::kSuitable:
      return 1;
    case SuitabilityClass::kNonSuitable:
      return 0;
  }
  return 0;
}

std::string_view SuitabilityClassName(SuitabilityClass c) {
  switch (c) {
    case SuitabilityClass::kHighSuitable:
      return "high";
    case SuitabilityClass::kSuitable:
      return "suitable";
    case SuitabilityClass::kNonSuitable:
      return "non";
  }
  return "non";
}

SuitabilityClass ParseSuitabilityClass(std::string_view name) {
  if (name == "high") return SuitabilityClass::kHighSuitable;
  if (name == "suitable" || name == "mid") return SuitabilityClass::kSuitable;
  if (name == "non") return SuitabilityClass::kNonSuitable;
  Fail(ErrorKind::kSpec, "unknown suitability class '" + std::string(name) +
                             "' (expected high, suitable or non)");
}

ScoreScheme ScoreScheme::Create(double high, double mid, double non) {
  if (!(high <= 1.0 && high > mid && mid > non && non >= 0.0)) {
    Fail(ErrorKind::kSpec,
         "score scheme must satisfy 1 >= high > mid > non >= 0");
  }
  ScoreScheme s;
  s.high_ = high;
  s.mid_ = mid;
  s.non_ = non;
  return s;
}

double Score(SuitabilityClass c, const ScoreScheme& scheme) {
  switch (c) {
    case SuitabilityClass::kHighSuitable:
      return scheme.high();
    case SuitabilityClass::kSuitable:
      return scheme.mid();
    case SuitabilityClass::kNonSuitable:
      return scheme.non();
  }
  return scheme.non();
}

std::string_view CriterionKindName(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::kDistance:
      return "distance";
    case CriterionKind::kDensity:
      return "density";
    case CriterionKind::kCategorical:
      return "categorical";
    case CriterionKind::kCostLevel:
      return "cost_level";
  }
  return "distance";
}

CriterionKind ParseCriterionKind(std::string_view name) {
  if (name == "distance") return CriterionKind::kDistance;
  if (name == "density") return CriterionKind::kDensity;
  if (name == "categorical") return CriterionKind::kCategorical;
  if (name == "cost_level") return CriterionKind::kCostLevel;
  Fail(ErrorKind::kSpec, "unknown criterion kind '" + std::string(name) + "'");
}

bool IsNumericKind(CriterionKind kind) {
  return kind == CriterionKind::kDistance || kind == CriterionKind::kDensity;
}

std::string_view CategoryLevelName(CategoryLevel level) {
  switch (level) {
    case CategoryLevel::kHigh:
      return "High";
    case CategoryLevel::kMiddle:
      return "Middle";
    case CategoryLevel::kLow:
      return "Low";
  }
  return "Low";
}

CategoryLevel ParseCategoryLevel(std::string_view name) {
  if (name == "High" || name == "high") return CategoryLevel::kHigh;
  if (name == "Middle" || name == "middle") return CategoryLevel::kMiddle;
  if (name == "Low" || name == "low") return CategoryLevel::kLow;
  Fail(ErrorKind::kInput, "unknown category level '" + std::string(name) +
                              "' (expected High, Middle or Low)");
}

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kNearBetter:
      return "near_better";
    case Direction::kFarBetter:
      return "far_better";
    case Direction::kBandShaped:
      return "band_shaped";
  }
  return "band_shaped";
}

std::string_view NormalizationKindName(NormalizationNote::Kind kind) {
  switch (kind) {
    case NormalizationNote::Kind::kOverlap:
      return "overlap";
    case NormalizationNote::Kind::kBoundary:
      return "boundary";
    case NormalizationNote::Kind::kGap:
      return "gap";
    case NormalizationNote::Kind::kExtendToZero:
      return "extend_to_zero";
    case NormalizationNote::Kind::kExtendToInfinity:
      return "extend_to_infinity";
  }
  return "overlap";
}

bool Interval::Contains(double v) const {
  if (std::isnan(v)) return false;
  const bool above = lo_closed ? v >= lo : v > lo;
  const bool below = hi_closed ? v <= hi : v < hi;
  return above && below;
}

std::string Interval::ToString() const {
  return std::string(lo_closed ? "[" : "(") + FormatNumber(lo) + ", " +
         FormatNumber(hi) + (hi_closed ? "]" : ")");
}

NormalizedSpec ValidateSpec(const CriterionSpec& spec,
                            NormalizationPolicy policy) {
  if (spec.id.empty()) Fail(ErrorKind::kSpec, "criterion id is empty");
  if (IsNumericKind(spec.kind)) {
    if (!spec.categories.empty()) {
      Fail(ErrorKind::kSpec, "numeric criterion '" + spec.id +
                                 "' must not carry category bands");
    }
    return NormalizeNumeric(spec, policy);
  }
  return NormalizeCategorical(spec);
}

SuitabilityClass Classify(const CriterionSpec& spec, double raw) {
  if (!IsNumericKind(spec.kind)) {
    Fail(ErrorKind::kSpec,
         "criterion '" + spec.id + "' is categorical; numeric value given");
  }
  const Band* hit = nullptr;
  for (const Band& band : spec.bands) {
    if (!band.interval.Contains(raw)) continue;
    if (hit != nullptr && hit->suitability != band.suitability) {
      Fail(ErrorKind::kSpec, "criterion '" + spec.id + "': value " +
                                 FormatNumber(raw) +
                                 " lies in more than one band");
    }
    hit = &band;
  }
  if (hit == nullptr) {
    Fail(ErrorKind::kSpec, "criterion '" + spec.id + "': value " +
                               FormatNumber(raw) + " lies outside all bands");
  }
  return hit->suitability;
}

SuitabilityClass Classify(const CriterionSpec& spec, CategoryLevel level) {
  for (const CategoryBand& c : spec.categories) {
    if (c.level == level) return c.suitability;
  }
  Fail(ErrorKind::kSpec, "criterion '" + spec.id + "' has no class for level " +
                             std::string(CategoryLevelName(level)));
}

Direction InferDirection(const CriterionSpec& spec) {
  std::vector<int> ranks;
  if (IsNumericKind(spec.kind)) {
    std::vector<Band> sorted = spec.bands;
    std::sort(sorted.begin(), sorted.end(), [](const Band& a, const Band& b) {
      return a.interval.lo < b.interval.lo ||
             (a.interval.lo == b.interval.lo && a.interval.lo_closed &&
              !b.interval.lo_closed);
    });
    for (const Band& b : sorted) ranks.push_back(SuitabilityRank(b.suitability));
  } else {
    for (CategoryLevel level :
         {CategoryLevel::kLow, CategoryLevel::kMiddle, CategoryLevel::kHigh}) {
      for (const CategoryBand& c : spec.categories) {
        if (c.level == level) ranks.push_back(SuitabilityRank(c.suitability));
      }
    }
  }
  if (std::is_sorted(ranks.begin(), ranks.end(), std::greater<>())) {
    return Direction::kNearBetter;
  }
  if (std::is_sorted(ranks.begin(), ranks.end())) return Direction::kFarBetter;
  return Direction::kBandShaped;
}

std::vector<CriterionSpec> StandardBankCriteria() {
  using SC = SuitabilityClass;
  auto near_better = [](std::string id, double high_max, double non_min) {
    CriterionSpec s;
    s.id = std::move(id);
    s.kind = CriterionKind::kDistance;
    s.bands = {{Interval::AtMost(high_max), SC::kHighSuitable},
               {Interval::Between(high_max, non_min), SC::kSuitable},
               {Interval::AtLeast(non_min), SC::kNonSuitable}};
    return s;
  };
  auto categorical = [](std::string id, CriterionKind kind, SC high, SC middle,
                        SC low) {
    CriterionSpec s;
    s.id = std::move(id);
    s.kind = kind;
    s.categories = {{CategoryLevel::kHigh, high},
                    {CategoryLevel::kMiddle, middle},
                    {CategoryLevel::kLow, low}};
    return s;
  };

  std::vector<CriterionSpec> specs;
  specs.push_back(near_better("main_street", 100, 500));
  specs.push_back(near_better("business_center", 100, 250));
  specs.push_back(near_better("hotel_tourism", 1000, 3000));

  CriterionSpec office;
  office.id = "office";
  office.kind = CriterionKind::kDistance;
  office.bands = {{Interval::AtMost(250), SC::kHighSuitable},
                  {Interval::Between(200, 500), SC::kSuitable},
                  {Interval::AtLeast(500), SC::kNonSuitable}};
  specs.push_back(office);

  CriterionSpec competitor;
  competitor.id = "competitor_branch";
  competitor.kind = CriterionKind::kDistance;
  competitor.bands = {{Interval::Between(100, 200), SC::kHighSuitable},
                      {Interval::AtLeast(200), SC::kSuitable},
                      {Interval::AtMost(100), SC::kNonSuitable}};
  specs.push_back(competitor);

  CriterionSpec familiar;
  familiar.id = "familiar_branch";
  familiar.kind = CriterionKind::kDistance;
  familiar.bands = {{Interval::AtLeast(1000), SC::kHighSuitable},
                    {Interval::Between(500, 1000), SC::kSuitable},
                    {Interval::AtMost(500), SC::kNonSuitable}};
  specs.push_back(familiar);

  specs.push_back(categorical("income_level", CriterionKind::kCategorical,
                              SC::kHighSuitable, SC::kSuitable,
                              SC::kNonSuitable));
  specs.push_back(categorical("building_cost", CriterionKind::kCostLevel,
                              SC::kSuitable, SC::kHighSuitable,
                              SC::kNonSuitable));
  specs.push_back(near_better("medicine_center", 100, 500));

  CriterionSpec density;
  density.id = "population_density";
  density.kind = CriterionKind::kDensity;
  density.bands = {{Interval::AtLeast(500), SC::kHighSuitable},
                   {Interval::Between(200, 500), SC::kSuitable},
                   {Interval::AtMost(200), SC::kNonSuitable}};
  specs.push_back(density);

  specs.push_back(near_better("parking", 500, 1500));
  specs.push_back(near_better("transit", 500, 1500));
  return specs;
}

}  // namespace branchloc
