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

#include "branchloc/weights.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "branchloc/errors.h"

namespace branchloc {
namespace {

constexpr double kReciprocityTolerance = 1e-9;
constexpr double kScaleMin = 1.0 / 9.0;
constexpr double kScaleMax = 9.0;

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> ParseNumber(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> ParseJudgment(std::string_view cell) {
  const auto slash = cell.find('/');
  if (slash == std::string_view::npos) return ParseNumber(cell);
  auto num = ParseNumber(cell.substr(0, slash));
  auto den = ParseNumber(cell.substr(slash + 1));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

std::string FormatJudgment(double v) {
  const double r = std::round(v);
  if (v >= 1.0 && std::abs(v - r) < 1e-9) {
    return std::to_string(static_cast<int>(r));
  }
  const double inv = std::round(1.0 / v);
  if (v < 1.0 && std::abs(1.0 / v - inv) < 1e-9) {
    return "1/" + std::to_string(static_cast<int>(inv));
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void CollectLeaves(const HierarchyNode& node, std::vector<std::string>* out) {
  if (node.is_leaf()) {
    out->push_back(node.id);
    return;
  }
  for (const auto& child : node.children) CollectLeaves(child, out);
}

void ValidateNode(const HierarchyNode& node, std::set<std::string>* leaves) {
  if (node.id.empty()) Fail(ErrorKind::kConfig, "hierarchy node without id");
  if (node.is_leaf()) {
    if (!leaves->insert(node.id).second) {
      Fail(ErrorKind::kConfig,
           "hierarchy leaf '" + node.id + "' appears more than once");
    }
    return;
  }
  const int k = static_cast<int>(node.children.size());
  if (k >= 2 && !node.matrix) {
    Fail(ErrorKind::kConfig, "hierarchy node '" + node.id + "' has " +
                                 std::to_string(k) +
                                 " children but no comparison matrix");
  }
  if (node.matrix) {
    if (node.matrix->size() != k) {
      Fail(ErrorKind::kConfig,
           "hierarchy node '" + node.id + "': matrix dimension " +
               std::to_string(node.matrix->size()) + " != child count " +
               std::to_string(k));
    }
    const auto& labels = node.matrix->labels();
    if (!labels.empty()) {
      for (int i = 0; i < k; ++i) {
        if (labels[i] != node.children[i].id) {
          Fail(ErrorKind::kConfig,
               "hierarchy node '" + node.id + "': matrix column '" +
                   labels[i] + "' does not match child '" +
                   node.children[i].id + "'");
        }
      }
    }
  }
  for (const auto& child : node.children) ValidateNode(child, leaves);
}

void SynthesizeNode(const HierarchyNode& node, double path_weight,
                    double threshold, const RandomIndexTable& ri,
                    std::vector<double>* leaf_values,
                    std::vector<GateResult>* gates,
                    std::map<std::string, WeightVector>* local) {
  if (node.is_leaf()) {
    leaf_values->push_back(path_weight);
    return;
  }
  std::vector<std::string> child_ids;
  for (const auto& c : node.children) child_ids.push_back(c.id);
  WeightVector w;
  if (node.matrix) {
    gates->push_back(Gate(*node.matrix, threshold, ri));
    w = WeightVector(PrincipalWeights(*node.matrix).values(), child_ids);
  } else {
    w = WeightVector({1.0}, child_ids);
  }
  (*local)[node.id] = w;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    SynthesizeNode(node.children[i], path_weight * w[i], threshold, ri,
                   leaf_values, gates, local);
  }
}

}  // namespace

ComparisonMatrix ComparisonMatrix::Create(std::vector<std::vector<double>> rows,
                                          std::string id,
                                          std::vector<std::string> labels) {
  const std::string name = id.empty() ? "comparison matrix" : "matrix '" + id + "'";
  const int n = static_cast<int>(rows.size());
  if (n < kMinMatrixDim || n > kMaxMatrixDim) {
    Fail(ErrorKind::kInput, name + ": dimension " + std::to_string(n) +
                                " outside [2, 15]");
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n) {
    Fail(ErrorKind::kInput, name + ": label count does not match dimension");
  }
  ComparisonMatrix m;
  m.n_ = n;
  m.id_ = std::move(id);
  m.labels_ = std::move(labels);
  m.entries_.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      Fail(ErrorKind::kInput, name + ": row " + std::to_string(i) +
                                  " has " + std::to_string(rows[i].size()) +
                                  " entries, expected " + std::to_string(n));
    }
    for (double v : rows[i]) m.entries_.push_back(v);
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(m.at(i, i) - 1.0) > kReciprocityTolerance) {
      Fail(ErrorKind::kInput, name + ": diagonal entry " + std::to_string(i) +
                                  " is not 1");
    }
    for (int j = 0; j < n; ++j) {
      const double v = m.at(i, j);
      if (!std::isfinite(v) || v < kScaleMin * (1 - 1e-9) ||
          v > kScaleMax * (1 + 1e-9)) {
        Fail(ErrorKind::kInput, name + ": entry (" + std::to_string(i) + "," +
                                    std::to_string(j) +
                                    ") outside the 1/9..9 scale");
      }
      if (std::abs(v * m.at(j, i) - 1.0) > kReciprocityTolerance) {
        Fail(ErrorKind::kInput, name + ": entries (" + std::to_string(i) +
                                    "," + std::to_string(j) +
                                    ") are not reciprocal");
      }
    }
  }
  return m;
}

ComparisonMatrix ComparisonMatrix::FromWeights(std::span<const double> w,
                                               std::string id) {
  std::vector<std::vector<double>> rows(w.size(),
                                        std::vector<double>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) rows[i][j] = w[i] / w[j];
    rows[i][i] = 1.0;
  }
  return Create(std::move(rows), std::move(id));
}

std::vector<std::vector<double>> ComparisonMatrix::Rows() const {
  std::vector<std::vector<double>> rows(n_, std::vector<double>(n_));
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) rows[i][j] = at(i, j);
  }
  return rows;
}

WeightVector::WeightVector(std::vector<double> values,
                           std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  if (!labels_.empty() && labels_.size() != values_.size()) {
    Fail(ErrorKind::kInput, "weight labels do not match weight count");
  }
  double sum = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0)) Fail(ErrorKind::kInput, "negative or NaN weight");
    sum += v;
  }
  if (!values_.empty() && std::abs(sum - 1.0) > 1e-12) {
    Fail(ErrorKind::kInput, "weights sum to " + std::to_string(sum) +
                                ", expected 1");
  }
}

double WeightVector::Get(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return values_[i];
  }
  Fail(ErrorKind::kInput, "no weight for '" + std::string(label) + "'");
}

EigenEstimate PrincipalEigen(const ComparisonMatrix& m) {
  const int n = m.size();
  std::vector<double> v(n, 1.0 / n);
  std::vector<double> next(n);
  for (int iter = 1; iter <= kPowerIterationLimit; ++iter) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += m.at(i, j) * v[j];
      next[i] = s;
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      next[i] /= total;
      change = std::max(change, std::abs(next[i] - v[i]));
    }
    v.swap(next);
    if (change < kPowerIterationTolerance) {
      EigenEstimate out;
      // With sum(v) = 1, sum(A v) = lambda * sum(v) = lambda.
      double lambda = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) lambda += m.at(i, j) * v[j];
      }
      out.vector = std::move(v);
      out.lambda_max = lambda;
      out.iterations = iter;
      return out;
    }
  }
  Fail(ErrorKind::kNumerical,
       "power iteration did not converge for " +
           (m.id().empty() ? std::string("matrix") : "matrix '" + m.id() + "'") +
           " after " + std::to_string(kPowerIterationLimit) + " iterations");
}

WeightVector PrincipalWeights(const ComparisonMatrix& m) {
  return WeightVector(PrincipalEigen(m).vector, m.labels());
}

RandomIndexTable RandomIndexTable::Saaty() {
  return RandomIndexTable({{3, 0.58},
                           {4, 0.90},
                           {5, 1.12},
                           {6, 1.24},
                           {7, 1.32},
                           {8, 1.41},
                           {9, 1.45},
                           {10, 1.49},
                           {11, 1.51},
                           {12, 1.48},
                           {13, 1.56},
                           {14, 1.57},
                           {15, 1.59}});
}

RandomIndexTable::RandomIndexTable(std::map<int, double> values)
    : values_(std::move(values)) {
  for (const auto& [n, ri] : values_) {
    if (n < 3 || !(ri > 0.0)) {
      Fail(ErrorKind::kConfig, "random index entries need n >= 3 and RI > 0");
    }
  }
}

double RandomIndexTable::At(int n) const {
  auto it = values_.find(n);
  if (it == values_.end()) {
    Fail(ErrorKind::kDomain,
         "no random index for matrix order " + std::to_string(n));
  }
  return it->second;
}

double ConsistencyRatio(const ComparisonMatrix& m, const RandomIndexTable& ri) {
  const int n = m.size();
  if (n <= 2) return 0.0;
  const double lambda = PrincipalEigen(m).lambda_max;
  // lambda_max >= n for positive reciprocal matrices; clip rounding noise.
  const double ci = std::max(0.0, (lambda - n) / (n - 1));
  return ci / ri.At(n);
}

GateResult Gate(const ComparisonMatrix& m, double threshold,
                const RandomIndexTable& ri) {
  if (!(threshold > 0.0)) {
    Fail(ErrorKind::kConfig, "consistency threshold must be positive");
  }
  GateResult r;
  r.matrix_id = m.id();
  r.threshold = threshold;
  r.consistency_ratio = ConsistencyRatio(m, ri);
  r.passed = r.consistency_ratio < threshold;
  return r;
}

Hierarchy Hierarchy::Create(HierarchyNode root) {
  std::set<std::string> leaves;
  if (root.is_leaf()) {
    Fail(ErrorKind::kConfig, "hierarchy root must have children");
  }
  ValidateNode(root, &leaves);
  Hierarchy h;
  h.root_ = std::move(root);
  return h;
}

std::vector<std::string> Hierarchy::LeafIds() const {
  std::vector<std::string> out;
  CollectLeaves(root_, &out);
  return out;
}

Synthesis Synthesize(const Hierarchy& h, double threshold,
                     const RandomIndexTable& ri) {
  std::vector<double> values;
  Synthesis out;
  SynthesizeNode(h.root(), 1.0, threshold, ri, &values, &out.gates,
                 &out.local_weights);
  std::string failing;
  for (const GateResult& g : out.gates) {
    if (g.passed) continue;
    if (!failing.empty()) failing += ", ";
    std::ostringstream cr;
    cr << g.consistency_ratio;
    failing += "'" + g.matrix_id + "' (CR " + cr.str() + ")";
  }
  if (!failing.empty()) {
    Fail(ErrorKind::kGate, "consistency gate failed for " + failing);
  }
  out.leaf_weights = WeightVector(std::move(values), h.LeafIds());
  return out;
}

ComparisonMatrix ParseComparisonCsv(std::string_view text, std::string id) {
  std::vector<std::vector<std::string>> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!Trim(line).empty()) lines.push_back(SplitCsvLine(line));
    start = nl + 1;
  }
  const std::string name = "matrix '" + id + "'";
  if (lines.size() < 2) {
    Fail(ErrorKind::kInput, name + ": expected a header row and data rows");
  }
  std::vector<std::string> header = lines[0];
  const std::size_t n = lines.size() - 1;
  // A header with n+1 cells starts with a label-column heading.
  if (header.size() == n + 1) header.erase(header.begin());
  if (header.size() != n) {
    Fail(ErrorKind::kInput, name + ": header has " +
                                std::to_string(header.size()) +
                                " ids for " + std::to_string(n) + " rows");
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    std::vector<std::string> cells = lines[r];
    if (cells.size() == n + 1 && !ParseJudgment(cells[0])) {
      cells.erase(cells.begin());
    }
    if (cells.size() != n) {
      Fail(ErrorKind::kInput, name + ": row " + std::to_string(r) + " has " +
                                  std::to_string(cells.size()) + " cells");
    }
    std::vector<double> row;
    for (const auto& cell : cells) {
      auto v = ParseJudgment(cell);
      if (!v) {
        Fail(ErrorKind::kInput, name + ": cannot parse '" + cell + "'");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return ComparisonMatrix::Create(std::move(rows), std::move(id),
                                  std::move(header));
}

ComparisonMatrix LoadComparisonCsv(const std::string& path, std::string id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot read matrix file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseComparisonCsv(buffer.str(), std::move(id));
}

std::string ComparisonMatrixToCsv(const ComparisonMatrix& m) {
  std::string out;
  const int n = m.size();
  for (int j = 0; j < n; ++j) {
    if (j > 0) out += ',';
    out += m.labels().empty() ? "c" + std::to_string(j) : m.labels()[j];
  }
  out += '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j > 0) out += ',';
      out += FormatJudgment(m.at(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace branchloc
