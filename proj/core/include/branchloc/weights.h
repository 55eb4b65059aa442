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

// Pairwise-comparison weighting: principal eigenvector by power iteration,
// Saaty consistency ratio with a pass/fail gate, and hierarchical synthesis of
// leaf weights.

#ifndef BRANCHLOC_WEIGHTS_H_
#define BRANCHLOC_WEIGHTS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace branchloc {

inline constexpr int kMinMatrixDim = 2;
inline constexpr int kMaxMatrixDim = 15;
inline constexpr double kDefaultConsistencyThreshold = 0.1;

// Square reciprocal judgment matrix on the 1/9..9 scale. Immutable.
class ComparisonMatrix {
 public:
  // Throws kInput if the matrix is not square, has a dimension outside
  // [2, 15], violates reciprocity (1e-9), has a non-unit diagonal, or has an
  // entry outside [1/9, 9].
  static ComparisonMatrix Create(std::vector<std::vector<double>> rows,
                                 std::string id = {},
                                 std::vector<std::string> labels = {});

  // Builds a[i][j] = w_i / w_j. Entries must land on the 1/9..9 scale.
  static ComparisonMatrix FromWeights(std::span<const double> w,
                                      std::string id = {});

  int size() const { return n_; }
  double at(int i, int j) const { return entries_[i * n_ + j]; }
  const std::string& id() const { return id_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::vector<std::vector<double>> Rows() const;

 private:
  ComparisonMatrix() = default;

  int n_ = 0;
  std::vector<double> entries_;
  std::string id_;
  std::vector<std::string> labels_;
};

// Non-negative weights summing to one (within 1e-12).
class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(std::vector<double> values, std::vector<std::string> labels = {});

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Weight for `label`; throws kInput when absent.
  double Get(std::string_view label) const;

 private:
  std::vector<double> values_;
  std::vector<std::string> labels_;
};

struct EigenEstimate {
  std::vector<double> vector;  // normalized to sum 1
  double lambda_max = 0.0;
  int iterations = 0;
};

inline constexpr int kPowerIterationLimit = 10000;
inline constexpr double kPowerIterationTolerance = 1e-12;

// Power iteration from the uniform vector until the max-norm change between
// successive normalized iterates drops below 1e-12. Throws kNumerical after
// kPowerIterationLimit iterations.
EigenEstimate PrincipalEigen(const ComparisonMatrix& m);

WeightVector PrincipalWeights(const ComparisonMatrix& m);

// Random consistency index by matrix order.
class RandomIndexTable {
 public:
  // Saaty's table: 0.58 for n=3 through 1.49 for n=10, extended to n=15.
  static RandomIndexTable Saaty();
  explicit RandomIndexTable(std::map<int, double> values);

  // Throws kDomain when `n` has no entry.
  double At(int n) const;
  const std::map<int, double>& values() const { return values_; }

 private:
  std::map<int, double> values_;
};

// ((lambda_max - n) / (n - 1)) / RI(n); 0 for n <= 2.
double ConsistencyRatio(const ComparisonMatrix& m,
                        const RandomIndexTable& ri = RandomIndexTable::Saaty());

struct GateResult {
  std::string matrix_id;
  double consistency_ratio = 0.0;
  double threshold = kDefaultConsistencyThreshold;
  bool passed = false;
};

// Fails iff CR >= threshold.
GateResult Gate(const ComparisonMatrix& m,
                double threshold = kDefaultConsistencyThreshold,
                const RandomIndexTable& ri = RandomIndexTable::Saaty());

// Tree of weighting nodes. Leaves name criteria. A parent with two or more
// children carries one comparison matrix ordered like its children; a parent
// with one child needs none.
struct HierarchyNode {
  std::string id;
  std::optional<ComparisonMatrix> matrix;
  std::vector<HierarchyNode> children;

  bool is_leaf() const { return children.empty(); }
};

class Hierarchy {
 public:
  Hierarchy() = default;
  // Throws kConfig on duplicate leaves, a missing matrix, a dimension that
  // does not match the child count, or matrix labels that disagree with the
  // child ids.
  static Hierarchy Create(HierarchyNode root);

  const HierarchyNode& root() const { return root_; }
  // Leaf ids in depth-first order.
  std::vector<std::string> LeafIds() const;

 private:
  HierarchyNode root_;
};

struct Synthesis {
  WeightVector leaf_weights;          // labelled by leaf id, depth-first order
  std::vector<GateResult> gates;      // one per matrix, depth-first order
  std::map<std::string, WeightVector> local_weights;  // by parent id
};

// Leaf weight = product of local weights along the root-to-leaf path.
// Throws kGate naming every failing node when any matrix fails the gate.
Synthesis Synthesize(const Hierarchy& h,
                     double threshold = kDefaultConsistencyThreshold,
                     const RandomIndexTable& ri = RandomIndexTable::Saaty());

// CSV with a header row of criterion ids followed by n numeric rows. Cells
// may be decimals or fractions such as "1/3". A leading label column is
// accepted and ignored.
ComparisonMatrix ParseComparisonCsv(std::string_view text, std::string id);
ComparisonMatrix LoadComparisonCsv(const std::string& path, std::string id);
std::string ComparisonMatrixToCsv(const ComparisonMatrix& m);

}  // namespace branchloc

#endif  // BRANCHLOC_WEIGHTS_H_
