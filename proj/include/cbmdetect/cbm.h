// Copyright 2026 The cbmdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CBMDETECT_CBM_H_
#define CBMDETECT_CBM_H_

// Censored block model: parameters, labelings, ternary graphs, the sampler,
// and the closed-form likelihood/KL/MLE expressions.
//
// Errors: malformed arguments throw std::invalid_argument; likelihoods
// evaluated at singular parameters (p in {0, 1}, zeta in {0, 1/2}) throw
// std::domain_error.

#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbmdetect {

// Clamp applied to every zeta estimate so ln((1-zeta)/zeta) stays finite.
inline constexpr double kZetaFloor = 1e-6;
inline constexpr double kZetaCeil = 0.5 - 1e-6;

inline constexpr int64_t NumPairs(int n) {
  return static_cast<int64_t>(n) * (n - 1) / 2;
}

struct CbmParams {
  int n = 0;
  double p = 0.0;
  double zeta = 0.0;
  // Density coefficient a with p = a * ln(n) / n, when the parameters were
  // built that way.
  std::optional<double> a;

  static CbmParams FromDensity(int n, double a, double zeta);

  // Checks n >= 2, 0 <= p <= 1, 0 < zeta < 1/2 and the density identity.
  // p = 0 is accepted: it is the "nothing revealed" sampler corner.
  void Validate() const;
};

// Community assignment in {-1, +1}^n.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::vector<int8_t> values);

  // "++-+" style strings.
  static LabelVector Parse(std::string_view text);
  // n/2 leading +1 entries followed by -1 entries.
  static LabelVector Balanced(int n);

  int size() const { return static_cast<int>(values_.size()); }
  int8_t operator[](int i) const { return values_[i]; }
  const int8_t* data() const { return values_.data(); }
  const std::vector<int8_t>& values() const { return values_; }

  LabelVector Flipped() const;
  // Global flip so that the first entry is +1.
  LabelVector Canonical() const;
  bool IsCanonical() const { return values_.empty() || values_[0] == 1; }
  // Copy with entry i negated.
  LabelVector WithFlip(int i) const;

  std::string ToString() const;

  friend bool operator==(const LabelVector&, const LabelVector&) = default;
  // Lexicographic with -1 < +1.
  friend auto operator<=>(const LabelVector& a, const LabelVector& b) {
    return a.values_ <=> b.values_;
  }

 private:
  std::vector<int8_t> values_;
};

// Symmetric n x n matrix over {-1, 0, +1} with zero diagonal. Only the strict
// upper triangle is stored, row by row, so row i holds entries (i, i+1..n-1)
// contiguously.
class TernaryGraph {
 public:
  TernaryGraph() = default;
  explicit TernaryGraph(int n);

  int n() const { return n_; }
  int64_t num_pairs() const { return static_cast<int64_t>(upper_.size()); }

  int8_t Get(int i, int j) const;
  void Set(int i, int j, int8_t value);

  // Packed index of the unordered pair (i, j), i != j.
  int64_t PairIndex(int i, int j) const;
  // Inverse of PairIndex for i < j.
  std::pair<int, int> PairAt(int64_t index) const;

  const int8_t* Row(int i) const { return upper_.data() + RowOffset(i); }
  std::span<const int8_t> upper() const { return upper_; }
  std::span<int8_t> mutable_upper() { return upper_; }

  // Number of nonzero pairs (E_t).
  int64_t EdgeCount() const;

  friend bool operator==(const TernaryGraph&, const TernaryGraph&) = default;

 private:
  int64_t RowOffset(int i) const {
    return static_cast<int64_t>(i) * n_ - static_cast<int64_t>(i) * (i + 1) / 2;
  }

  int n_ = 0;
  std::vector<int8_t> upper_;
};

inline constexpr int64_t kNoChange = std::numeric_limits<int64_t>::max();

struct ChangeScenario {
  LabelVector pre;
  LabelVector post;
  int64_t nu = kNoChange;  // change point; kNoChange means nu = infinity
  CbmParams params_pre;
  CbmParams params_post;

  // Canonicalizes pre, and flips post if needed so Ham(pre, post) <= n/2.
  static ChangeScenario Make(LabelVector pre, LabelVector post, int64_t nu,
                             CbmParams params_pre, CbmParams params_post);

  bool has_change() const { return nu != kNoChange; }
  const LabelVector& LabelsAt(int64_t t) const { return t < nu ? pre : post; }
  const CbmParams& ParamsAt(int64_t t) const {
    return t < nu ? params_pre : params_post;
  }
};

// Draws A ~ CBM(labels, p, zeta). Each pair (i, j) uses its own keyed uniform
// so the output does not depend on traversal order.
TernaryGraph SampleCbm(const CbmParams& params, const LabelVector& labels,
                       uint64_t seed);

// sigma^T A sigma (both triangle copies, so twice the upper-triangle sum).
int64_t QuadraticForm(const TernaryGraph& graph, const LabelVector& labels);

double LogLikelihood(const TernaryGraph& graph, const LabelVector& labels,
                     double p, double zeta);

// log p(A; num) - log p(A; den) at shared (p, zeta).
double LogLikelihoodRatio(const TernaryGraph& graph,
                          const LabelVector& labels_num,
                          const LabelVector& labels_den, double p, double zeta);

// KL(CBM(b, p, zeta) || CBM(a, p, zeta)).
double KlDivergence(const LabelVector& labels_a, const LabelVector& labels_b,
                    double p, double zeta);

// C_{a,b} = sum_{i<j} a_i a_j b_i b_j.
int64_t Correlation(const LabelVector& labels_a, const LabelVector& labels_b);

int Hamming(const LabelVector& labels_a, const LabelVector& labels_b);

// min(Ham(est, truth), Ham(-est, truth)).
int ClassificationError(const LabelVector& labels_est,
                        const LabelVector& labels_true);

struct MleEstimate {
  double p_hat = 0.0;
  double zeta_hat = 0.25;
  bool degenerate = false;  // no revealed edges
};

// p_hat = E / C(n,2), zeta_hat = 1/2 - sigma^T A sigma / (4E), zeta clamped to
// [kZetaFloor, kZetaCeil].
MleEstimate MleParams(const TernaryGraph& graph, const LabelVector& labels);

// Pooled MLE over several graphs sharing (labels, p, zeta).
MleEstimate MleParams(std::span<const TernaryGraph> graphs,
                      const LabelVector& labels);

// CSV edge list "i,j,w", one line per nonzero upper-triangle pair.
void WriteEdgeListCsv(std::ostream& out, const TernaryGraph& graph);
TernaryGraph ReadEdgeListCsv(std::istream& in, int n);

std::string ParamsToJson(const CbmParams& params);
CbmParams ParamsFromJson(std::string_view json);

}  // namespace cbmdetect

#endif  // CBMDETECT_CBM_H_
