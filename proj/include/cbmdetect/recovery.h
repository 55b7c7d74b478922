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

#ifndef CBMDETECT_RECOVERY_H_
#define CBMDETECT_RECOVERY_H_

// Community recovery from one or more ternary graphs.
//
// SdpEstimate solves the relaxation  max tr(M Y)  s.t.  Y psd, Y_ii = 1
// with M the sum of the adjacency matrices, using a rank-r factorization
// Y = V V^T (rows of V on the unit sphere) and projected gradient ascent.
// The solution is rounded by the sign of the top eigenvector of V V^T.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cbmdetect/cbm.h"

namespace cbmdetect {

// Dense row-major n x n matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n) {}

  // M = sum_t A_t.
  static DenseMatrix FromGraphs(std::span<const TernaryGraph> graphs);

  int n() const { return n_; }
  double operator()(int i, int j) const { return data_[Index(i, j)]; }
  double& operator()(int i, int j) { return data_[Index(i, j)]; }
  const double* data() const { return data_.data(); }

  bool IsZero() const;
  // max_i sum_j |m_ij|, an upper bound on the spectral radius.
  double MaxAbsRowSum() const;

 private:
  std::size_t Index(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }

  int n_ = 0;
  std::vector<double> data_;
};

enum class StepRule { kFixed, kBacktracking };
enum class SolverStatus { kConverged, kMaxIters, kDegenerate };

std::string ToString(SolverStatus status);

struct SdpConfig {
  // Factorization rank; 0 selects ceil(sqrt(2n)).
  int rank = 0;
  int max_iters = 500;
  // Stop when the Riemannian gradient norm, relative to ||M||_1 sqrt(n),
  // falls below this.
  double grad_tol = 1e-4;
  StepRule step_rule = StepRule::kBacktracking;
  int restarts = 2;

  void Validate() const;
  int RankFor(int n) const;
};

struct RecoveryResult {
  LabelVector labels;     // canonical
  double objective = 0.0;  // labels^T M labels
  SolverStatus status = SolverStatus::kConverged;
  int iterations = 0;
  // Relaxation value tr(M V V^T) of the chosen restart (SDP only).
  double relaxed_objective = 0.0;
};

// Optional per-iteration record of the factorized objective.
struct SdpTrace {
  std::vector<double> objective;
};

RecoveryResult SdpEstimate(std::span<const TernaryGraph> graphs,
                           const SdpConfig& cfg, uint64_t seed,
                           SdpTrace* trace = nullptr);
RecoveryResult SdpEstimate(const DenseMatrix& m, const SdpConfig& cfg,
                           uint64_t seed, SdpTrace* trace = nullptr);

// Sign of the leading eigenvector of M (power iteration on M + ||M||_1 I).
// A zero M yields random canonical labels with kDegenerate status.
RecoveryResult SpectralEstimate(std::span<const TernaryGraph> graphs,
                                uint64_t seed = 0);
RecoveryResult SpectralEstimate(const DenseMatrix& m, uint64_t seed = 0);

inline constexpr int kMaxExhaustiveNodes = 16;

// argmax sigma^T A sigma over canonical labelings; ties go to the
// lexicographically smallest labeling.
LabelVector MlExhaustive(const TernaryGraph& graph);

double LabelObjective(const DenseMatrix& m, const LabelVector& labels);

// Uniform over canonical labelings.
LabelVector RandomCanonicalLabels(int n, uint64_t seed);

}  // namespace cbmdetect

#endif  // CBMDETECT_RECOVERY_H_
