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

#ifndef CBMDETECT_CDP_H_
#define CBMDETECT_CDP_H_

// Central-DP release of community labels: Laplace noise, distance to
// instability, the stability-gated release and its subsampling variant.

#include <cstdint>
#include <functional>
#include <optional>

#include "cbmdetect/cbm.h"
#include "cbmdetect/ldp.h"
#include "cbmdetect/rng.h"

namespace cbmdetect {

// Any non-private label estimator. Outputs are compared after
// canonicalization, i.e. up to a global flip.
using Estimator = std::function<LabelVector(const TernaryGraph&)>;

// Inverse-CDF draw from Lap(0, scale).
double LaplaceSample(double scale, uint64_t seed);
double LaplaceSample(double scale, CounterRng& rng);

inline constexpr int kMaxExactInstabilityNodes = 12;

// ceil(ln n)
int DefaultInstabilityCap(int n);

// min(d(A), cap), where d(A) is the smallest k such that some A' at most k+1
// pair modifications away has estimator(A') != estimator(A). One
// modification sets an unordered pair to either of its two other values.
// Breadth-first over modification sets; requires n <= 12.
int DistanceToInstability(const TernaryGraph& graph, const Estimator& estimator,
                          int cap);

// Surrogate for graphs too large to enumerate. With s_i = sigma_i sum_j A_ij
// sigma_j the signed degree of node i under `labels`, floor(s_i / 2) + 1
// modifications make flipping node i strictly improve sigma^T A sigma, so
// `labels` stops being a local optimum. Returns min(min_i floor(s_i/2), cap),
// floored at 0. Not a certified distance.
int LocalMarginDistance(const TernaryGraph& graph, const LabelVector& labels,
                        int cap);

enum class DistanceMode { kExact, kLocalMargin };

struct StabilityOptions {
  int cap = 0;  // 0 selects DefaultInstabilityCap(n)
  // kExact is used automatically when n <= 12 unless kLocalMargin is forced.
  std::optional<DistanceMode> mode;
};

struct StabilityRelease {
  // The released labeling, or nullopt for BOTTOM.
  std::optional<LabelVector> labels;
  // What downstream consumers use: the release, or uniformly random
  // canonical labels on BOTTOM.
  LabelVector output;
  double distance = 0.0;  // d(A), d_hat for subsampling
  double noisy_distance = 0.0;
  double threshold = 0.0;  // ln(1/delta) / epsilon
  bool released = false;
};

StabilityRelease ReleaseByStability(const TernaryGraph& graph,
                                    const PrivacyBudget& budget,
                                    const Estimator& estimator, uint64_t seed,
                                    const StabilityOptions& options = {});

struct SubsampleOptions {
  // Upper limit on m. When the prescribed m exceeds it, m is truncated and a
  // warning is printed: the run is then no longer private.
  int64_t max_subsamples = 2000;
  bool warn_on_truncation = true;
};

struct SubsampleRelease : StabilityRelease {
  double q = 0.0;               // eps / (32 ln n)
  int64_t m_required = 0;       // ceil(ln(n/delta) / q^2)
  int64_t m_used = 0;
  bool truncated = false;
  int64_t count_first = 0;
  int64_t count_second = 0;
  LabelVector mode;  // most frequent canonical labeling, before gating
};

// q and m for the subsampling mechanism.
struct SubsamplePlan {
  double q = 0.0;
  int64_t m = 0;
};
SubsamplePlan PlanSubsampling(int n, const PrivacyBudget& budget);

// Keeps each pair independently with probability q, zeroing the rest.
TernaryGraph SubsampleEdges(const TernaryGraph& graph, double q, uint64_t seed);

SubsampleRelease ReleaseBySubsampling(const TernaryGraph& graph,
                                      const PrivacyBudget& budget,
                                      const Estimator& estimator, uint64_t seed,
                                      const SubsampleOptions& options = {});

}  // namespace cbmdetect

#endif  // CBMDETECT_CDP_H_
