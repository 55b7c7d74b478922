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

#include "cbmdetect/cdp.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>

#include "cbmdetect/recovery.h"

namespace cbmdetect {
namespace {

constexpr uint64_t kNoiseTag = 0x4c4150ULL;
constexpr uint64_t kBottomTag = 0x424f54ULL;

void CheckReleaseBudget(const PrivacyBudget& budget) {
  budget.Validate();
  if (!(budget.delta > 0.0)) {
    throw std::invalid_argument("stability release needs delta > 0");
  }
}

// Depth-first over sets of `remaining` further modifications on pairs with
// index >= start. Returns true once the estimator output differs from base.
bool SearchModifications(TernaryGraph& work, int64_t start, int remaining,
                         const Estimator& estimator, const LabelVector& base) {
  std::span<int8_t> upper = work.mutable_upper();
  const int64_t pairs = work.num_pairs();
  for (int64_t k = start; k + remaining <= pairs; ++k) {
    const int8_t original = upper[k];
    for (int8_t value = -1; value <= 1; ++value) {
      if (value == original) continue;
      upper[k] = value;
      const bool found =
          remaining == 1
              ? estimator(work).Canonical() != base
              : SearchModifications(work, k + 1, remaining - 1, estimator, base);
      if (found) {
        upper[k] = original;
        return true;
      }
    }
    upper[k] = original;
  }
  return false;
}

StabilityRelease Gate(double distance, const PrivacyBudget& budget,
                      LabelVector candidate, uint64_t seed) {
  StabilityRelease out;
  CounterRng rng(seed);
  CounterRng noise = rng.Split(kNoiseTag);
  out.distance = distance;
  out.noisy_distance = distance + LaplaceSample(1.0 / budget.epsilon, noise);
  out.threshold = std::log(1.0 / budget.delta) / budget.epsilon;
  out.released = out.noisy_distance > out.threshold;
  if (out.released) {
    out.output = candidate;
    out.labels = std::move(candidate);
  } else {
    out.output = RandomCanonicalLabels(candidate.size(), HashKey(seed, kBottomTag));
  }
  return out;
}

}  // namespace

double LaplaceSample(double scale, uint64_t seed) {
  CounterRng rng(seed);
  return LaplaceSample(scale, rng);
}

double LaplaceSample(double scale, CounterRng& rng) {
  if (!(scale > 0.0)) throw std::invalid_argument("Laplace scale must be > 0");
  // u uniform on (-1/2, 1/2); x = -scale * sgn(u) * ln(1 - 2|u|).
  const double u = rng.UniformOpen() - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

int DefaultInstabilityCap(int n) {
  if (n < 2) return 1;
  return std::max(1, static_cast<int>(std::ceil(std::log(static_cast<double>(n)))));
}

int DistanceToInstability(const TernaryGraph& graph, const Estimator& estimator,
                          int cap) {
  if (graph.n() > kMaxExactInstabilityNodes) {
    throw std::invalid_argument("exact distance to instability needs n <= " +
                                std::to_string(kMaxExactInstabilityNodes));
  }
  if (cap < 0) throw std::invalid_argument("cap must be >= 0");
  const LabelVector base = estimator(graph).Canonical();
  TernaryGraph work = graph;
  for (int k = 1; k <= cap; ++k) {
    if (k > work.num_pairs()) break;
    if (SearchModifications(work, 0, k, estimator, base)) return k - 1;
  }
  return cap;
}

int LocalMarginDistance(const TernaryGraph& graph, const LabelVector& labels,
                        int cap) {
  if (graph.n() != labels.size()) {
    throw std::invalid_argument("labels do not match graph");
  }
  const int n = graph.n();
  std::vector<int> signed_degree(n, 0);
  for (int i = 0; i < n; ++i) {
    const int8_t* row = graph.Row(i);
    for (int j = i + 1; j < n; ++j) {
      const int s = row[j - i - 1] * labels[i] * labels[j];
      signed_degree[i] += s;
      signed_degree[j] += s;
    }
  }
  int best = cap;
  for (int s : signed_degree) {
    // floor division for negative s as well
    const int k = s >= 0 ? s / 2 : -((-s + 1) / 2);
    best = std::min(best, k);
  }
  return std::max(best, 0);
}

StabilityRelease ReleaseByStability(const TernaryGraph& graph,
                                    const PrivacyBudget& budget,
                                    const Estimator& estimator, uint64_t seed,
                                    const StabilityOptions& options) {
  CheckReleaseBudget(budget);
  const int cap = options.cap > 0 ? options.cap : DefaultInstabilityCap(graph.n());
  const DistanceMode mode = options.mode.value_or(
      graph.n() <= kMaxExactInstabilityNodes ? DistanceMode::kExact
                                             : DistanceMode::kLocalMargin);
  LabelVector candidate = estimator(graph).Canonical();
  const int distance = mode == DistanceMode::kExact
                           ? DistanceToInstability(graph, estimator, cap)
                           : LocalMarginDistance(graph, candidate, cap);
  return Gate(distance, budget, std::move(candidate), seed);
}

SubsamplePlan PlanSubsampling(int n, const PrivacyBudget& budget) {
  CheckReleaseBudget(budget);
  if (n < 3) throw std::invalid_argument("subsampling release needs n >= 3");
  SubsamplePlan plan;
  plan.q = budget.epsilon / (32.0 * std::log(static_cast<double>(n)));
  if (plan.q >= 1.0) {
    throw std::invalid_argument("epsilon too large for n: q = eps/(32 ln n) >= 1");
  }
  const double m = std::log(n / budget.delta) / (plan.q * plan.q);
  plan.m = static_cast<int64_t>(std::ceil(m - 1e-9));
  return plan;
}

TernaryGraph SubsampleEdges(const TernaryGraph& graph, double q, uint64_t seed) {
  TernaryGraph out = graph;
  std::span<int8_t> upper = out.mutable_upper();
  const int n = graph.n();
  int64_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      if (EdgeUniform(seed, i, j) >= q) upper[k] = 0;
    }
  }
  return out;
}

SubsampleRelease ReleaseBySubsampling(const TernaryGraph& graph,
                                      const PrivacyBudget& budget,
                                      const Estimator& estimator, uint64_t seed,
                                      const SubsampleOptions& options) {
  const SubsamplePlan plan = PlanSubsampling(graph.n(), budget);
  SubsampleRelease out;
  out.q = plan.q;
  out.m_required = plan.m;
  out.m_used = std::min(plan.m, std::max<int64_t>(options.max_subsamples, 1));
  out.truncated = out.m_used < plan.m;
  if (out.truncated && options.warn_on_truncation) {
    std::fprintf(stderr,
                 "WARNING: subsampling release truncated to m=%lld of %lld "
                 "required subgraphs; the output is NOT differentially private\n",
                 static_cast<long long>(out.m_used),
                 static_cast<long long>(out.m_required));
  }

  std::map<LabelVector, int64_t> histogram;
  for (int64_t k = 0; k < out.m_used; ++k) {
    const TernaryGraph sub =
        SubsampleEdges(graph, plan.q, HashKey(seed, static_cast<uint64_t>(k), 0x535542ULL));
    ++histogram[estimator(sub).Canonical()];
  }
  // Mode: highest count, ties to the lexicographically smallest labeling
  // (std::map iterates in ascending order, so strict > keeps the first).
  const LabelVector* mode = nullptr;
  for (const auto& [labels, count] : histogram) {
    if (count > out.count_first) {
      out.count_second = out.count_first;
      out.count_first = count;
      mode = &labels;
    } else if (count > out.count_second) {
      out.count_second = count;
    }
  }
  const double d_hat =
      static_cast<double>(out.count_first - out.count_second) /
          (4.0 * static_cast<double>(out.m_used) * plan.q) -
      1.0;
  StabilityRelease gated = Gate(d_hat, budget, *mode, seed);
  static_cast<StabilityRelease&>(out) = std::move(gated);
  out.mode = *mode;
  return out;
}

}  // namespace cbmdetect
