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

#ifndef CBMDETECT_TESTS_ORACLES_ORACLES_H_
#define CBMDETECT_TESTS_ORACLES_ORACLES_H_

// Brute-force references. These deliberately avoid the library's closed
// forms: probabilities are products over pairs, optima are full scans.

#include <functional>
#include <vector>

#include "cbmdetect/cbm.h"

namespace cbmdetect::oracle {

// All 3^{C(n,2)} ternary graphs on n nodes, in base-3 counting order.
std::vector<TernaryGraph> AllGraphs(int n);

// All 2^n label vectors (not canonicalized).
std::vector<LabelVector> AllLabels(int n);

// prod_{i<j} P(A_ij | labels) computed pair by pair.
double GraphProbability(const TernaryGraph& graph, const LabelVector& labels,
                        double p, double zeta);

// sum_A P_a(A) ln(P_a(A) / P_b(A)) over every graph.
double BruteKl(const LabelVector& labels_a, const LabelVector& labels_b,
               double p, double zeta);

// Canonical labeling maximizing sum_{i<j} A_ij s_i s_j, ties to the smallest.
LabelVector BruteMl(const TernaryGraph& graph);

// Distance to instability by scanning every graph on the same nodes:
// min over A' with a different (canonical) estimate of dist(A, A') - 1,
// capped. Needs the estimator value of every graph, precomputed in
// `estimates` indexed like AllGraphs(n).
int BruteDistance(const std::vector<TernaryGraph>& graphs,
                  const std::vector<LabelVector>& estimates, std::size_t index,
                  int cap);

// Number of differing pairs.
int PairDistance(const TernaryGraph& a, const TernaryGraph& b);

}  // namespace cbmdetect::oracle

#endif  // CBMDETECT_TESTS_ORACLES_ORACLES_H_
