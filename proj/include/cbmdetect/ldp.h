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

#ifndef CBMDETECT_LDP_H_
#define CBMDETECT_LDP_H_

// Ternary randomized response on graph edges (epsilon-edge LDP) and the
// parameter algebra of the perturbed model.

#include <cstdint>

#include "cbmdetect/cbm.h"

namespace cbmdetect {

// Above this epsilon, exp(epsilon) overflows a double; the mechanism becomes
// the identity.
inline constexpr double kEpsilonIdentity = 700.0;

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;

  void Validate() const;
};

// Output law of the ternary randomized response: keep the symbol with
// probability `keep`, move to each of the two other symbols with `flip`.
struct RrProbabilities {
  double keep = 1.0;
  double flip = 0.0;

  static RrProbabilities ForEpsilon(double epsilon);
};

TernaryGraph PerturbGraph(const TernaryGraph& graph, double epsilon,
                          uint64_t seed);

struct PerturbedParams {
  double p = 0.0;
  double zeta = 0.0;
};

// Parameters of the model seen after perturbing CBM(sigma, p, zeta).
PerturbedParams PerturbParams(double p, double zeta, double epsilon);

struct RecoveryMargin {
  double lhs = 0.0;     // a (sqrt(1-zeta) - sqrt(zeta))^2
  double rhs = 0.0;     // sqrt(n)/(sqrt(n)-1) * (e^eps+1)/(e^eps-1)
  double margin = 0.0;  // lhs - rhs
  double density_bound = 0.0;  // 2 (n^{3/2} - n) / ((n-1) ln n)
  bool precondition_ok = false;  // a > density_bound
  // epsilon >= ln(n): the regime in which the sufficient condition is proved.
  bool log_scale_epsilon = false;

  bool sufficient() const { return precondition_ok && margin > 0.0; }
};

// Sufficient exact-recovery condition for the SDP estimator on perturbed
// graphs. Evaluated for any epsilon > 0; the scale regime is reported rather
// than enforced.
RecoveryMargin LdpRecoveryMargin(double a, double zeta, double epsilon, int n);

}  // namespace cbmdetect

#endif  // CBMDETECT_LDP_H_
