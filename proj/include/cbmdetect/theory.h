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

#ifndef CBMDETECT_THEORY_H_
#define CBMDETECT_THEORY_H_

// Closed-form thresholds, information numbers and bounds. Every function is
// pure. Values that cannot be evaluated (infeasible regimes, zero
// information) come back with a non-empty `flag` instead of throwing, except
// for inputs outside the documented domain.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbmdetect/cbm.h"

namespace cbmdetect::theory {

struct BoundReport {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> inputs;
  std::string flag;  // empty when value is finite and meaningful

  bool ok() const { return flag.empty(); }
};

std::string ToJson(const BoundReport& report);
std::string ToJson(const std::vector<BoundReport>& reports);

struct InfoNumbers {
  double i0 = 0.0;        // KL between post- and pre-change raw graphs
  double i0_tilde = 0.0;  // same after randomized response at epsilon
};

// KL per step, 1/2 ln((1-zeta)/zeta) p (1-2 zeta) (C(n,2) - C_{pre,post}).
InfoNumbers ComputeInfoNumbers(const LabelVector& pre, const LabelVector& post,
                               double p, double zeta,
                               std::optional<double> epsilon = std::nullopt);

// ln(gamma) / info.
BoundReport WaddPrediction(double gamma, double info);

// e^b.
BoundReport ArlLowerLdp(double b);
// e^b (1 - (4C/eps)^2) / (1 - (2C/eps)^2), C = 2 ln((1-zeta)/zeta).
BoundReport ArlLowerCdp(double b, double zeta, double epsilon);
// The multiplicative factor above; flagged unless eps > 4C.
BoundReport CdpArlFactor(double zeta, double epsilon);

// Smallest epsilon any edge-LDP mechanism needs for exact recovery at
// density a ln(n)/n. Requires n >= 9.
BoundReport ConverseEpsilonLower(int n, double a, double zeta);

// min{4, e^{2 eps}} (e^eps - 1)^2 p^2 (1 - 2 zeta)^2 (C(n,2) - C_{pre,post}).
BoundReport LdpKlUpper(const LabelVector& pre, const LabelVector& post,
                       double p, double zeta, double epsilon);

// Delay lower bound for any (eps, delta)-CDP detector; R = 2^{C(n,2)} is
// handled in log space.
BoundReport CdpDelayLower(double gamma, double epsilon, double delta, int n,
                          double kl, double alpha0);

// Number of graphs needed for recovery under LDP,
// max{c1 e^eps/(e^eps-1), c2 ln n} with c1 = 1 - 1/n and
// c2 = 4 (1 - 1/n) / (1 - 2/n)^2.
BoundReport MinWindow(int n, double epsilon);

// Margins for the stability, subsampling and LDP recovery conditions.
std::vector<BoundReport> RecoveryThresholds(double a, double zeta,
                                            double epsilon, int n);

// Density a at which the LDP recovery margin crosses zero.
double LdpBoundaryDensity(double zeta, double epsilon, int n);

}  // namespace cbmdetect::theory

#endif  // CBMDETECT_THEORY_H_
