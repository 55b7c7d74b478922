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

#include "cbmdetect/ldp.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cbmdetect/rng.h"

namespace cbmdetect {
namespace {

void CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be > 0, got " +
                                std::to_string(epsilon));
  }
}

// Symbols in cyclic order -1 -> 0 -> +1 -> -1.
int8_t NextSymbol(int8_t x) { return x == 1 ? -1 : static_cast<int8_t>(x + 1); }

}  // namespace

void PrivacyBudget::Validate() const {
  CheckEpsilon(epsilon);
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in [0, 1)");
  }
}

RrProbabilities RrProbabilities::ForEpsilon(double epsilon) {
  CheckEpsilon(epsilon);
  if (epsilon > kEpsilonIdentity) return {1.0, 0.0};
  // c2 = 1/(e^eps + 2) written with x = e^{-eps} so it stays finite.
  const double x = std::exp(-epsilon);
  const double flip = x / (1.0 + 2.0 * x);
  return {1.0 / (1.0 + 2.0 * x), flip};
}

TernaryGraph PerturbGraph(const TernaryGraph& graph, double epsilon,
                          uint64_t seed) {
  const RrProbabilities rr = RrProbabilities::ForEpsilon(epsilon);
  if (rr.flip == 0.0) return graph;
  TernaryGraph out(graph.n());
  std::span<const int8_t> in = graph.upper();
  std::span<int8_t> dst = out.mutable_upper();
  const int n = graph.n();
  int64_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      const double u = EdgeUniform(seed, i, j);
      const int8_t x = in[k];
      if (u < rr.keep) {
        dst[k] = x;
      } else if (u < rr.keep + rr.flip) {
        dst[k] = NextSymbol(x);
      } else {
        dst[k] = NextSymbol(NextSymbol(x));
      }
    }
  }
  return out;
}

PerturbedParams PerturbParams(double p, double zeta, double epsilon) {
  CheckEpsilon(epsilon);
  if (!(p >= 0.0 && p <= 1.0) || !(zeta > 0.0 && zeta < 0.5)) {
    throw std::invalid_argument("PerturbParams needs p in [0,1], zeta in (0,1/2)");
  }
  if (epsilon > kEpsilonIdentity) return {p, zeta};
  // p~ = (2 + p(e^eps - 1)) / (e^eps + 2) and
  // zeta~ = (1 + p zeta (e^eps - 1)) / (2 + p (e^eps - 1)), scaled by e^{-eps}.
  const double x = std::exp(-epsilon);
  const double revealed = 2.0 * x + p * (1.0 - x);
  return {revealed / (1.0 + 2.0 * x), (x + p * zeta * (1.0 - x)) / revealed};
}

RecoveryMargin LdpRecoveryMargin(double a, double zeta, double epsilon, int n) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  CheckEpsilon(epsilon);
  if (!(zeta > 0.0 && zeta < 0.5)) {
    throw std::invalid_argument("zeta must lie in (0, 1/2)");
  }
  const double nd = static_cast<double>(n);
  const double root_n = std::sqrt(nd);
  const double gap = std::sqrt(1.0 - zeta) - std::sqrt(zeta);
  RecoveryMargin m;
  m.lhs = a * gap * gap;
  // (e^eps + 1)/(e^eps - 1) = coth(eps / 2)
  m.rhs = root_n / (root_n - 1.0) / std::tanh(0.5 * epsilon);
  m.margin = m.lhs - m.rhs;
  m.density_bound = 2.0 * (nd * root_n - nd) / ((nd - 1.0) * std::log(nd));
  m.precondition_ok = a > m.density_bound;
  m.log_scale_epsilon = epsilon >= std::log(nd);
  return m;
}

}  // namespace cbmdetect
