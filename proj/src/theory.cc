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

#include "cbmdetect/theory.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "cbmdetect/ldp.h"

namespace cbmdetect::theory {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// C(n,2) - C_{pre,post} = sum_{i<j} (1 - c_i c_j) with c = pre * post. A pair
// contributes 2 exactly when one endpoint is mismatched, so the sum is
// 2 m (n - m) for m mismatches.
double DisagreementMass(const LabelVector& pre, const LabelVector& post) {
  if (pre.size() != post.size()) {
    throw std::invalid_argument("label vectors differ in length");
  }
  const int n = pre.size();
  int mismatched = 0;
  for (int i = 0; i < n; ++i) mismatched += pre[i] != post[i];
  return 2.0 * mismatched * (n - mismatched);
}

double PairKl(double p, double zeta, double mass) {
  if (p == 0.0 || mass == 0.0) return 0.0;
  return 0.5 * std::log((1.0 - zeta) / zeta) * p * (1.0 - 2.0 * zeta) * mass;
}

void CheckZeta(double zeta) {
  if (!(zeta > 0.0 && zeta < 0.5)) {
    throw std::invalid_argument("zeta must lie in (0, 1/2)");
  }
}

void CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
}

double Sensitivity(double zeta) { return 2.0 * std::log((1.0 - zeta) / zeta); }

}  // namespace

std::string ToJson(const BoundReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  if (std::isfinite(report.value)) {
    j["value"] = report.value;
  } else {
    j["value"] = nullptr;
  }
  j["inputs"] = report.inputs;
  j["flag"] = report.flag;
  return j.dump();
}

std::string ToJson(const std::vector<BoundReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BoundReport& r : reports) {
    arr.push_back(nlohmann::json::parse(ToJson(r)));
  }
  return arr.dump();
}

InfoNumbers ComputeInfoNumbers(const LabelVector& pre, const LabelVector& post,
                               double p, double zeta,
                               std::optional<double> epsilon) {
  CheckZeta(zeta);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
  const double mass = DisagreementMass(pre, post);
  InfoNumbers out;
  out.i0 = PairKl(p, zeta, mass);
  if (epsilon.has_value()) {
    const PerturbedParams tilde = PerturbParams(p, zeta, *epsilon);
    out.i0_tilde = PairKl(tilde.p, tilde.zeta, mass);
  } else {
    out.i0_tilde = out.i0;
  }
  return out;
}

BoundReport WaddPrediction(double gamma, double info) {
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must be > 1");
  BoundReport r{"wadd_prediction", 0.0, {{"gamma", gamma}, {"info", info}}, ""};
  if (!(info > 0.0)) {
    r.value = kInf;
    r.flag = "zero information: delay unbounded";
  } else {
    r.value = std::log(gamma) / info;
  }
  return r;
}

BoundReport ArlLowerLdp(double b) {
  if (!(b > 0.0)) throw std::invalid_argument("b must be > 0");
  return {"arl_lower_ldp", std::exp(b), {{"b", b}}, ""};
}

BoundReport CdpArlFactor(double zeta, double epsilon) {
  CheckZeta(zeta);
  CheckEpsilon(epsilon);
  const double c = Sensitivity(zeta);
  BoundReport r{"cdp_arl_factor", 0.0,
                {{"zeta", zeta}, {"epsilon", epsilon}, {"C", c}}, ""};
  const double r2 = 2.0 * c / epsilon;
  const double r4 = 4.0 * c / epsilon;
  if (!(r4 < 1.0)) {
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.flag = "infeasible: epsilon must exceed 4C";
    return r;
  }
  r.value = (1.0 - r4 * r4) / (1.0 - r2 * r2);
  return r;
}

BoundReport ArlLowerCdp(double b, double zeta, double epsilon) {
  if (!(b > 0.0)) throw std::invalid_argument("b must be > 0");
  BoundReport factor = CdpArlFactor(zeta, epsilon);
  BoundReport r{"arl_lower_cdp", 0.0, factor.inputs, factor.flag};
  r.inputs["b"] = b;
  r.inputs["factor"] = factor.value;
  r.value = r.ok() ? factor.value * std::exp(b)
                   : std::numeric_limits<double>::quiet_NaN();
  return r;
}

BoundReport ConverseEpsilonLower(int n, double a, double zeta) {
  if (n <= 8) throw std::invalid_argument("converse bound needs n >= 9");
  CheckZeta(zeta);
  const double nd = n;
  const double p = a * std::log(nd) / nd;
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("a ln(n)/n must lie in (0, 1]");
  }
  const double p_prime =
      2.0 * p * p * zeta * (zeta - 1.0) - (p - 1.0) * (p - 1.0) + 1.0;
  BoundReport r{"converse_epsilon_lower", 0.0,
                {{"n", nd}, {"a", a}, {"zeta", zeta}, {"p_prime", p_prime}},
                ""};
  const double ratio =
      (2.0 * std::log(nd) - std::log(8.0) - 1.0) / (p_prime * (4.0 * nd - 32.0));
  r.value = 0.5 * std::log1p(ratio);
  if (!std::isfinite(r.value)) r.flag = "non-finite bound";
  return r;
}

BoundReport LdpKlUpper(const LabelVector& pre, const LabelVector& post,
                       double p, double zeta, double epsilon) {
  CheckZeta(zeta);
  CheckEpsilon(epsilon);
  const double c_eps = std::min(4.0, std::exp(2.0 * epsilon));
  const double em1 = std::expm1(epsilon);
  const double mass = DisagreementMass(pre, post);
  BoundReport r{"ldp_kl_upper", 0.0,
                {{"p", p}, {"zeta", zeta}, {"epsilon", epsilon}}, ""};
  r.value = c_eps * em1 * em1 * p * p * (1.0 - 2.0 * zeta) *
            (1.0 - 2.0 * zeta) * mass;
  if (!std::isfinite(r.value)) r.flag = "overflow";
  return r;
}

BoundReport CdpDelayLower(double gamma, double epsilon, double delta, int n,
                          double kl, double alpha0) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be > 0");
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must be > 1");
  CheckEpsilon(epsilon);
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  BoundReport r{"cdp_delay_lower", 0.0,
                {{"gamma", gamma},
                 {"epsilon", epsilon},
                 {"delta", delta},
                 {"n", static_cast<double>(n)},
                 {"kl", kl},
                 {"alpha0", alpha0}},
                ""};
  // log(R eps) with R = 2^{C(n,2)}.
  const double log_r_eps =
      static_cast<double>(NumPairs(n)) * std::log(2.0) + std::log(epsilon);
  double ratio = 1.0;
  if (log_r_eps <= std::log(40.0)) {
    ratio = std::tanh(0.5 * std::exp(log_r_eps));
  }
  const double delta_term = 1.0 + 2.0 * delta / std::expm1(epsilon);
  r.inputs["ratio"] = ratio;
  const double denom = ratio * ratio * delta_term * delta_term * kl / alpha0;
  if (!(denom > 0.0)) {
    r.value = kInf;
    r.flag = "zero information: delay unbounded";
    return r;
  }
  r.value = std::log(gamma) / denom;
  return r;
}

BoundReport MinWindow(int n, double epsilon) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  CheckEpsilon(epsilon);
  const double inv_n = 1.0 / n;
  const double c1 = 1.0 - inv_n;
  const double shrink = 1.0 - 2.0 * inv_n;
  BoundReport r{"min_window", 0.0,
                {{"n", static_cast<double>(n)}, {"epsilon", epsilon}}, ""};
  // e^eps / (e^eps - 1) = 1 / (1 - e^{-eps})
  const double privacy_term = c1 / -std::expm1(-epsilon);
  r.inputs["privacy_term"] = privacy_term;
  if (shrink == 0.0) {
    r.value = kInf;
    r.flag = "degenerate constant at n = 2";
    return r;
  }
  const double c2 = 4.0 * c1 / (shrink * shrink);
  const double log_term = c2 * std::log(static_cast<double>(n));
  r.inputs["log_term"] = log_term;
  r.value = std::max(privacy_term, log_term);
  return r;
}

std::vector<BoundReport> RecoveryThresholds(double a, double zeta,
                                            double epsilon, int n) {
  CheckZeta(zeta);
  CheckEpsilon(epsilon);
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  const double gap = std::sqrt(1.0 - zeta) - std::sqrt(zeta);
  const double signal = a * gap * gap;
  std::vector<BoundReport> out;

  BoundReport stability{"stability_margin", signal - 1.0,
                        {{"a", a},
                         {"zeta", zeta},
                         {"epsilon", epsilon},
                         {"lhs", signal},
                         {"rhs", 1.0},
                         {"side_condition_rhs", 3.0 / epsilon}},
                        ""};
  if (!(a > 3.0 / epsilon)) stability.flag = "side condition a > 3/eps fails";
  out.push_back(stability);

  const double sub_rhs =
      std::max(32.0 * std::log(static_cast<double>(n)) / epsilon, 1.0);
  out.push_back({"subsampling_margin", signal - sub_rhs,
                 {{"a", a},
                  {"zeta", zeta},
                  {"epsilon", epsilon},
                  {"n", static_cast<double>(n)},
                  {"lhs", signal},
                  {"rhs", sub_rhs}},
                 ""});

  const RecoveryMargin ldp = LdpRecoveryMargin(a, zeta, epsilon, n);
  BoundReport ldp_report{"ldp_margin", ldp.margin,
                         {{"a", a},
                          {"zeta", zeta},
                          {"epsilon", epsilon},
                          {"n", static_cast<double>(n)},
                          {"lhs", ldp.lhs},
                          {"rhs", ldp.rhs},
                          {"density_bound", ldp.density_bound}},
                         ""};
  if (!ldp.precondition_ok) ldp_report.flag = "density precondition fails";
  out.push_back(ldp_report);
  return out;
}

double LdpBoundaryDensity(double zeta, double epsilon, int n) {
  const RecoveryMargin at_zero = LdpRecoveryMargin(0.0, zeta, epsilon, n);
  const double gap = std::sqrt(1.0 - zeta) - std::sqrt(zeta);
  return at_zero.rhs / (gap * gap);
}

}  // namespace cbmdetect::theory
