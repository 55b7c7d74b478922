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

#include "cbmdetect/detectors.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cbmdetect/rng.h"

namespace cbmdetect {
namespace {

constexpr uint64_t kStatNoiseTag = 0x53544154ULL;
constexpr uint64_t kThresholdTag = 0x54485245ULL;
constexpr uint64_t kParamNoiseTag = 0x50415241ULL;
constexpr double kProbFloor = 1e-6;

void CheckDims(const TernaryGraph& graph, const LabelVector& labels) {
  if (graph.n() != labels.size()) {
    throw std::invalid_argument("graph has " + std::to_string(graph.n()) +
                                " nodes but labels have " +
                                std::to_string(labels.size()));
  }
}

void PushWindow(DetectorState& state, const TernaryGraph& graph, int window) {
  state.buffer.push_back(graph);
  while (static_cast<int>(state.buffer.size()) > window) {
    state.buffer.pop_front();
  }
}

std::vector<TernaryGraph> BufferCopy(const DetectorState& state) {
  return {state.buffer.begin(), state.buffer.end()};
}

double LogOdds(double zeta) { return std::log((1.0 - zeta) / zeta); }

}  // namespace

std::string ToString(DetectorMode mode) {
  switch (mode) {
    case DetectorMode::kLdp:
      return "ldp";
    case DetectorMode::kCdp:
      return "cdp";
    case DetectorMode::kLdpAdaptive:
      return "ldp-adaptive";
  }
  return "unknown";
}

DetectorMode ParseDetectorMode(const std::string& text) {
  if (text == "ldp") return DetectorMode::kLdp;
  if (text == "cdp") return DetectorMode::kCdp;
  if (text == "ldp-adaptive") return DetectorMode::kLdpAdaptive;
  throw std::invalid_argument("unknown detector mode '" + text +
                              "' (expected ldp, cdp or ldp-adaptive)");
}

std::string ToString(EstimatorKind kind) {
  return kind == EstimatorKind::kSdp ? "sdp" : "spectral";
}

EstimatorKind ParseEstimatorKind(const std::string& text) {
  if (text == "sdp") return EstimatorKind::kSdp;
  if (text == "spectral") return EstimatorKind::kSpectral;
  throw std::invalid_argument("unknown estimator '" + text +
                              "' (expected sdp or spectral)");
}

void DetectorConfig::Validate() const {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  sdp.Validate();
}

RecoveryResult EstimateLabels(std::span<const TernaryGraph> graphs,
                              const DetectorConfig& cfg, uint64_t seed) {
  if (cfg.estimator == EstimatorKind::kSpectral) {
    return SpectralEstimate(graphs, seed);
  }
  return SdpEstimate(graphs, cfg.sdp, seed);
}

Estimator MakeEstimator(const DetectorConfig& cfg, uint64_t seed) {
  return [cfg, seed](const TernaryGraph& graph) {
    return EstimateLabels(std::span<const TernaryGraph>(&graph, 1), cfg, seed)
        .labels;
  };
}

DetectorState DetectorState::Initial(DetectorMode mode,
                                     const LabelVector& pre_labels, double p,
                                     double zeta) {
  DetectorState state;
  state.mode = mode;
  state.sigma_hat = pre_labels.Canonical();
  state.p_hat = p;
  state.zeta_hat = zeta;
  return state;
}

double CdpSensitivity(double zeta) {
  if (!(zeta > 0.0 && zeta < 0.5)) {
    throw std::invalid_argument("zeta must lie in (0, 1/2)");
  }
  return 2.0 * LogOdds(zeta);
}

StoppingRule StoppingRule::Ldp(double b) {
  if (!(b > 0.0)) throw std::invalid_argument("threshold b must be > 0");
  StoppingRule rule;
  rule.b = b;
  rule.b_tilde = b;
  return rule;
}

StoppingRule StoppingRule::Cdp(double b, double zeta, double epsilon,
                               uint64_t seed) {
  StoppingRule rule = Ldp(b);
  rule.sensitivity = CdpSensitivity(zeta);
  rule.b_tilde = CdpThreshold(b, zeta, epsilon, seed);
  rule.arl_guarantee_applies = epsilon > 8.0 * LogOdds(zeta);
  return rule;
}

DetectorState LdpStep(const DetectorState& state, const TernaryGraph& new_graph,
                      const LabelVector& pre_labels, double p_tilde,
                      double zeta_tilde, const DetectorConfig& cfg,
                      uint64_t seed) {
  CheckDims(new_graph, pre_labels);
  CheckDims(new_graph, state.sigma_hat);
  DetectorState next = state;
  next.last_increment = LogLikelihoodRatio(new_graph, state.sigma_hat,
                                           pre_labels, p_tilde, zeta_tilde);
  next.stat = std::max(state.stat, 0.0) + next.last_increment;
  next.noisy_stat = next.stat;
  next.t = state.t + 1;
  PushWindow(next, new_graph, cfg.window);
  const std::vector<TernaryGraph> window = BufferCopy(next);
  next.sigma_hat = EstimateLabels(window, cfg, seed).labels;
  return next;
}

bool LdpStop(const DetectorState& state, const StoppingRule& rule) {
  return state.stat >= rule.b;
}

StabilityRelease ReleaseLabels(const TernaryGraph& graph,
                               const PrivacyBudget& budget,
                               const CdpMechanism& mechanism,
                               const DetectorConfig& cfg, uint64_t seed) {
  const Estimator estimator = MakeEstimator(cfg, HashKey(seed, 0x455354ULL));
  if (mechanism.kind == CdpRelease::kSubsampling) {
    return ReleaseBySubsampling(graph, budget, estimator, seed,
                                mechanism.subsampling);
  }
  return ReleaseByStability(graph, budget, estimator, seed,
                            mechanism.stability);
}

DetectorState CdpStep(const DetectorState& state, const TernaryGraph& raw_graph,
                      const LabelVector& pre_labels, double p, double zeta,
                      const PrivacyBudget& budget,
                      const CdpMechanism& mechanism, const DetectorConfig& cfg,
                      uint64_t seed) {
  CheckDims(raw_graph, pre_labels);
  CheckDims(raw_graph, state.sigma_hat);
  if (cfg.window != 1) {
    throw std::invalid_argument("the CDP detector releases one sample per step");
  }
  const double sensitivity = CdpSensitivity(zeta);
  DetectorState next = state;
  next.last_increment =
      LogLikelihoodRatio(raw_graph, state.sigma_hat, pre_labels, p, zeta);
  next.stat = std::max(state.stat, 0.0) + next.last_increment;
  next.noisy_stat =
      next.stat + LaplaceSample(4.0 * sensitivity / budget.epsilon,
                                HashKey(seed, kStatNoiseTag));
  next.t = state.t + 1;
  PushWindow(next, raw_graph, cfg.window);
  const StabilityRelease release =
      ReleaseLabels(raw_graph, budget, mechanism, cfg, seed);
  next.sigma_hat = release.output;
  next.last_released = release.released;
  return next;
}

bool CdpStop(const DetectorState& state, const StoppingRule& rule) {
  return state.noisy_stat >= rule.b_tilde;
}

double CdpThreshold(double b, double zeta, double epsilon, uint64_t seed) {
  if (!(b > 0.0)) throw std::invalid_argument("threshold b must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  return b + LaplaceSample(2.0 * CdpSensitivity(zeta) / epsilon,
                           HashKey(seed, kThresholdTag));
}

std::optional<double> CdpThresholdForArl(double gamma, double zeta,
                                         double epsilon) {
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must be > 1");
  const double sensitivity = CdpSensitivity(zeta);
  const double r2 = 2.0 * sensitivity / epsilon;
  const double r4 = 4.0 * sensitivity / epsilon;
  if (!(r4 < 1.0)) return std::nullopt;
  return std::log(gamma) + std::log((1.0 - r2 * r2) / (1.0 - r4 * r4));
}

PrechangeEstimate EstimatePrechangeLdp(const TernaryGraph& historical,
                                       double epsilon, uint64_t seed,
                                       const DetectorConfig& cfg) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const TernaryGraph perturbed =
      PerturbGraph(historical, epsilon, HashKey(seed, 0x50455254ULL));
  PrechangeEstimate out;
  out.output = EstimateLabels(std::span<const TernaryGraph>(&perturbed, 1),
                              cfg, HashKey(seed, 0x455354ULL))
                   .labels;
  out.labels = out.output;
  const MleEstimate mle = MleParams(perturbed, out.output);
  out.p_hat = mle.p_hat;
  out.zeta_hat = mle.zeta_hat;
  out.degenerate = mle.degenerate;
  return out;
}

PrechangeEstimate EstimatePrechangeCdp(const TernaryGraph& historical,
                                       const PrivacyBudget& budget,
                                       uint64_t seed, const DetectorConfig& cfg,
                                       const StabilityOptions& stability) {
  const StabilityRelease release = ReleaseByStability(
      historical, budget, MakeEstimator(cfg, HashKey(seed, 0x455354ULL)), seed,
      stability);
  PrechangeEstimate out;
  out.labels = release.labels;
  out.output = release.output;
  const MleEstimate mle = MleParams(historical, release.output);
  CounterRng rng(HashKey(seed, kParamNoiseTag));
  const double scale = 1.0 / budget.epsilon;
  out.p_hat = mle.p_hat + LaplaceSample(scale, rng);
  out.zeta_hat =
      std::clamp(mle.zeta_hat + LaplaceSample(scale, rng), kZetaFloor, kZetaCeil);
  out.degenerate = mle.degenerate;
  return out;
}

DetectorState AdaptiveStepUnknownParams(const DetectorState& state,
                                        const TernaryGraph& new_graph,
                                        const LabelVector& pre_labels,
                                        double p_pre, double zeta_pre,
                                        const DetectorConfig& cfg,
                                        uint64_t seed) {
  CheckDims(new_graph, pre_labels);
  CheckDims(new_graph, state.sigma_hat);
  DetectorState next = state;
  const double p_fit = std::clamp(state.p_hat, kProbFloor, 1.0 - kProbFloor);
  const double zeta_fit = std::clamp(state.zeta_hat, kZetaFloor, kZetaCeil);
  next.last_increment =
      LogLikelihood(new_graph, state.sigma_hat, p_fit, zeta_fit) -
      LogLikelihood(new_graph, pre_labels, p_pre, zeta_pre);
  next.stat = std::max(state.stat, 0.0) + next.last_increment;
  next.noisy_stat = next.stat;
  next.t = state.t + 1;
  PushWindow(next, new_graph, cfg.window);
  const std::vector<TernaryGraph> window = BufferCopy(next);
  next.sigma_hat = EstimateLabels(window, cfg, seed).labels;
  const MleEstimate mle = MleParams(window, next.sigma_hat);
  if (mle.degenerate) {
    // Keep the previous fit; the next increment falls back to zero by
    // reusing the pre-change hypothesis.
    ++next.degenerate_skips;
    next.sigma_hat = pre_labels.Canonical();
    next.p_hat = p_pre;
    next.zeta_hat = zeta_pre;
  } else {
    next.p_hat = mle.p_hat;
    next.zeta_hat = mle.zeta_hat;
  }
  return next;
}

}  // namespace cbmdetect
