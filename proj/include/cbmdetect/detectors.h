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

#ifndef CBMDETECT_DETECTORS_H_
#define CBMDETECT_DETECTORS_H_

// Adaptive CUSUM detectors for community changes.
//
// Every step follows the same order: the increment at time t uses the
// estimate sigma_hat_{t-1} held in the state (computed from samples before
// t), and only afterwards is the new sample pushed into the buffer and the
// estimate refreshed. sigma_hat_0 is the pre-change labeling.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>

#include "cbmdetect/cbm.h"
#include "cbmdetect/cdp.h"
#include "cbmdetect/ldp.h"
#include "cbmdetect/recovery.h"

namespace cbmdetect {

enum class DetectorMode { kLdp, kCdp, kLdpAdaptive };
enum class EstimatorKind { kSdp, kSpectral };

std::string ToString(DetectorMode mode);
DetectorMode ParseDetectorMode(const std::string& text);
std::string ToString(EstimatorKind kind);
EstimatorKind ParseEstimatorKind(const std::string& text);

struct DetectorConfig {
  int window = 1;  // number of recent samples summed for estimation
  EstimatorKind estimator = EstimatorKind::kSdp;
  // One solve per step, so the default is a lighter solve than SdpConfig's.
  SdpConfig sdp = StreamingSdp();

  static SdpConfig StreamingSdp() {
    SdpConfig c;
    c.grad_tol = 1e-3;
    c.restarts = 1;
    return c;
  }

  void Validate() const;
};

// Runs the configured estimator on the sum of `graphs`.
RecoveryResult EstimateLabels(std::span<const TernaryGraph> graphs,
                              const DetectorConfig& cfg, uint64_t seed);
Estimator MakeEstimator(const DetectorConfig& cfg, uint64_t seed);

struct DetectorState {
  DetectorMode mode = DetectorMode::kLdp;
  double stat = 0.0;        // S_t (LDP) or the noise-free CDP statistic
  double noisy_stat = 0.0;  // CDP: stat + Laplace noise; LDP: equals stat
  double last_increment = 0.0;
  int64_t t = 0;
  LabelVector sigma_hat;  // estimate from samples up to t (used at t+1)
  std::deque<TernaryGraph> buffer;
  // Adaptive variants: parameters fitted jointly with sigma_hat.
  double p_hat = 0.0;
  double zeta_hat = 0.0;
  int64_t degenerate_skips = 0;
  bool last_released = true;  // CDP: whether the latest release was BOTTOM

  static DetectorState Initial(DetectorMode mode, const LabelVector& pre_labels,
                               double p = 0.0, double zeta = 0.0);
};

// 2 ln((1 - zeta) / zeta): the largest change of the per-step log-ratio
// between graphs that differ in one pair.
double CdpSensitivity(double zeta);

struct StoppingRule {
  double b = 0.0;
  double b_tilde = 0.0;  // randomized threshold (CDP)
  double sensitivity = 0.0;
  // epsilon > 8 ln((1-zeta)/zeta): the ARL guarantee for the CDP detector
  // applies. Reported, not enforced.
  bool arl_guarantee_applies = false;

  static StoppingRule Ldp(double b);
  static StoppingRule Cdp(double b, double zeta, double epsilon, uint64_t seed);
};

// S_t = (S_{t-1})^+ + log p(A_t; sigma_hat_{t-1}) / p(A_t; sigma_pre) on an
// already perturbed graph, evaluated at the perturbed parameters.
DetectorState LdpStep(const DetectorState& state, const TernaryGraph& new_graph,
                      const LabelVector& pre_labels, double p_tilde,
                      double zeta_tilde, const DetectorConfig& cfg,
                      uint64_t seed);

// stat >= b (inclusive).
bool LdpStop(const DetectorState& state, const StoppingRule& rule);

enum class CdpRelease { kStability, kSubsampling };

struct CdpMechanism {
  CdpRelease kind = CdpRelease::kStability;
  StabilityOptions stability;
  SubsampleOptions subsampling;
};

// Release of labels for one raw graph under the chosen mechanism.
StabilityRelease ReleaseLabels(const TernaryGraph& graph,
                               const PrivacyBudget& budget,
                               const CdpMechanism& mechanism,
                               const DetectorConfig& cfg, uint64_t seed);

// S_t = (S_{t-1})^+ + log-ratio on the raw graph; noisy = S_t + Lap(4C/eps).
DetectorState CdpStep(const DetectorState& state, const TernaryGraph& raw_graph,
                      const LabelVector& pre_labels, double p, double zeta,
                      const PrivacyBudget& budget,
                      const CdpMechanism& mechanism, const DetectorConfig& cfg,
                      uint64_t seed);

// noisy_stat >= b_tilde.
bool CdpStop(const DetectorState& state, const StoppingRule& rule);

// b + Lap(2C / eps).
double CdpThreshold(double b, double zeta, double epsilon, uint64_t seed);

// b = ln(gamma) + ln((1 - (2C/eps)^2) / (1 - (4C/eps)^2)); nullopt unless
// eps > 4C.
std::optional<double> CdpThresholdForArl(double gamma, double zeta,
                                         double epsilon);

struct PrechangeEstimate {
  std::optional<LabelVector> labels;  // nullopt when the CDP release is BOTTOM
  LabelVector output;                 // labels, or random labels on BOTTOM
  double p_hat = 0.0;
  double zeta_hat = 0.0;
  bool degenerate = false;
};

// Perturb, estimate labels, then closed-form MLE on the perturbed graph.
PrechangeEstimate EstimatePrechangeLdp(const TernaryGraph& historical,
                                       double epsilon, uint64_t seed,
                                       const DetectorConfig& cfg = {});

// Stability release for labels; MLE on the raw graph plus Lap(1/eps) on each
// parameter, zeta clamped after the noise.
PrechangeEstimate EstimatePrechangeCdp(const TernaryGraph& historical,
                                       const PrivacyBudget& budget,
                                       uint64_t seed,
                                       const DetectorConfig& cfg = {},
                                       const StabilityOptions& stability = {});

// Adaptive CUSUM with post-change (p, zeta) fitted jointly with the labels on
// the buffered samples. A degenerate fit (no revealed edges) contributes a
// zero increment and bumps degenerate_skips.
DetectorState AdaptiveStepUnknownParams(const DetectorState& state,
                                        const TernaryGraph& new_graph,
                                        const LabelVector& pre_labels,
                                        double p_pre, double zeta_pre,
                                        const DetectorConfig& cfg,
                                        uint64_t seed);

}  // namespace cbmdetect

#endif  // CBMDETECT_DETECTORS_H_
