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

#ifndef CBMDETECT_HARNESS_H_
#define CBMDETECT_HARNESS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cbmdetect/cbm.h"
#include "cbmdetect/detectors.h"

namespace cbmdetect {

// One stream under test. Observe() consumes the raw graph at the next time
// index and reports the detector's view after the update.
struct StepOutcome {
  double stat = 0.0;
  double noisy_stat = 0.0;
  bool stopped = false;
  LabelVector sigma_hat;  // estimate after this step; may be empty for stubs
};

class StreamDetector {
 public:
  virtual ~StreamDetector() = default;
  virtual StepOutcome Observe(const TernaryGraph& raw, uint64_t step_seed) = 0;
};

using DetectorFactory =
    std::function<std::unique_ptr<StreamDetector>(uint64_t trial_seed)>;

struct DetectorSpec {
  DetectorMode mode = DetectorMode::kLdp;
  double b = 0.0;
  DetectorConfig cfg;
  PrivacyBudget budget;
  CdpMechanism mechanism;
};

// Detector working against the scenario's pre-change labels and parameters.
DetectorFactory MakeDetectorFactory(const DetectorSpec& spec,
                                    const ChangeScenario& scenario);

struct ExperimentConfig {
  ChangeScenario scenario;
  DetectorSpec detector;
  int trials = 200;
  int64_t truncation = 0;  // 0 selects ceil(50 e^b)
  uint64_t seed = 0;
  int parallelism = 1;

  void Validate() const;
  int64_t EffectiveTruncation() const;
};

struct TrialRow {
  int trial = 0;
  int64_t stop_time = 0;  // step index T (1-based); truncation if censored
  bool censored = false;
  double delay = 0.0;  // T - nu + 1 (delay runs only)
};

struct SimReport {
  double mean_delay = 0.0;
  double delay_ci_lo = 0.0;
  double delay_ci_hi = 0.0;
  double arl_estimate = 0.0;
  double arl_std_error = 0.0;
  double censored_fraction = 0.0;
  bool arl_lower_biased = false;  // censored runs present
  // Mean classification error of sigma_hat against the post-change labels
  // (fraction of nodes), per step, over trials still running at that step.
  std::vector<double> recovery_error_series;
  std::vector<TrialRow> rows;
};

// Raw graph at step t of a trial. Shared by every detector, so paired
// comparisons see identical streams.
TernaryGraph StreamGraph(const ChangeScenario& scenario, uint64_t trial_seed,
                         int64_t t);
uint64_t TrialSeed(uint64_t seed, int trial);

SimReport RunDelayTrials(const ExperimentConfig& cfg);
SimReport RunDelayTrials(const ExperimentConfig& cfg,
                         const DetectorFactory& factory);
SimReport RunArlTrials(const ExperimentConfig& cfg);
SimReport RunArlTrials(const ExperimentConfig& cfg,
                       const DetectorFactory& factory);

struct PairedComparison {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_diff = 0.0;  // mean(a - b)
  double diff_std_error = 0.0;
  // One-sided 95% upper bound on mean(a - b).
  double diff_upper95 = 0.0;
  SimReport report_a;
  SimReport report_b;
};

// Runs two detectors on the same per-trial streams (delay mode).
PairedComparison ComparePairedDelays(const ExperimentConfig& cfg_a,
                                     const ExperimentConfig& cfg_b);

struct TrajectoryPoint {
  int64_t t = 0;
  double stat = 0.0;
  double noisy_stat = 0.0;
  bool stopped = false;
  int hamming_est_vs_post = 0;
};

// One trial, stepped until stop or truncation.
std::vector<TrajectoryPoint> RunTrajectory(const ExperimentConfig& cfg,
                                           int trial);
// Steps a detector over given raw graphs (for example an ingested stream)
// without stopping early; `stopped` marks steps at or past the first alarm.
std::vector<TrajectoryPoint> RunOnGraphs(const DetectorSpec& spec,
                                         const ChangeScenario& scenario,
                                         const std::vector<TernaryGraph>& graphs,
                                         uint64_t seed);
void WriteTrajectoryCsv(std::ostream& out,
                        const std::vector<TrajectoryPoint>& points);

struct PhaseGridResult {
  std::vector<double> a_values;
  std::vector<double> zeta_values;
  std::vector<std::vector<double>> success;  // [a][zeta]
  std::vector<double> boundary;              // boundary density per zeta
};

PhaseGridResult PhaseGrid(const std::vector<double>& a_values,
                          const std::vector<double>& zeta_values,
                          double epsilon, int n, int trials,
                          EstimatorKind estimator, uint64_t seed,
                          const SdpConfig& sdp = {});
void WritePhaseGridCsv(std::ostream& out, const PhaseGridResult& grid);

struct ComparisonRow {
  int n = 0;
  double epsilon = 0.0;
  double err_sdp = 0.0;  // mean normalized classification error
  double err_spectral = 0.0;
};

// Perturbs CBM(p, zeta) graphs at each (n, epsilon) and compares estimators.
std::vector<ComparisonRow> RecoveryComparison(
    const std::vector<int>& n_values, const std::vector<double>& eps_values,
    double p, double zeta, int reps, uint64_t seed, const SdpConfig& sdp = {});
void WriteComparisonCsv(std::ostream& out,
                        const std::vector<ComparisonRow>& rows);

// Ternary graph stream from "t,i,j,w" rows.
struct TimedStream {
  int n = 0;
  std::vector<int64_t> times;  // ascending, distinct
  std::vector<TernaryGraph> graphs;
};

// Accepts an optional "n=<count>" first line and an optional "t,i,j,w"
// column header. Without the n line, n is one more than the largest index.
TimedStream IngestStream(std::istream& in);
TimedStream IngestStreamFile(const std::string& path);
void WriteStream(std::ostream& out, const TimedStream& stream);

// Experiment description as JSON, e.g.
//   {"n": 50, "a": 5, "zeta": 0.1, "epsilon": 1.5, "hamming": 2, "b": 6.9,
//    "mode": "ldp", "trials": 200, "nu": 1, "seed": 7}
// Throws std::invalid_argument on malformed or out-of-range fields.
ExperimentConfig ExperimentFromJson(std::string_view json);

}  // namespace cbmdetect

#endif  // CBMDETECT_HARNESS_H_
