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

#include "cbmdetect/harness.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "cbmdetect/ldp.h"
#include "cbmdetect/recovery.h"
#include "cbmdetect/rng.h"
#include "cbmdetect/theory.h"

namespace cbmdetect {
namespace {

constexpr uint64_t kGraphTag = 0x47524150ULL;
constexpr uint64_t kStepTag = 0x53544550ULL;
constexpr uint64_t kRuleTag = 0x52554c45ULL;
constexpr double kZ95 = 1.959963984540054;
constexpr double kZ95OneSided = 1.6448536269514722;

class LdpStream : public StreamDetector {
 public:
  LdpStream(const DetectorSpec& spec, const ChangeScenario& scenario)
      : spec_(spec),
        pre_(scenario.pre),
        tilde_(PerturbParams(scenario.params_pre.p, scenario.params_pre.zeta,
                             spec.budget.epsilon)),
        rule_(StoppingRule::Ldp(spec.b)) {
    state_ = DetectorState::Initial(spec.mode, pre_, tilde_.p, tilde_.zeta);
  }

  StepOutcome Observe(const TernaryGraph& raw, uint64_t step_seed) override {
    const TernaryGraph perturbed =
        PerturbGraph(raw, spec_.budget.epsilon, HashKey(step_seed, 1));
    const uint64_t est_seed = HashKey(step_seed, 2);
    if (spec_.mode == DetectorMode::kLdpAdaptive) {
      state_ = AdaptiveStepUnknownParams(state_, perturbed, pre_, tilde_.p,
                                         tilde_.zeta, spec_.cfg, est_seed);
    } else {
      state_ = LdpStep(state_, perturbed, pre_, tilde_.p, tilde_.zeta,
                       spec_.cfg, est_seed);
    }
    return {state_.stat, state_.noisy_stat, LdpStop(state_, rule_),
            state_.sigma_hat};
  }

 private:
  DetectorSpec spec_;
  LabelVector pre_;
  PerturbedParams tilde_;
  StoppingRule rule_;
  DetectorState state_;
};

class CdpStream : public StreamDetector {
 public:
  CdpStream(const DetectorSpec& spec, const ChangeScenario& scenario,
            uint64_t trial_seed)
      : spec_(spec),
        pre_(scenario.pre),
        p_(scenario.params_pre.p),
        zeta_(scenario.params_pre.zeta),
        rule_(StoppingRule::Cdp(spec.b, zeta_, spec.budget.epsilon,
                                HashKey(trial_seed, kRuleTag))) {
    state_ = DetectorState::Initial(DetectorMode::kCdp, pre_);
  }

  StepOutcome Observe(const TernaryGraph& raw, uint64_t step_seed) override {
    state_ = CdpStep(state_, raw, pre_, p_, zeta_, spec_.budget,
                     spec_.mechanism, spec_.cfg, step_seed);
    return {state_.stat, state_.noisy_stat, CdpStop(state_, rule_),
            state_.sigma_hat};
  }

 private:
  DetectorSpec spec_;
  LabelVector pre_;
  double p_;
  double zeta_;
  StoppingRule rule_;
  DetectorState state_;
};

struct TrialResult {
  TrialRow row;
  std::vector<double> errors;
};

TrialResult RunOneTrial(const ExperimentConfig& cfg,
                        const DetectorFactory& factory, int trial,
                        std::vector<TrajectoryPoint>* trajectory) {
  const uint64_t trial_seed = TrialSeed(cfg.seed, trial);
  const int64_t horizon = cfg.EffectiveTruncation();
  const ChangeScenario& sc = cfg.scenario;
  std::unique_ptr<StreamDetector> detector = factory(trial_seed);
  TrialResult result;
  result.row.trial = trial;
  result.row.stop_time = horizon;
  result.row.censored = true;
  for (int64_t t = 1; t <= horizon; ++t) {
    const TernaryGraph graph = StreamGraph(sc, trial_seed, t);
    const StepOutcome out = detector->Observe(graph, HashKey(trial_seed, t, kStepTag));
    int ham = 0;
    if (out.sigma_hat.size() == sc.post.size()) {
      ham = ClassificationError(out.sigma_hat, sc.post);
      result.errors.push_back(static_cast<double>(ham) / sc.post.size());
    }
    if (trajectory != nullptr) {
      trajectory->push_back({t, out.stat, out.noisy_stat, out.stopped, ham});
    }
    if (out.stopped) {
      result.row.stop_time = t;
      result.row.censored = false;
      break;
    }
  }
  if (sc.has_change()) {
    result.row.delay = static_cast<double>(
        std::max<int64_t>(0, result.row.stop_time - sc.nu + 1));
  }
  return result;
}

std::vector<TrialResult> RunAllTrials(const ExperimentConfig& cfg,
                                      const DetectorFactory& factory) {
  cfg.Validate();
  std::vector<TrialResult> results(cfg.trials);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int k = next++; k < cfg.trials; k = next++) {
      results[k] = RunOneTrial(cfg, factory, k, nullptr);
    }
  };
  const int threads = std::max(1, std::min(cfg.parallelism, cfg.trials));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  return results;
}

void MeanAndStdError(const std::vector<double>& xs, double* mean,
                     double* std_error) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  *mean = xs.empty() ? 0.0 : sum / xs.size();
  if (xs.size() < 2) {
    *std_error = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - *mean) * (x - *mean);
  *std_error = std::sqrt(ss / (xs.size() - 1) / xs.size());
}

SimReport Reduce(const std::vector<TrialResult>& results) {
  SimReport report;
  std::vector<double> delays;
  std::vector<double> stops;
  std::vector<double> err_sum;
  std::vector<int> err_count;
  int censored = 0;
  for (const TrialResult& r : results) {
    report.rows.push_back(r.row);
    delays.push_back(r.row.delay);
    stops.push_back(static_cast<double>(r.row.stop_time));
    censored += r.row.censored;
    if (r.errors.size() > err_sum.size()) {
      err_sum.resize(r.errors.size(), 0.0);
      err_count.resize(r.errors.size(), 0);
    }
    for (std::size_t t = 0; t < r.errors.size(); ++t) {
      err_sum[t] += r.errors[t];
      ++err_count[t];
    }
  }
  double se = 0.0;
  MeanAndStdError(delays, &report.mean_delay, &se);
  report.delay_ci_lo = report.mean_delay - kZ95 * se;
  report.delay_ci_hi = report.mean_delay + kZ95 * se;
  MeanAndStdError(stops, &report.arl_estimate, &report.arl_std_error);
  report.censored_fraction =
      results.empty() ? 0.0 : static_cast<double>(censored) / results.size();
  report.arl_lower_biased = censored > 0;
  for (std::size_t t = 0; t < err_sum.size(); ++t) {
    report.recovery_error_series.push_back(err_sum[t] / err_count[t]);
  }
  return report;
}

LabelVector RandomLabels(int n, uint64_t seed) {
  return RandomCanonicalLabels(n, seed);
}

}  // namespace

DetectorFactory MakeDetectorFactory(const DetectorSpec& spec,
                                    const ChangeScenario& scenario) {
  spec.cfg.Validate();
  spec.budget.Validate();
  if (!(spec.b > 0.0)) throw std::invalid_argument("threshold b must be > 0");
  if (spec.mode == DetectorMode::kCdp) {
    if (!(spec.budget.delta > 0.0)) {
      throw std::invalid_argument("the CDP detector needs delta > 0");
    }
    return [spec, scenario](uint64_t trial_seed) {
      return std::make_unique<CdpStream>(spec, scenario, trial_seed);
    };
  }
  return [spec, scenario](uint64_t) {
    return std::make_unique<LdpStream>(spec, scenario);
  };
}

void ExperimentConfig::Validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (truncation < 0) throw std::invalid_argument("truncation must be >= 1");
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  if (scenario.pre.size() == 0) throw std::invalid_argument("empty scenario");
}

int64_t ExperimentConfig::EffectiveTruncation() const {
  if (truncation > 0) return truncation;
  return static_cast<int64_t>(std::ceil(50.0 * std::exp(detector.b)));
}

uint64_t TrialSeed(uint64_t seed, int trial) {
  return HashKey(seed, static_cast<uint64_t>(trial));
}

TernaryGraph StreamGraph(const ChangeScenario& scenario, uint64_t trial_seed,
                         int64_t t) {
  return SampleCbm(scenario.ParamsAt(t), scenario.LabelsAt(t),
                   HashKey(trial_seed, static_cast<uint64_t>(t), kGraphTag));
}

SimReport RunDelayTrials(const ExperimentConfig& cfg) {
  return RunDelayTrials(cfg, MakeDetectorFactory(cfg.detector, cfg.scenario));
}

SimReport RunDelayTrials(const ExperimentConfig& cfg,
                         const DetectorFactory& factory) {
  if (!cfg.scenario.has_change()) {
    throw std::invalid_argument("delay trials need a finite change point");
  }
  return Reduce(RunAllTrials(cfg, factory));
}

SimReport RunArlTrials(const ExperimentConfig& cfg) {
  return RunArlTrials(cfg, MakeDetectorFactory(cfg.detector, cfg.scenario));
}

SimReport RunArlTrials(const ExperimentConfig& cfg,
                       const DetectorFactory& factory) {
  if (cfg.scenario.has_change()) {
    throw std::invalid_argument("ARL trials need a stream without change");
  }
  return Reduce(RunAllTrials(cfg, factory));
}

PairedComparison ComparePairedDelays(const ExperimentConfig& cfg_a,
                                     const ExperimentConfig& cfg_b) {
  if (cfg_a.trials != cfg_b.trials || cfg_a.seed != cfg_b.seed) {
    throw std::invalid_argument("paired runs need equal trials and seed");
  }
  PairedComparison out;
  out.report_a = RunDelayTrials(cfg_a);
  out.report_b = RunDelayTrials(cfg_b);
  std::vector<double> diffs;
  for (int k = 0; k < cfg_a.trials; ++k) {
    diffs.push_back(out.report_a.rows[k].delay - out.report_b.rows[k].delay);
  }
  out.mean_a = out.report_a.mean_delay;
  out.mean_b = out.report_b.mean_delay;
  MeanAndStdError(diffs, &out.mean_diff, &out.diff_std_error);
  out.diff_upper95 = out.mean_diff + kZ95OneSided * out.diff_std_error;
  return out;
}

std::vector<TrajectoryPoint> RunTrajectory(const ExperimentConfig& cfg,
                                           int trial) {
  cfg.Validate();
  std::vector<TrajectoryPoint> points;
  RunOneTrial(cfg, MakeDetectorFactory(cfg.detector, cfg.scenario), trial,
              &points);
  return points;
}

std::vector<TrajectoryPoint> RunOnGraphs(const DetectorSpec& spec,
                                         const ChangeScenario& scenario,
                                         const std::vector<TernaryGraph>& graphs,
                                         uint64_t seed) {
  std::unique_ptr<StreamDetector> detector =
      MakeDetectorFactory(spec, scenario)(seed);
  std::vector<TrajectoryPoint> points;
  bool alarmed = false;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const int64_t t = static_cast<int64_t>(k) + 1;
    const StepOutcome out =
        detector->Observe(graphs[k], HashKey(seed, t, kStepTag));
    alarmed = alarmed || out.stopped;
    points.push_back({t, out.stat, out.noisy_stat, alarmed,
                      ClassificationError(out.sigma_hat, scenario.post)});
  }
  return points;
}

void WriteTrajectoryCsv(std::ostream& out,
                        const std::vector<TrajectoryPoint>& points) {
  out << "t,stat,noisy_stat,stopped,hamming_est_vs_post\n";
  char buf[160];
  for (const TrajectoryPoint& p : points) {
    std::snprintf(buf, sizeof(buf), "%lld,%.10g,%.10g,%d,%d\n",
                  static_cast<long long>(p.t), p.stat, p.noisy_stat,
                  p.stopped ? 1 : 0, p.hamming_est_vs_post);
    out << buf;
  }
}

PhaseGridResult PhaseGrid(const std::vector<double>& a_values,
                          const std::vector<double>& zeta_values,
                          double epsilon, int n, int trials,
                          EstimatorKind estimator, uint64_t seed,
                          const SdpConfig& sdp) {
  if (a_values.empty() || zeta_values.empty()) {
    throw std::invalid_argument("phase grid needs nonempty a and zeta values");
  }
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  PhaseGridResult grid;
  grid.a_values = a_values;
  grid.zeta_values = zeta_values;
  for (double zeta : zeta_values) {
    grid.boundary.push_back(theory::LdpBoundaryDensity(zeta, epsilon, n));
  }
  DetectorConfig cfg;
  cfg.estimator = estimator;
  cfg.sdp = sdp;
  for (std::size_t ia = 0; ia < a_values.size(); ++ia) {
    std::vector<double> row;
    for (std::size_t iz = 0; iz < zeta_values.size(); ++iz) {
      const CbmParams params =
          CbmParams::FromDensity(n, a_values[ia], zeta_values[iz]);
      int hits = 0;
      for (int k = 0; k < trials; ++k) {
        const uint64_t cell_seed = HashKey(seed, ia, iz, k);
        const LabelVector truth = RandomLabels(n, HashKey(cell_seed, 1));
        const TernaryGraph raw = SampleCbm(params, truth, HashKey(cell_seed, 2));
        const TernaryGraph noisy =
            PerturbGraph(raw, epsilon, HashKey(cell_seed, 3));
        const LabelVector est =
            EstimateLabels(std::span<const TernaryGraph>(&noisy, 1), cfg,
                           HashKey(cell_seed, 4))
                .labels;
        hits += est.Canonical() == truth.Canonical();
      }
      row.push_back(static_cast<double>(hits) / trials);
    }
    grid.success.push_back(std::move(row));
  }
  return grid;
}

void WritePhaseGridCsv(std::ostream& out, const PhaseGridResult& grid) {
  out << "a,zeta,success,boundary_a\n";
  char buf[160];
  for (std::size_t ia = 0; ia < grid.a_values.size(); ++ia) {
    for (std::size_t iz = 0; iz < grid.zeta_values.size(); ++iz) {
      std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g\n",
                    grid.a_values[ia], grid.zeta_values[iz],
                    grid.success[ia][iz], grid.boundary[iz]);
      out << buf;
    }
  }
}

std::vector<ComparisonRow> RecoveryComparison(
    const std::vector<int>& n_values, const std::vector<double>& eps_values,
    double p, double zeta, int reps, uint64_t seed, const SdpConfig& sdp) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  std::vector<ComparisonRow> rows;
  for (int n : n_values) {
    const CbmParams params{n, p, zeta, std::nullopt};
    params.Validate();
    for (double eps : eps_values) {
      ComparisonRow row{n, eps, 0.0, 0.0};
      for (int k = 0; k < reps; ++k) {
        const uint64_t rep_seed = HashKey(seed, static_cast<uint64_t>(n),
                                          std::bit_cast<uint64_t>(eps), k);
        const LabelVector truth = RandomLabels(n, HashKey(rep_seed, 1));
        const TernaryGraph raw = SampleCbm(params, truth, HashKey(rep_seed, 2));
        const TernaryGraph noisy = PerturbGraph(raw, eps, HashKey(rep_seed, 3));
        const std::span<const TernaryGraph> one(&noisy, 1);
        const LabelVector by_sdp =
            SdpEstimate(one, sdp, HashKey(rep_seed, 4)).labels;
        const LabelVector by_spectral =
            SpectralEstimate(one, HashKey(rep_seed, 5)).labels;
        row.err_sdp += static_cast<double>(ClassificationError(by_sdp, truth)) / n;
        row.err_spectral +=
            static_cast<double>(ClassificationError(by_spectral, truth)) / n;
      }
      row.err_sdp /= reps;
      row.err_spectral /= reps;
      rows.push_back(row);
    }
  }
  return rows;
}

void WriteComparisonCsv(std::ostream& out,
                        const std::vector<ComparisonRow>& rows) {
  out << "n,epsilon,err_sdp,err_spectral\n";
  char buf[160];
  for (const ComparisonRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", r.n, r.epsilon,
                  r.err_sdp, r.err_spectral);
    out << buf;
  }
}

TimedStream IngestStream(std::istream& in) {
  TimedStream stream;
  std::string line;
  int line_no = 0;
  int declared_n = -1;
  struct Row {
    int64_t t;
    int i;
    int j;
    int8_t w;
    int line;
  };
  std::vector<Row> rows;
  bool seen_data = false;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_data && declared_n < 0 && line.rfind("n=", 0) == 0) {
      try {
        std::size_t used = 0;
        declared_n = std::stoi(line.substr(2), &used);
        if (used != line.size() - 2) fail("malformed header '" + line + "'");
      } catch (const std::logic_error&) {
        fail("malformed header '" + line + "'");
      }
      if (declared_n < 1) fail("n must be >= 1");
      continue;
    }
    if (!seen_data && line == "t,i,j,w") {
      seen_data = true;
      continue;
    }
    seen_data = true;
    std::istringstream fields(line);
    std::string cell[4];
    int count = 0;
    while (count < 5 && std::getline(fields, cell[std::min(count, 3)], ',')) {
      ++count;
    }
    if (count != 4) fail("expected 4 fields t,i,j,w, got '" + line + "'");
    long long t = 0, i = 0, j = 0, w = 0;
    try {
      std::size_t used = 0;
      t = std::stoll(cell[0], &used);
      if (used != cell[0].size()) throw std::invalid_argument("t");
      i = std::stoll(cell[1], &used);
      if (used != cell[1].size()) throw std::invalid_argument("i");
      j = std::stoll(cell[2], &used);
      if (used != cell[2].size()) throw std::invalid_argument("j");
      w = std::stoll(cell[3], &used);
      if (used != cell[3].size()) throw std::invalid_argument("w");
    } catch (const std::logic_error&) {
      fail("malformed row '" + line + "'");
    }
    if (w != 1 && w != -1) fail("weight must be -1 or +1");
    if (i < 0 || j < 0 || i == j) fail("invalid pair (" + cell[1] + "," + cell[2] + ")");
    if (i > j) std::swap(i, j);
    if (j >= (1LL << 20)) fail("node index too large");
    rows.push_back({t, static_cast<int>(i), static_cast<int>(j),
                    static_cast<int8_t>(w), line_no});
  }
  int n = declared_n;
  if (n < 0) {
    n = 0;
    for (const Row& r : rows) n = std::max(n, r.j + 1);
    n = std::max(n, 2);
  }
  stream.n = n;
  std::map<int64_t, TernaryGraph> by_time;
  for (const Row& r : rows) {
    line_no = r.line;
    if (r.j >= n) fail("node index " + std::to_string(r.j) + " >= n");
    auto [it, inserted] = by_time.try_emplace(r.t, n);
    if (it->second.Get(r.i, r.j) != 0) {
      fail("duplicate pair (" + std::to_string(r.i) + "," + std::to_string(r.j) +
           ") at t=" + std::to_string(r.t));
    }
    it->second.Set(r.i, r.j, r.w);
  }
  for (auto& [t, g] : by_time) {
    stream.times.push_back(t);
    stream.graphs.push_back(std::move(g));
  }
  return stream;
}

TimedStream IngestStreamFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  return IngestStream(in);
}

void WriteStream(std::ostream& out, const TimedStream& stream) {
  out << "n=" << stream.n << "\n";
  out << "t,i,j,w\n";
  for (std::size_t k = 0; k < stream.graphs.size(); ++k) {
    const TernaryGraph& g = stream.graphs[k];
    for (int i = 0; i < g.n(); ++i) {
      for (int j = i + 1; j < g.n(); ++j) {
        const int w = g.Get(i, j);
        if (w != 0) out << stream.times[k] << ',' << i << ',' << j << ',' << w << '\n';
      }
    }
  }
}

ExperimentConfig ExperimentFromJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  static const std::set<std::string> kKnown = {
      "n",         "p",          "a",           "zeta",      "epsilon",
      "delta",     "hamming",    "nu",          "b",         "gamma",
      "mode",      "estimator",  "window",      "trials",    "truncation",
      "seed",      "parallelism", "mechanism",  "cap",       "p_post",
      "zeta_post", "max_subsamples", "sdp_max_iters", "sdp_restarts"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.contains(key)) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  try {
    const int n = j.at("n").get<int>();
    const double zeta = j.at("zeta").get<double>();
    CbmParams pre;
    if (j.contains("a")) {
      pre = CbmParams::FromDensity(n, j["a"].get<double>(), zeta);
    } else {
      pre = CbmParams{n, j.at("p").get<double>(), zeta, std::nullopt};
    }
    pre.Validate();
    CbmParams post = pre;
    if (j.contains("p_post")) {
      post.p = j["p_post"].get<double>();
      post.a.reset();
    }
    if (j.contains("zeta_post")) post.zeta = j["zeta_post"].get<double>();
    post.Validate();

    const int hamming = j.value("hamming", 0);
    if (hamming < 0 || 2 * hamming > n) {
      throw std::invalid_argument("hamming must lie in [0, n/2]");
    }
    const LabelVector pre_labels = LabelVector::Balanced(n);
    std::vector<int8_t> post_values = pre_labels.values();
    for (int k = 0; k < hamming; ++k) post_values[n - 1 - k] *= -1;
    int64_t nu = kNoChange;
    if (j.contains("nu") && !j["nu"].is_null()) {
      nu = j["nu"].get<int64_t>();
    }

    ExperimentConfig cfg;
    cfg.scenario = ChangeScenario::Make(pre_labels, LabelVector(post_values), nu,
                                        pre, post);
    DetectorSpec& det = cfg.detector;
    det.mode = ParseDetectorMode(j.value("mode", std::string("ldp")));
    det.cfg.estimator =
        ParseEstimatorKind(j.value("estimator", std::string("sdp")));
    det.cfg.window = j.value("window", 1);
    det.cfg.sdp.max_iters = j.value("sdp_max_iters", det.cfg.sdp.max_iters);
    det.cfg.sdp.restarts = j.value("sdp_restarts", det.cfg.sdp.restarts);
    det.budget.epsilon = j.value("epsilon", 1.0);
    det.budget.delta = j.value("delta", 1.0 / (static_cast<double>(n) * n));
    if (j.contains("b") && j.contains("gamma")) {
      throw std::invalid_argument("give either b or gamma, not both");
    }
    if (j.contains("gamma")) {
      det.b = std::log(j["gamma"].get<double>());
    } else {
      det.b = j.at("b").get<double>();
    }
    const std::string mechanism = j.value("mechanism", std::string("stability"));
    if (mechanism == "stability") {
      det.mechanism.kind = CdpRelease::kStability;
    } else if (mechanism == "subsampling") {
      det.mechanism.kind = CdpRelease::kSubsampling;
    } else {
      throw std::invalid_argument("mechanism must be stability or subsampling");
    }
    det.mechanism.stability.cap = j.value("cap", 0);
    det.mechanism.subsampling.max_subsamples =
        j.value("max_subsamples", det.mechanism.subsampling.max_subsamples);
    cfg.trials = j.value("trials", 200);
    cfg.truncation = j.value("truncation", int64_t{0});
    cfg.seed = j.value("seed", uint64_t{0});
    cfg.parallelism = j.value("parallelism", 1);
    cfg.Validate();
    det.cfg.Validate();
    det.budget.Validate();
    if (!(det.b > 0.0)) throw std::invalid_argument("b must be > 0");
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config field: ") + e.what());
  }
}

}  // namespace cbmdetect
