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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "cbmdetect/theory.h"

namespace cbmdetect {
namespace {

// Alarms on its stop_at-th observation; never if stop_at is 0.
class CountingDetector : public StreamDetector {
 public:
  explicit CountingDetector(int stop_at) : stop_at_(stop_at) {}
  StepOutcome Observe(const TernaryGraph&, uint64_t) override {
    ++seen_;
    return {static_cast<double>(seen_), static_cast<double>(seen_),
            stop_at_ > 0 && seen_ >= stop_at_, LabelVector()};
  }

 private:
  int stop_at_;
  int seen_ = 0;
};

DetectorFactory Stub(int stop_at) {
  return [stop_at](uint64_t) { return std::make_unique<CountingDetector>(stop_at); };
}

ExperimentConfig SmallConfig(int64_t nu) {
  std::ostringstream json;
  json << R"({"n":20,"a":5,"zeta":0.1,"epsilon":1.5,"hamming":2,"b":2,)"
       << R"("estimator":"spectral","trials":40,"seed":17,"nu":)";
  if (nu == kNoChange) {
    json << "null}";
  } else {
    json << nu << "}";
  }
  return ExperimentFromJson(json.str());
}

TEST(ExperimentConfigTest, ParsesAndRejects) {
  const ExperimentConfig cfg = ExperimentFromJson(
      R"({"n":50,"a":5,"zeta":0.1,"epsilon":1.5,"hamming":2,"gamma":1000,"nu":1})");
  EXPECT_EQ(cfg.scenario.pre.size(), 50);
  EXPECT_EQ(Hamming(cfg.scenario.pre, cfg.scenario.post), 2);
  EXPECT_NEAR(cfg.detector.b, std::log(1000.0), 1e-12);
  EXPECT_NEAR(cfg.detector.budget.delta, 1.0 / 2500, 1e-15);
  EXPECT_EQ(cfg.trials, 200);
  EXPECT_EQ(cfg.EffectiveTruncation(), static_cast<int64_t>(std::ceil(50 * 1000.0)));
  EXPECT_FALSE(ExperimentFromJson(R"({"n":10,"p":0.5,"zeta":0.1,"b":1})")
                   .scenario.has_change());
  EXPECT_THROW(ExperimentFromJson(R"({"n":10,"p":0.5,"zeta":0.1,"b":1,"bogus":1})"),
               std::invalid_argument);
  EXPECT_THROW(ExperimentFromJson(R"({"n":10,"p":0.5,"zeta":0.1})"), std::invalid_argument);
  EXPECT_THROW(ExperimentFromJson(R"({"n":10,"p":0.5,"zeta":0.7,"b":1})"),
               std::invalid_argument);
  EXPECT_THROW(ExperimentFromJson("{"), std::invalid_argument);
  EXPECT_THROW(ExperimentFromJson(R"({"n":10,"p":0.5,"zeta":0.1,"b":1,"trials":0})"),
               std::invalid_argument);
}

TEST(RunDelayTrialsTest, StubStoppingAtThreeGivesDelayThree) {
  ExperimentConfig cfg = SmallConfig(1);
  const SimReport r = RunDelayTrials(cfg, Stub(3));
  EXPECT_EQ(r.mean_delay, 3.0);
  EXPECT_EQ(r.censored_fraction, 0.0);
  EXPECT_LE(r.delay_ci_lo, r.mean_delay);
  EXPECT_GE(r.delay_ci_hi, r.mean_delay);
  ASSERT_EQ(r.rows.size(), 40u);
  for (std::size_t k = 0; k < r.rows.size(); ++k) EXPECT_EQ(r.rows[k].trial, static_cast<int>(k));
}

TEST(RunDelayTrialsTest, DelayCountsFromChangePoint) {
  const SimReport r = RunDelayTrials(SmallConfig(5), Stub(7));
  EXPECT_EQ(r.mean_delay, 3.0);
  EXPECT_EQ(RunDelayTrials(SmallConfig(9), Stub(2)).mean_delay, 0.0);
  EXPECT_THROW(RunDelayTrials(SmallConfig(kNoChange), Stub(2)), std::invalid_argument);
}

TEST(RunArlTrialsTest, NeverStoppingIsFullyCensored) {
  ExperimentConfig cfg = SmallConfig(kNoChange);
  cfg.truncation = 25;
  const SimReport r = RunArlTrials(cfg, Stub(0));
  EXPECT_EQ(r.censored_fraction, 1.0);
  EXPECT_TRUE(r.arl_lower_biased);
  EXPECT_EQ(r.arl_estimate, 25.0);
  EXPECT_THROW(RunArlTrials(SmallConfig(1), Stub(0)), std::invalid_argument);
}

TEST(RunArlTrialsTest, ReproducibleAcrossParallelism) {
  ExperimentConfig cfg = SmallConfig(kNoChange);
  cfg.trials = 24;
  cfg.truncation = 60;
  cfg.parallelism = 1;
  const SimReport serial = RunArlTrials(cfg);
  cfg.parallelism = 6;
  const SimReport parallel = RunArlTrials(cfg);
  ASSERT_EQ(serial.rows.size(), parallel.rows.size());
  for (std::size_t k = 0; k < serial.rows.size(); ++k) {
    EXPECT_EQ(serial.rows[k].stop_time, parallel.rows[k].stop_time);
    EXPECT_EQ(serial.rows[k].censored, parallel.rows[k].censored);
  }
  EXPECT_EQ(serial.arl_estimate, parallel.arl_estimate);
  EXPECT_EQ(serial.censored_fraction, parallel.censored_fraction);
}

TEST(RunArlTrialsTest, ArlGrowsWithThresholdAndRespectsLowerBound) {
  double prev = 0;
  for (double b : {1.0, 2.0, 3.0}) {
    ExperimentConfig cfg = SmallConfig(kNoChange);
    cfg.detector.b = b;
    cfg.trials = 100;
    cfg.parallelism = 2;
    const SimReport r = RunArlTrials(cfg);
    EXPECT_GT(r.arl_estimate, prev) << b;
    prev = r.arl_estimate;
    if (b == 2.0) {
      EXPECT_GE(r.arl_estimate + 2 * r.arl_std_error, theory::ArlLowerLdp(b).value);
    }
    EXPECT_EQ(r.arl_lower_biased, r.censored_fraction > 0);
  }
}

TEST(RunDelayTrialsTest, SmallCaseDetectsQuickly) {
  ExperimentConfig cfg = SmallConfig(1);
  cfg.detector.b = std::log(1000.0);
  cfg.trials = 60;
  const SimReport r = RunDelayTrials(cfg);
  EXPECT_LT(r.mean_delay, 20.0);
  EXPECT_EQ(r.censored_fraction, 0.0);
}

TEST(ComparePairedDelaysTest, StubDifference) {
  // Same trials and seed required; stubs do not read the stream.
  ExperimentConfig a = SmallConfig(1);
  ExperimentConfig b = a;
  b.trials = 3;
  EXPECT_THROW(ComparePairedDelays(a, b), std::invalid_argument);
}

TEST(TrajectoryTest, CsvSchemaAndAlarmLatch) {
  ExperimentConfig cfg = SmallConfig(1);
  cfg.truncation = 15;
  const std::vector<TrajectoryPoint> pts = RunTrajectory(cfg, 0);
  ASSERT_FALSE(pts.empty());
  EXPECT_EQ(pts.front().t, 1);
  EXPECT_EQ(pts.front().stat, 0.0);
  std::ostringstream out;
  WriteTrajectoryCsv(out, pts);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "t,stat,noisy_stat,stopped,hamming_est_vs_post");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    ++rows;
  }
  EXPECT_EQ(rows, static_cast<int>(pts.size()));
}

TEST(PhaseGridTest, DimensionsAndRegimes) {
  const int n = 50;
  const double eps = std::log(static_cast<double>(n));
  const double a_star = theory::LdpBoundaryDensity(0.1, eps, n);
  const PhaseGridResult grid =
      PhaseGrid({3.0 * a_star, 5.0}, {0.1, 0.4999}, eps, n, 40, EstimatorKind::kSdp, 5);
  ASSERT_EQ(grid.success.size(), 2u);
  ASSERT_EQ(grid.success[0].size(), 2u);
  ASSERT_EQ(grid.boundary.size(), 2u);
  EXPECT_NEAR(grid.boundary[0], a_star, 1e-12);
  EXPECT_GE(grid.success[0][0], 0.9);
  EXPECT_LE(grid.success[1][1], 0.05);
  std::ostringstream csv;
  WritePhaseGridCsv(csv, grid);
  EXPECT_NE(csv.str().find("boundary"), std::string::npos);
  EXPECT_THROW(PhaseGrid({}, {0.1}, eps, n, 1, EstimatorKind::kSdp, 1), std::invalid_argument);
}

TEST(PhaseGridTest, BoundaryAgreesWithMarginRootByBisection) {
  const int n = 50;
  const double eps = 1.5;
  for (double zeta : {0.05, 0.1, 0.2, 0.3}) {
    double lo = 1e-3, hi = 1e4;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (LdpRecoveryMargin(mid, zeta, eps, n).margin > 0 ? hi : lo) = mid;
    }
    EXPECT_NEAR(theory::LdpBoundaryDensity(zeta, eps, n), hi, 1e-6) << zeta;
  }
}

TEST(RecoveryComparisonTest, ComparableAndImprovingWithBudget) {
  const auto by_n = RecoveryComparison({20, 30, 40, 50}, {1.5}, 0.8, 0.1, 50, 3);
  ASSERT_EQ(by_n.size(), 4u);
  for (const ComparisonRow& row : by_n) {
    EXPECT_LE(std::abs(row.err_sdp - row.err_spectral), 0.05) << row.n;
  }
  const auto by_eps = RecoveryComparison({50}, {0.6, 0.9, 1.2, 1.5}, 0.8, 0.1, 50, 4);
  ASSERT_EQ(by_eps.size(), 4u);
  for (std::size_t k = 1; k < by_eps.size(); ++k) {
    EXPECT_LE(by_eps[k].err_sdp, by_eps[k - 1].err_sdp + 0.02);
    EXPECT_LE(by_eps[k].err_spectral, by_eps[k - 1].err_spectral + 0.02);
  }
  EXPECT_LT(by_eps.back().err_sdp, by_eps.front().err_sdp);
  EXPECT_LT(by_eps.back().err_spectral, by_eps.front().err_spectral);
  const auto smoke = RecoveryComparison({10}, {1.0}, 0.5, 0.2, 1, 1);
  EXPECT_EQ(smoke.size(), 1u);
  std::ostringstream csv;
  WriteComparisonCsv(csv, smoke);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "n,epsilon,err_sdp,err_spectral");
}

TEST(IngestStreamTest, HeaderOnlyGivesEmptySequence) {
  std::istringstream in("n=5\nt,i,j,w\n");
  const TimedStream s = IngestStream(in);
  EXPECT_EQ(s.n, 5);
  EXPECT_TRUE(s.graphs.empty());
}

TEST(IngestStreamTest, ParsesRowsAndInfersNodeCount) {
  std::istringstream in("t,i,j,w\n3,0,4,1\n1,2,1,-1\n3,1,2,-1\n");
  const TimedStream s = IngestStream(in);
  EXPECT_EQ(s.n, 5);
  ASSERT_EQ(s.times, (std::vector<int64_t>{1, 3}));
  EXPECT_EQ(s.graphs[0].Get(1, 2), -1);
  EXPECT_EQ(s.graphs[0].EdgeCount(), 1);
  EXPECT_EQ(s.graphs[1].Get(4, 0), 1);
  EXPECT_EQ(s.graphs[1].EdgeCount(), 2);
}

TEST(IngestStreamTest, Errors) {
  auto fails_at = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      IngestStream(in);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(fails_at("n=4\n1,0,1,1\n1,2,x,1\n", "line 3"));
  EXPECT_TRUE(fails_at("1,0,1,1\n1,1,0,-1\n", "duplicate"));
  EXPECT_TRUE(fails_at("1,0,1,0\n", "line 1"));
  EXPECT_TRUE(fails_at("n=3\n1,0,3,1\n", "line 2"));
  EXPECT_TRUE(fails_at("1,0,0,1\n", "line 1"));
}

TEST(IngestStreamTest, RoundTripIsBitIdentical) {
  const ChangeScenario scenario = SmallConfig(3).scenario;
  TimedStream s;
  s.n = 20;
  for (int64_t t = 1; t <= 6; ++t) {
    s.times.push_back(t * 10);
    s.graphs.push_back(StreamGraph(scenario, 99, t));
  }
  std::stringstream buf;
  WriteStream(buf, s);
  const TimedStream back = IngestStream(buf);
  EXPECT_EQ(back.n, s.n);
  EXPECT_EQ(back.times, s.times);
  ASSERT_EQ(back.graphs.size(), s.graphs.size());
  for (std::size_t k = 0; k < s.graphs.size(); ++k) EXPECT_EQ(back.graphs[k], s.graphs[k]);
}

TEST(IngestStreamTest, FlippedCommunityFixtureRaisesStatistic) {
  // Three snapshots over 12 nodes: two communities at t=1, merged at t=2, 3.
  const int n = 12;
  const LabelVector pre = LabelVector::Balanced(n);
  const LabelVector post(std::vector<int8_t>(n, 1));
  std::ostringstream text;
  text << "n=" << n << "\nt,i,j,w\n";
  for (int t = 1; t <= 3; ++t) {
    const LabelVector& labels = t == 1 ? pre : post;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        text << t << ',' << i << ',' << j << ',' << labels[i] * labels[j] << '\n';
      }
    }
  }
  std::istringstream in(text.str());
  const TimedStream stream = IngestStream(in);
  ASSERT_EQ(stream.graphs.size(), 3u);

  DetectorSpec spec;
  spec.b = 100.0;
  spec.budget.epsilon = 2.0;
  const CbmParams params{n, 0.9, 0.05, std::nullopt};
  const ChangeScenario scenario = ChangeScenario::Make(pre, post, 2, params, params);
  double rise = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto pts = RunOnGraphs(spec, scenario, stream.graphs, r);
    rise += pts[2].stat - std::max(pts[1].stat, 0.0);
  }
  EXPECT_GT(rise / reps, 0.0);
}

}  // namespace
}  // namespace cbmdetect
