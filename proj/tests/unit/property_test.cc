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

// Randomized property checks driven by a small seeded generator.

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "cbmdetect/cbm.h"
#include "cbmdetect/cdp.h"
#include "cbmdetect/detectors.h"
#include "cbmdetect/ldp.h"
#include "cbmdetect/recovery.h"
#include "cbmdetect/rng.h"
#include "cbmdetect/theory.h"

namespace cbmdetect {
namespace {

constexpr int kCases = 300;

class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  int Int(int lo, int hi) {
    return lo + static_cast<int>(rng_() % static_cast<uint64_t>(hi - lo + 1));
  }
  double Real(double lo, double hi) { return lo + (hi - lo) * rng_.Uniform(); }
  double Zeta() { return Real(0.005, 0.495); }
  double Eps() { return std::exp(Real(std::log(0.05), std::log(20.0))); }

  LabelVector Labels(int n) {
    std::vector<int8_t> v(n);
    for (int8_t& x : v) x = rng_() & 1 ? 1 : -1;
    return LabelVector(std::move(v));
  }

  TernaryGraph Graph(int n) {
    TernaryGraph g(n);
    for (int64_t k = 0; k < g.num_pairs(); ++k) {
      g.mutable_upper()[k] = static_cast<int8_t>(static_cast<int>(rng_() % 3) - 1);
    }
    return g;
  }

  uint64_t Seed() { return rng_(); }

 private:
  CounterRng rng_;
};

TEST(PropertyTest, LabelCanonicalizationAndErrors) {
  Gen gen(1);
  for (int c = 0; c < kCases; ++c) {
    const int n = gen.Int(1, 40);
    const LabelVector a = gen.Labels(n), b = gen.Labels(n);
    EXPECT_TRUE(a.Canonical().IsCanonical());
    EXPECT_EQ(a.Canonical(), a.Flipped().Canonical());
    EXPECT_EQ(Hamming(a, b), Hamming(b, a));
    EXPECT_EQ(Hamming(a, b) + Hamming(a, b.Flipped()), n);
    EXPECT_EQ(ClassificationError(a, b), ClassificationError(a.Flipped(), b));
    EXPECT_LE(2 * ClassificationError(a, b), n);
    EXPECT_EQ(LabelVector::Parse(a.ToString()), a);
  }
}

TEST(PropertyTest, LikelihoodRatioAntisymmetricAndFlipInvariant) {
  Gen gen(2);
  for (int c = 0; c < kCases; ++c) {
    const int n = gen.Int(2, 25);
    const TernaryGraph g = gen.Graph(n);
    const LabelVector a = gen.Labels(n), b = gen.Labels(n);
    const double p = gen.Real(0.01, 0.99), zeta = gen.Zeta();
    const double ab = LogLikelihoodRatio(g, a, b, p, zeta);
    EXPECT_NEAR(ab, -LogLikelihoodRatio(g, b, a, p, zeta), 1e-9);
    EXPECT_NEAR(ab, LogLikelihoodRatio(g, a.Flipped(), b, p, zeta), 1e-9);
    EXPECT_EQ(LogLikelihoodRatio(g, a, a, p, zeta), 0.0);
    EXPECT_NEAR(ab, LogLikelihood(g, a, p, zeta) - LogLikelihood(g, b, p, zeta),
                1e-8 * (1 + std::abs(ab)));
    EXPECT_LE(LogLikelihood(g, a, p, zeta), 0.0);
  }
}

TEST(PropertyTest, DivergenceNonnegativeSymmetricAndZeroOnEqual) {
  Gen gen(3);
  for (int c = 0; c < kCases; ++c) {
    const int n = gen.Int(2, 60);
    const LabelVector a = gen.Labels(n), b = gen.Labels(n);
    const double p = gen.Real(0.0, 1.0), zeta = gen.Zeta();
    const double kl = KlDivergence(a, b, p, zeta);
    EXPECT_GE(kl, 0.0);
    EXPECT_NEAR(kl, KlDivergence(b, a, p, zeta), 1e-9 * (1 + kl));
    EXPECT_EQ(KlDivergence(a, a.Flipped(), p, zeta), 0.0);
  }
}

TEST(PropertyTest, PerturbedParamsStayInRange) {
  Gen gen(4);
  for (int c = 0; c < kCases; ++c) {
    const double p = gen.Real(0.0, 1.0), zeta = gen.Zeta(), eps = gen.Eps();
    const PerturbedParams t = PerturbParams(p, zeta, eps);
    // Randomized response pulls the reveal rate toward the uniform value 2/3.
    EXPECT_GE(t.p, std::min(p, 2.0 / 3.0) - 1e-12);
    EXPECT_LE(t.p, std::max(p, 2.0 / 3.0) + 1e-12);
    EXPECT_GE(t.zeta, zeta - 1e-12);
    EXPECT_LE(t.zeta, 0.5);
    const RrProbabilities rr = RrProbabilities::ForEpsilon(eps);
    EXPECT_NEAR(rr.keep + 2 * rr.flip, 1.0, 1e-12);
  }
}

TEST(PropertyTest, EdgeListRoundTrip) {
  Gen gen(5);
  for (int c = 0; c < 100; ++c) {
    const int n = gen.Int(2, 30);
    const TernaryGraph g = gen.Graph(n);
    std::stringstream buf;
    WriteEdgeListCsv(buf, g);
    EXPECT_EQ(ReadEdgeListCsv(buf, n), g);
  }
}

TEST(PropertyTest, MleStaysClampedAndConsistent) {
  Gen gen(6);
  for (int c = 0; c < kCases; ++c) {
    const int n = gen.Int(2, 30);
    const TernaryGraph g = gen.Graph(n);
    const LabelVector l = gen.Labels(n);
    const MleEstimate m = MleParams(g, l);
    EXPECT_GE(m.zeta_hat, kZetaFloor);
    EXPECT_LE(m.zeta_hat, kZetaCeil);
    EXPECT_NEAR(m.p_hat, static_cast<double>(g.EdgeCount()) / g.num_pairs(), 1e-15);
    EXPECT_EQ(m.degenerate, g.EdgeCount() == 0);
  }
}

TEST(PropertyTest, EstimatorsReturnCanonicalLabelsWithConsistentObjective) {
  Gen gen(7);
  for (int c = 0; c < 60; ++c) {
    const int n = gen.Int(2, 24);
    const std::vector<TernaryGraph> graphs{gen.Graph(n), gen.Graph(n)};
    const DenseMatrix m = DenseMatrix::FromGraphs(graphs);
    SdpConfig cfg;
    cfg.restarts = 1;
    for (const RecoveryResult& r :
         {SdpEstimate(graphs, cfg, gen.Seed()), SpectralEstimate(graphs, gen.Seed())}) {
      EXPECT_TRUE(r.labels.IsCanonical());
      EXPECT_EQ(r.labels.size(), n);
      EXPECT_NEAR(r.objective, LabelObjective(m, r.labels), 1e-9);
    }
    if (n <= 10) {
      const LabelVector ml = MlExhaustive(graphs[0]);
      const DenseMatrix m0 = DenseMatrix::FromGraphs(std::span(graphs.data(), 1));
      const LabelVector other = gen.Labels(n);
      EXPECT_GE(LabelObjective(m0, ml), LabelObjective(m0, other));
    }
  }
}

TEST(PropertyTest, LocalMarginDistanceBounded) {
  Gen gen(8);
  for (int c = 0; c < kCases; ++c) {
    const int n = gen.Int(2, 40);
    const int cap = gen.Int(0, 8);
    const int d = LocalMarginDistance(gen.Graph(n), gen.Labels(n), cap);
    EXPECT_GE(d, 0);
    EXPECT_LE(d, cap);
  }
}

TEST(PropertyTest, StabilityGateInvariant) {
  Gen gen(9);
  const Estimator ml = [](const TernaryGraph& g) { return MlExhaustive(g); };
  for (int c = 0; c < 150; ++c) {
    const int n = gen.Int(2, 6);
    const PrivacyBudget budget{gen.Eps(), gen.Real(1e-6, 0.5)};
    StabilityOptions opts;
    opts.cap = gen.Int(1, 2);
    const StabilityRelease r = ReleaseByStability(gen.Graph(n), budget, ml, gen.Seed(), opts);
    EXPECT_EQ(r.released, r.noisy_distance > r.threshold);
    EXPECT_NEAR(r.threshold, std::log(1 / budget.delta) / budget.epsilon, 1e-12);
    EXPECT_TRUE(r.output.IsCanonical());
  }
}

TEST(PropertyTest, LdpRecursionIdentityOnRandomStreams) {
  Gen gen(10);
  for (int c = 0; c < 40; ++c) {
    const int n = gen.Int(4, 16);
    const LabelVector pre = gen.Labels(n).Canonical();
    const double p = gen.Real(0.05, 0.95), zeta = gen.Zeta();
    DetectorConfig cfg;
    cfg.window = gen.Int(1, 3);
    cfg.estimator = gen.Int(0, 1) ? EstimatorKind::kSdp : EstimatorKind::kSpectral;
    DetectorState s = DetectorState::Initial(DetectorMode::kLdp, pre);
    for (int t = 1; t <= 8; ++t) {
      const TernaryGraph g = gen.Graph(n);
      const DetectorState next = LdpStep(s, g, pre, p, zeta, cfg, gen.Seed());
      EXPECT_DOUBLE_EQ(next.stat, std::max(s.stat, 0.0) +
                                      LogLikelihoodRatio(g, s.sigma_hat, pre, p, zeta));
      EXPECT_LE(static_cast<int>(next.buffer.size()), cfg.window);
      s = next;
    }
  }
}

TEST(PropertyTest, InformationOrderingOnRandomInputs) {
  Gen gen(11);
  for (int c = 0; c < kCases; ++c) {
    const int n = gen.Int(2, 80);
    const LabelVector a = gen.Labels(n), b = gen.Labels(n);
    const double p = gen.Real(0.0, 1.0), zeta = gen.Zeta(), eps = gen.Eps();
    const theory::InfoNumbers info = theory::ComputeInfoNumbers(a, b, p, zeta, eps);
    EXPECT_GE(info.i0_tilde, 0.0);
    EXPECT_LE(info.i0_tilde, info.i0 * (1 + 1e-12) + 1e-15);
    EXPECT_GE(theory::LdpKlUpper(a, b, p, zeta, eps).value * (1 + 1e-12) + 1e-15,
              info.i0_tilde);
  }
}

}  // namespace
}  // namespace cbmdetect
