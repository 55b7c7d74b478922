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

#include "cbmdetect/recovery.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "cbmdetect/kernels.h"
#include "cbmdetect/rng.h"

namespace cbmdetect {
namespace {

constexpr int kRoundingIters = 300;
constexpr int kPowerIters = 5000;
constexpr int kMaxBacktracks = 40;

// n x r factor with rows padded to a multiple of four doubles.
struct Factor {
  int n = 0;
  int r = 0;
  std::size_t stride = 0;
  std::vector<double> v;

  Factor(int n_, int r_)
      : n(n_), r(r_), stride((static_cast<std::size_t>(r_) + 3) & ~std::size_t{3}),
        v(static_cast<std::size_t>(n_) * stride, 0.0) {}

  double* Row(int i) { return v.data() + i * stride; }
  const double* Row(int i) const { return v.data() + i * stride; }
};

void NormalizeRow(double* row, int r) {
  const auto& k = kernels::Active();
  const double norm = std::sqrt(k.dot(row, row, r));
  if (norm > 0.0) {
    for (int c = 0; c < r; ++c) row[c] /= norm;
  }
}

// out = M V; returns tr(V^T M V).
double Apply(const DenseMatrix& m, const Factor& f, Factor& out) {
  const auto& k = kernels::Active();
  k.mat_mul(m.data(), m.n(), f.v.data(), f.r, f.stride, out.v.data());
  double obj = 0.0;
  for (int i = 0; i < f.n; ++i) obj += k.dot(f.Row(i), out.Row(i), f.r);
  return obj;
}

LabelVector SignLabels(std::span<const double> x) {
  std::vector<int8_t> values(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) values[i] = x[i] < 0.0 ? -1 : 1;
  return LabelVector(std::move(values)).Canonical();
}

std::vector<double> RandomUnitVector(int n, CounterRng& rng) {
  std::vector<double> x(n);
  double norm2 = 0.0;
  for (double& xi : x) {
    xi = 2.0 * rng.Uniform() - 1.0;
    norm2 += xi * xi;
  }
  const double norm = std::sqrt(norm2);
  for (double& xi : x) xi /= norm;
  return x;
}

// Top eigenvector of V V^T by power iteration, then signs.
LabelVector RoundFactor(const Factor& f, CounterRng& rng) {
  const auto& k = kernels::Active();
  std::vector<double> x = RandomUnitVector(f.n, rng);
  std::vector<double> y(f.r);
  std::vector<double> next(f.n);
  for (int it = 0; it < kRoundingIters; ++it) {
    std::fill(y.begin(), y.end(), 0.0);
    for (int i = 0; i < f.n; ++i) k.axpy(x[i], f.Row(i), y.data(), f.r);
    double norm2 = 0.0;
    for (int i = 0; i < f.n; ++i) {
      next[i] = k.dot(f.Row(i), y.data(), f.r);
      norm2 += next[i] * next[i];
    }
    if (norm2 == 0.0) break;
    const double norm = std::sqrt(norm2);
    double delta = 0.0;
    for (int i = 0; i < f.n; ++i) {
      next[i] /= norm;
      delta = std::max(delta, std::abs(next[i] - x[i]));
    }
    x.swap(next);
    if (delta < 1e-12) break;
  }
  return SignLabels(x);
}

struct RestartResult {
  LabelVector labels;
  double objective = 0.0;
  double relaxed = 0.0;
  SolverStatus status = SolverStatus::kMaxIters;
  int iterations = 0;
};

RestartResult SolveOnce(const DenseMatrix& m, const SdpConfig& cfg, int rank,
                        CounterRng rng, SdpTrace* trace) {
  const int n = m.n();
  const double shift = std::max(m.MaxAbsRowSum(), 1.0);
  const double tol = cfg.grad_tol * shift * std::sqrt(static_cast<double>(n));

  Factor v(n, rank), g(n, rank), v_next(n, rank), g_next(n, rank);
  for (int i = 0; i < n; ++i) {
    double* row = v.Row(i);
    for (int c = 0; c < rank; ++c) row[c] = 2.0 * rng.Uniform() - 1.0;
    NormalizeRow(row, rank);
  }
  double obj = Apply(m, v, g);
  if (trace) trace->objective.push_back(obj);

  const auto& k = kernels::Active();
  std::vector<double> rgrad(static_cast<std::size_t>(n) * v.stride, 0.0);
  double step = 1.0 / shift;
  RestartResult res;
  res.status = SolverStatus::kMaxIters;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    // Tangent-space projection of the gradient, row by row.
    double gnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double* vi = v.Row(i);
      const double* gi = g.Row(i);
      double* ri = rgrad.data() + i * v.stride;
      const double radial = k.dot(gi, vi, rank);
      for (int c = 0; c < rank; ++c) ri[c] = gi[c] - radial * vi[c];
      gnorm2 += k.dot(ri, ri, rank);
    }
    if (std::sqrt(gnorm2) <= tol) {
      res.status = SolverStatus::kConverged;
      break;
    }

    bool accepted = false;
    if (cfg.step_rule == StepRule::kFixed) {
      // Ascent on the shifted objective tr(V^T (M + sI) V), which is convex,
      // so the row-normalized step never decreases the objective.
      for (int i = 0; i < n; ++i) {
        double* dst = v_next.Row(i);
        const double* vi = v.Row(i);
        const double* gi = g.Row(i);
        for (int c = 0; c < rank; ++c) dst[c] = 2.0 * vi[c] + gi[c] / shift;
        NormalizeRow(dst, rank);
      }
      const double cand = Apply(m, v_next, g_next);
      accepted = cand >= obj - 1e-12 * std::abs(obj);
      if (accepted) obj = cand;
    } else {
      for (int attempt = 0; attempt < kMaxBacktracks; ++attempt) {
        for (int i = 0; i < n; ++i) {
          double* dst = v_next.Row(i);
          const double* vi = v.Row(i);
          const double* ri = rgrad.data() + i * v.stride;
          for (int c = 0; c < rank; ++c) dst[c] = vi[c] + step * ri[c];
          NormalizeRow(dst, rank);
        }
        const double cand = Apply(m, v_next, g_next);
        if (cand >= obj + 1e-4 * step * gnorm2) {
          obj = cand;
          accepted = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
    }
    if (!accepted) {
      // No ascent direction left at working precision.
      res.status = SolverStatus::kConverged;
      break;
    }
    std::swap(v.v, v_next.v);
    std::swap(g.v, g_next.v);
    if (trace) trace->objective.push_back(obj);
  }
  res.iterations = it;
  res.relaxed = obj;
  res.labels = RoundFactor(v, rng);
  res.objective = LabelObjective(m, res.labels);
  return res;
}

}  // namespace

DenseMatrix DenseMatrix::FromGraphs(std::span<const TernaryGraph> graphs) {
  if (graphs.empty()) throw std::invalid_argument("graph list is empty");
  const int n = graphs.front().n();
  DenseMatrix m(n);
  for (const TernaryGraph& g : graphs) {
    if (g.n() != n) throw std::invalid_argument("graphs differ in node count");
    for (int i = 0; i < n; ++i) {
      const int8_t* row = g.Row(i);
      for (int j = i + 1; j < n; ++j) {
        const double w = row[j - i - 1];
        m(i, j) += w;
        m(j, i) += w;
      }
    }
  }
  return m;
}

bool DenseMatrix::IsZero() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return x == 0.0; });
}

double DenseMatrix::MaxAbsRowSum() const {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += std::abs(data_[Index(i, j)]);
    best = std::max(best, s);
  }
  return best;
}

std::string ToString(SolverStatus status) {
  switch (status) {
    case SolverStatus::kConverged:
      return "converged";
    case SolverStatus::kMaxIters:
      return "max_iters";
    case SolverStatus::kDegenerate:
      return "degenerate";
  }
  return "unknown";
}

void SdpConfig::Validate() const {
  if (rank != 0 && rank < 2) throw std::invalid_argument("SDP rank must be >= 2");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
}

int SdpConfig::RankFor(int n) const {
  int r = rank > 0 ? rank
                   : static_cast<int>(std::ceil(std::sqrt(2.0 * n) - 1e-12));
  return std::max(2, std::min(r, std::max(n, 2)));
}

double LabelObjective(const DenseMatrix& m, const LabelVector& labels) {
  if (labels.size() != m.n()) throw std::invalid_argument("labels do not match M");
  double total = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    double row = 0.0;
    for (int j = 0; j < m.n(); ++j) row += m(i, j) * labels[j];
    total += labels[i] * row;
  }
  return total;
}

LabelVector RandomCanonicalLabels(int n, uint64_t seed) {
  CounterRng rng(seed);
  std::vector<int8_t> values(n);
  for (int8_t& v : values) v = (rng() >> 63) ? 1 : -1;
  return LabelVector(std::move(values)).Canonical();
}

RecoveryResult SdpEstimate(std::span<const TernaryGraph> graphs,
                           const SdpConfig& cfg, uint64_t seed,
                           SdpTrace* trace) {
  return SdpEstimate(DenseMatrix::FromGraphs(graphs), cfg, seed, trace);
}

RecoveryResult SdpEstimate(const DenseMatrix& m, const SdpConfig& cfg,
                           uint64_t seed, SdpTrace* trace) {
  cfg.Validate();
  RecoveryResult result;
  if (m.IsZero()) {
    result.labels = RandomCanonicalLabels(m.n(), seed);
    result.status = SolverStatus::kDegenerate;
    return result;
  }
  const int rank = cfg.RankFor(m.n());
  CounterRng root(seed);
  bool have = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    RestartResult run =
        SolveOnce(m, cfg, rank, root.Split(r), r == 0 ? trace : nullptr);
    const bool better =
        !have || run.objective > result.objective ||
        (run.objective == result.objective && run.labels < result.labels);
    if (better) {
      result.labels = std::move(run.labels);
      result.objective = run.objective;
      result.status = run.status;
      result.iterations = run.iterations;
      result.relaxed_objective = run.relaxed;
      have = true;
    }
  }
  return result;
}

RecoveryResult SpectralEstimate(std::span<const TernaryGraph> graphs,
                                uint64_t seed) {
  return SpectralEstimate(DenseMatrix::FromGraphs(graphs), seed);
}

RecoveryResult SpectralEstimate(const DenseMatrix& m, uint64_t seed) {
  RecoveryResult result;
  const int n = m.n();
  if (m.IsZero()) {
    result.labels = RandomCanonicalLabels(n, seed);
    result.status = SolverStatus::kDegenerate;
    return result;
  }
  const auto& k = kernels::Active();
  const double shift = m.MaxAbsRowSum();
  CounterRng rng(seed);
  std::vector<double> x = RandomUnitVector(n, rng);
  std::vector<double> next(n);
  result.status = SolverStatus::kMaxIters;
  int it = 0;
  for (; it < kPowerIters; ++it) {
    k.mat_mul(m.data(), n, x.data(), 1, 1, next.data());
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      next[i] += shift * x[i];
      norm2 += next[i] * next[i];
    }
    const double norm = std::sqrt(norm2);
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      next[i] /= norm;
      delta = std::max(delta, std::abs(next[i] - x[i]));
    }
    x.swap(next);
    if (delta < 1e-10) {
      result.status = SolverStatus::kConverged;
      break;
    }
  }
  result.iterations = it;
  result.labels = SignLabels(x);
  result.objective = LabelObjective(m, result.labels);
  return result;
}

LabelVector MlExhaustive(const TernaryGraph& graph) {
  const int n = graph.n();
  if (n > kMaxExhaustiveNodes) {
    throw std::invalid_argument("MlExhaustive supports n <= " +
                                std::to_string(kMaxExhaustiveNodes));
  }
  if (n == 0) return LabelVector();
  std::vector<int> a(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      a[i * n + j] = a[j * n + i] = graph.Get(i, j);
    }
  }
  std::vector<int8_t> sigma(n, 1);
  std::vector<int> h(n, 0);  // h_i = sum_j A_ij sigma_j
  int64_t q = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) h[i] += a[i * n + j];
    q += h[i];
  }
  std::vector<int8_t> best = sigma;
  int64_t best_q = q;
  // Gray code over nodes 1..n-1; node 0 stays +1.
  const uint64_t count = uint64_t{1} << (n - 1);
  for (uint64_t step = 1; step < count; ++step) {
    const int k = std::countr_zero(step) + 1;
    q -= 4 * sigma[k] * h[k];
    for (int j = 0; j < n; ++j) h[j] -= 2 * a[j * n + k] * sigma[k];
    sigma[k] = static_cast<int8_t>(-sigma[k]);
    if (q > best_q || (q == best_q && sigma < best)) {
      best_q = q;
      best = sigma;
    }
  }
  return LabelVector(std::move(best));
}

}  // namespace cbmdetect
