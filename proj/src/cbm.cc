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

#include "cbmdetect/cbm.h"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cbmdetect/kernels.h"
#include "cbmdetect/rng.h"
#include "json.hpp"

namespace cbmdetect {
namespace {

void CheckSameLength(const LabelVector& a, const LabelVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("label vectors differ in length: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
}

void CheckGraphLabels(const TernaryGraph& graph, const LabelVector& labels) {
  if (graph.n() != labels.size()) {
    throw std::invalid_argument("graph has " + std::to_string(graph.n()) +
                                " nodes but labels have " +
                                std::to_string(labels.size()));
  }
}

void CheckOpenParams(double p, double zeta) {
  if (!(p > 0.0 && p < 1.0) || !(zeta > 0.0 && zeta < 0.5)) {
    throw std::domain_error(
        "likelihood needs 0 < p < 1 and 0 < zeta < 1/2 (got p=" +
        std::to_string(p) + ", zeta=" + std::to_string(zeta) + ")");
  }
}

double ClampZeta(double zeta) {
  return std::min(std::max(zeta, kZetaFloor), kZetaCeil);
}

}  // namespace

CbmParams CbmParams::FromDensity(int n, double a, double zeta) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (!(a > 0.0)) throw std::invalid_argument("density coefficient a must be > 0");
  CbmParams params;
  params.n = n;
  params.p = a * std::log(static_cast<double>(n)) / n;
  params.zeta = zeta;
  params.a = a;
  params.Validate();
  return params;
}

void CbmParams::Validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in [0, 1], got " + std::to_string(p));
  }
  if (!(zeta > 0.0 && zeta < 0.5)) {
    throw std::invalid_argument("zeta must lie in (0, 1/2), got " +
                                std::to_string(zeta));
  }
  if (a.has_value()) {
    const double expected = *a * std::log(static_cast<double>(n)) / n;
    if (std::abs(expected - p) > 1e-12 * std::max(std::abs(p), 1e-300)) {
      throw std::invalid_argument("p does not equal a*ln(n)/n");
    }
  }
}

LabelVector::LabelVector(std::vector<int8_t> values) : values_(std::move(values)) {
  for (int8_t v : values_) {
    if (v != 1 && v != -1) {
      throw std::invalid_argument("labels must be -1 or +1");
    }
  }
}

LabelVector LabelVector::Parse(std::string_view text) {
  std::vector<int8_t> values;
  values.reserve(text.size());
  for (char c : text) {
    if (c == '+') {
      values.push_back(1);
    } else if (c == '-') {
      values.push_back(-1);
    } else {
      throw std::invalid_argument(std::string("bad label character '") + c + "'");
    }
  }
  return LabelVector(std::move(values));
}

LabelVector LabelVector::Balanced(int n) {
  std::vector<int8_t> values(n, -1);
  for (int i = 0; i < n / 2; ++i) values[i] = 1;
  if (n == 1) values[0] = 1;
  return LabelVector(std::move(values));
}

LabelVector LabelVector::Flipped() const {
  LabelVector out = *this;
  for (int8_t& v : out.values_) v = static_cast<int8_t>(-v);
  return out;
}

LabelVector LabelVector::Canonical() const {
  return IsCanonical() ? *this : Flipped();
}

LabelVector LabelVector::WithFlip(int i) const {
  LabelVector out = *this;
  out.values_.at(i) = static_cast<int8_t>(-out.values_[i]);
  return out;
}

std::string LabelVector::ToString() const {
  std::string s;
  s.reserve(values_.size());
  for (int8_t v : values_) s.push_back(v > 0 ? '+' : '-');
  return s;
}

TernaryGraph::TernaryGraph(int n) : n_(n) {
  if (n < 0) throw std::invalid_argument("negative node count");
  upper_.assign(static_cast<std::size_t>(NumPairs(n)), 0);
}

int64_t TernaryGraph::PairIndex(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw std::invalid_argument("bad pair (" + std::to_string(i) + "," +
                                std::to_string(j) + ") for n=" +
                                std::to_string(n_));
  }
  if (i > j) std::swap(i, j);
  return RowOffset(i) + (j - i - 1);
}

std::pair<int, int> TernaryGraph::PairAt(int64_t index) const {
  int i = 0;
  while (i + 1 < n_ && RowOffset(i + 1) <= index) ++i;
  return {i, static_cast<int>(index - RowOffset(i)) + i + 1};
}

int8_t TernaryGraph::Get(int i, int j) const {
  if (i == j) return 0;
  return upper_[PairIndex(i, j)];
}

void TernaryGraph::Set(int i, int j, int8_t value) {
  if (value < -1 || value > 1) {
    throw std::invalid_argument("edge values must be in {-1, 0, +1}");
  }
  upper_[PairIndex(i, j)] = value;
}

int64_t TernaryGraph::EdgeCount() const {
  int64_t count = 0;
  for (int8_t v : upper_) count += (v != 0);
  return count;
}

ChangeScenario ChangeScenario::Make(LabelVector pre, LabelVector post,
                                    int64_t nu, CbmParams params_pre,
                                    CbmParams params_post) {
  CheckSameLength(pre, post);
  if (pre.size() != params_pre.n || post.size() != params_post.n) {
    throw std::invalid_argument("scenario labels do not match n");
  }
  if (nu < 1) throw std::invalid_argument("change point must be >= 1");
  params_pre.Validate();
  params_post.Validate();
  ChangeScenario s;
  s.pre = pre.Canonical();
  s.post = post;
  if (2 * Hamming(s.pre, s.post) > s.pre.size()) s.post = s.post.Flipped();
  s.nu = nu;
  s.params_pre = params_pre;
  s.params_post = params_post;
  return s;
}

TernaryGraph SampleCbm(const CbmParams& params, const LabelVector& labels,
                       uint64_t seed) {
  params.Validate();
  if (labels.size() != params.n) {
    throw std::invalid_argument("labels length does not match n");
  }
  const int n = params.n;
  const double agree = params.p * (1.0 - params.zeta);
  TernaryGraph graph(n);
  std::span<int8_t> upper = graph.mutable_upper();
  int64_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      const double u = EdgeUniform(seed, i, j);
      const int8_t s = static_cast<int8_t>(labels[i] * labels[j]);
      upper[k] = u < agree ? s : (u < params.p ? static_cast<int8_t>(-s) : 0);
    }
  }
  return graph;
}

int64_t QuadraticForm(const TernaryGraph& graph, const LabelVector& labels) {
  CheckGraphLabels(graph, labels);
  const auto& k = kernels::Active();
  const int n = graph.n();
  int64_t half = 0;
  for (int i = 0; i + 1 < n; ++i) {
    half += labels[i] * k.signed_dot_i8(graph.Row(i), labels.data() + i + 1,
                                        static_cast<std::size_t>(n - i - 1));
  }
  return 2 * half;
}

double LogLikelihood(const TernaryGraph& graph, const LabelVector& labels,
                     double p, double zeta) {
  CheckGraphLabels(graph, labels);
  CheckOpenParams(p, zeta);
  const double c1 = 0.25 * std::log((1.0 - zeta) / zeta);
  const double edges = static_cast<double>(graph.EdgeCount());
  return c1 * static_cast<double>(QuadraticForm(graph, labels)) +
         static_cast<double>(NumPairs(graph.n())) * std::log1p(-p) +
         edges * (std::log(p) - std::log1p(-p) +
                  0.5 * (std::log(zeta) + std::log1p(-zeta)));
}

double LogLikelihoodRatio(const TernaryGraph& graph,
                          const LabelVector& labels_num,
                          const LabelVector& labels_den, double p,
                          double zeta) {
  CheckGraphLabels(graph, labels_num);
  CheckGraphLabels(graph, labels_den);
  CheckOpenParams(p, zeta);
  const double c1 = 0.25 * std::log((1.0 - zeta) / zeta);
  const int64_t diff =
      QuadraticForm(graph, labels_num) - QuadraticForm(graph, labels_den);
  return c1 * static_cast<double>(diff);
}

double KlDivergence(const LabelVector& labels_a, const LabelVector& labels_b,
                    double p, double zeta) {
  CheckSameLength(labels_a, labels_b);
  if (!(p > 0.0 && p <= 1.0) || !(zeta > 0.0 && zeta < 0.5)) {
    throw std::invalid_argument("KL needs 0 < p <= 1 and 0 < zeta < 1/2");
  }
  const int64_t gap = NumPairs(labels_a.size()) - Correlation(labels_a, labels_b);
  return 0.5 * std::log((1.0 - zeta) / zeta) * p * (1.0 - 2.0 * zeta) *
         static_cast<double>(gap);
}

int64_t Correlation(const LabelVector& labels_a, const LabelVector& labels_b) {
  CheckSameLength(labels_a, labels_b);
  // With c_i = a_i b_i, sum_{i<j} c_i c_j = ((sum c)^2 - n) / 2.
  int64_t s = 0;
  for (int i = 0; i < labels_a.size(); ++i) s += labels_a[i] * labels_b[i];
  return (s * s - labels_a.size()) / 2;
}

int Hamming(const LabelVector& labels_a, const LabelVector& labels_b) {
  CheckSameLength(labels_a, labels_b);
  int d = 0;
  for (int i = 0; i < labels_a.size(); ++i) d += labels_a[i] != labels_b[i];
  return d;
}

int ClassificationError(const LabelVector& labels_est,
                        const LabelVector& labels_true) {
  const int d = Hamming(labels_est, labels_true);
  return std::min(d, labels_est.size() - d);
}

MleEstimate MleParams(const TernaryGraph& graph, const LabelVector& labels) {
  return MleParams(std::span<const TernaryGraph>(&graph, 1), labels);
}

MleEstimate MleParams(std::span<const TernaryGraph> graphs,
                      const LabelVector& labels) {
  if (graphs.empty()) throw std::invalid_argument("no graphs for MLE");
  int64_t edges = 0;
  int64_t quad = 0;
  for (const TernaryGraph& g : graphs) {
    CheckGraphLabels(g, labels);
    edges += g.EdgeCount();
    quad += QuadraticForm(g, labels);
  }
  MleEstimate est;
  if (edges == 0) {
    est.degenerate = true;
    return est;
  }
  const double pairs = static_cast<double>(NumPairs(labels.size())) *
                       static_cast<double>(graphs.size());
  est.p_hat = static_cast<double>(edges) / pairs;
  est.zeta_hat = ClampZeta(0.5 - static_cast<double>(quad) /
                                     (4.0 * static_cast<double>(edges)));
  return est;
}

void WriteEdgeListCsv(std::ostream& out, const TernaryGraph& graph) {
  const int n = graph.n();
  for (int i = 0; i < n; ++i) {
    const int8_t* row = graph.Row(i);
    for (int j = i + 1; j < n; ++j) {
      const int8_t w = row[j - i - 1];
      if (w != 0) out << i << ',' << j << ',' << static_cast<int>(w) << '\n';
    }
  }
}

TernaryGraph ReadEdgeListCsv(std::istream& in, int n) {
  TernaryGraph graph(n);
  std::vector<bool> seen(static_cast<std::size_t>(graph.num_pairs()), false);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line == "i,j,w") continue;
    std::istringstream fields(line);
    long i = 0, j = 0, w = 0;
    char c1 = 0, c2 = 0;
    if (!(fields >> i >> c1 >> j >> c2 >> w) || c1 != ',' || c2 != ',' ||
        !(fields >> std::ws).eof()) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": expected \"i,j,w\"");
    }
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": node index out of range or self-loop");
    }
    if (w != 1 && w != -1) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": weight must be -1 or +1");
    }
    const int64_t k = graph.PairIndex(static_cast<int>(i), static_cast<int>(j));
    if (seen[k]) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": duplicate pair");
    }
    seen[k] = true;
    graph.Set(static_cast<int>(i), static_cast<int>(j), static_cast<int8_t>(w));
  }
  return graph;
}

std::string ParamsToJson(const CbmParams& params) {
  nlohmann::json j = {{"n", params.n}, {"p", params.p}, {"zeta", params.zeta}};
  if (params.a) j["a"] = *params.a;
  return j.dump();
}

CbmParams ParamsFromJson(std::string_view json) {
  CbmParams params;
  try {
    const nlohmann::json j = nlohmann::json::parse(json);
    params.n = j.at("n").get<int>();
    params.zeta = j.at("zeta").get<double>();
    if (j.contains("a")) {
      params = CbmParams::FromDensity(params.n, j.at("a").get<double>(),
                                      params.zeta);
      if (j.contains("p") &&
          std::abs(j.at("p").get<double>() - params.p) > 1e-12 * params.p) {
        throw std::invalid_argument("JSON p disagrees with a*ln(n)/n");
      }
    } else {
      params.p = j.at("p").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad params JSON: ") + e.what());
  }
  params.Validate();
  return params;
}

}  // namespace cbmdetect
