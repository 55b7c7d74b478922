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

#include "cli.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbmdetect/cbm.h"
#include "cbmdetect/cdp.h"
#include "cbmdetect/detectors.h"
#include "cbmdetect/harness.h"
#include "cbmdetect/ldp.h"
#include "cbmdetect/recovery.h"
#include "cbmdetect/theory.h"

namespace cbmdetect::cli {
namespace {

// Raised for problems the user can fix by changing flags or inputs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TernaryGraph ReadGraph(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return ReadEdgeListCsv(in, n);
}

// Writes `body` to `path`, or to `fallback` when the path is empty.
void Emit(const std::string& path, const std::string& body,
          std::ostream& fallback) {
  if (path.empty()) {
    fallback << body;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  file << body;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::logic_error&) {
      throw ConfigError("bad number '" + cell + "' in list '" + text + "'");
    }
  }
  if (values.empty()) throw ConfigError("empty list");
  return values;
}

struct GenerateArgs {
  int n = 0;
  std::optional<double> p;
  std::optional<double> a;
  double zeta = 0.1;
  std::string labels;
  uint64_t seed = 0;
  std::string out;
};

struct PerturbArgs {
  std::string in;
  int n = 0;
  double epsilon = 1.0;
  std::optional<double> p;
  std::optional<double> zeta;
  uint64_t seed = 0;
  std::string out;
};

struct RecoverArgs {
  std::vector<std::string> in;
  int n = 0;
  std::string estimator = "sdp";
  std::string truth;
  std::string prechange;
  double epsilon = 1.0;
  double delta = 0.0;
  bool distance = false;
  int cap = 0;
  uint64_t seed = 0;
  std::string out;
};

struct DetectArgs {
  std::string config;
  std::string mode;
  std::string stream;
  int trial = 0;
  uint64_t seed = 0;
  std::string out;
};

struct SimulateArgs {
  std::string kind = "delay";
  std::string config;
  int parallelism = 1;
  std::optional<double> max_delay;
  std::optional<double> min_arl;
  int n = 0;
  double epsilon = 1.0;
  std::string a_values;
  std::string zeta_values;
  std::string n_values;
  std::string eps_values;
  double p = 0.8;
  double zeta = 0.1;
  int trials = 50;
  std::string estimator = "sdp";
  uint64_t seed = 0;
  std::string out;
};

struct ThresholdArgs {
  std::string thm;
  std::string bound;
  std::optional<int> n;
  std::optional<double> a;
  std::optional<double> zeta;
  std::optional<double> epsilon;
  bool eps_log_n = false;
  double delta = 0.0;
  std::optional<double> b;
  std::optional<double> gamma;
  int hamming = 2;
  std::optional<double> kl;
  double alpha0 = 1.0;
  std::string out;
};

struct IngestArgs {
  std::string in;
  std::string out;
};

LabelVector LabelsOrBalanced(const std::string& text, int n) {
  if (text.empty()) return LabelVector::Balanced(n);
  LabelVector labels = LabelVector::Parse(text);
  if (labels.size() != n) {
    throw ConfigError("--labels has " + std::to_string(labels.size()) +
                      " entries but --n is " + std::to_string(n));
  }
  return labels;
}

int RunGenerate(const GenerateArgs& args, std::ostream& out,
                std::ostream& err) {
  if (args.p.has_value() == args.a.has_value()) {
    throw ConfigError("give exactly one of --p or --a");
  }
  const CbmParams params =
      args.a ? CbmParams::FromDensity(args.n, *args.a, args.zeta)
             : CbmParams{args.n, *args.p, args.zeta, std::nullopt};
  const LabelVector labels = LabelsOrBalanced(args.labels, args.n);
  const TernaryGraph graph = SampleCbm(params, labels, args.seed);
  std::ostringstream csv;
  WriteEdgeListCsv(csv, graph);
  Emit(args.out, csv.str(), out);
  (args.out.empty() ? err : out)
      << "generated n=" << args.n << " p=" << Fmt(params.p)
      << " zeta=" << Fmt(params.zeta) << " revealed=" << graph.EdgeCount()
      << " labels=" << labels.ToString() << "\n";
  return kExitOk;
}

int RunPerturb(const PerturbArgs& args, std::ostream& out, std::ostream& err) {
  const TernaryGraph graph = ReadGraph(args.in, args.n);
  const TernaryGraph noisy = PerturbGraph(graph, args.epsilon, args.seed);
  std::ostringstream csv;
  WriteEdgeListCsv(csv, noisy);
  Emit(args.out, csv.str(), out);
  std::ostream& summary = args.out.empty() ? err : out;
  summary << "perturbed n=" << args.n << " eps=" << Fmt(args.epsilon)
          << " revealed " << graph.EdgeCount() << " -> " << noisy.EdgeCount();
  if (args.p && args.zeta) {
    const PerturbedParams tilde = PerturbParams(*args.p, *args.zeta, args.epsilon);
    summary << " p_tilde=" << Fmt(tilde.p) << " zeta_tilde=" << Fmt(tilde.zeta);
  }
  summary << "\n";
  return kExitOk;
}

int RunRecover(const RecoverArgs& args, std::ostream& out) {
  std::vector<TernaryGraph> graphs;
  for (const std::string& path : args.in) graphs.push_back(ReadGraph(path, args.n));
  nlohmann::json report;
  LabelVector labels;
  if (!args.prechange.empty()) {
    if (graphs.size() != 1) throw ConfigError("--prechange takes one --in graph");
    PrechangeEstimate est;
    if (args.prechange == "ldp") {
      est = EstimatePrechangeLdp(graphs[0], args.epsilon, args.seed);
    } else if (args.prechange == "cdp") {
      est = EstimatePrechangeCdp(graphs[0], PrivacyBudget{args.epsilon, args.delta},
                                 args.seed);
    } else {
      throw ConfigError("--prechange must be ldp or cdp");
    }
    labels = est.output;
    report["released"] = est.labels.has_value();
    report["p_hat"] = est.p_hat;
    report["zeta_hat"] = est.zeta_hat;
    report["degenerate"] = est.degenerate;
  } else if (args.estimator == "ml") {
    if (graphs.size() != 1) throw ConfigError("ml estimator takes one --in graph");
    labels = MlExhaustive(graphs[0]);
    report["objective"] = static_cast<double>(QuadraticForm(graphs[0], labels));
    report["status"] = "exact";
  } else {
    const RecoveryResult r =
        args.estimator == "sdp"
            ? SdpEstimate(graphs, SdpConfig{}, args.seed)
            : args.estimator == "spectral"
                  ? SpectralEstimate(graphs, args.seed)
                  : throw ConfigError("--estimator must be sdp, spectral or ml");
    labels = r.labels;
    report["objective"] = r.objective;
    report["status"] = ToString(r.status);
    report["iterations"] = r.iterations;
  }
  report["labels"] = labels.ToString();
  if (graphs.size() == 1) {
    const MleEstimate mle = MleParams(graphs[0], labels);
    report["mle_p"] = mle.p_hat;
    report["mle_zeta"] = mle.zeta_hat;
    if (!mle.degenerate) {
      report["log_likelihood"] = LogLikelihood(
          graphs[0], labels, std::clamp(mle.p_hat, 1e-12, 1.0 - 1e-12), mle.zeta_hat);
    }
  }
  if (!args.truth.empty()) {
    const LabelVector truth = LabelVector::Parse(args.truth);
    report["error"] = ClassificationError(labels, truth);
    report["hamming"] = Hamming(labels, truth);
  }
  if (args.distance) {
    if (graphs.size() != 1) throw ConfigError("--distance takes one --in graph");
    const int cap = args.cap > 0 ? args.cap : DefaultInstabilityCap(args.n);
    if (args.n <= kMaxExactInstabilityNodes) {
      Estimator est = MlExhaustive;
      if (args.estimator != "ml") {
        DetectorConfig cfg;
        cfg.sdp = SdpConfig{};
        cfg.estimator = ParseEstimatorKind(args.estimator);
        est = MakeEstimator(cfg, args.seed);
      }
      report["distance"] = DistanceToInstability(graphs[0], est, cap);
      report["distance_mode"] = "exact";
    } else {
      report["distance"] = LocalMarginDistance(graphs[0], labels, cap);
      report["distance_mode"] = "local-margin";
    }
  }
  Emit(args.out, report.dump(2) + "\n", out);
  if (!args.out.empty()) out << "labels " << labels.ToString() << "\n";
  return kExitOk;
}

ExperimentConfig LoadConfig(const std::string& path) {
  try {
    return ExperimentFromJson(ReadFile(path));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

int RunDetect(const DetectArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = LoadConfig(args.config);
  if (!args.mode.empty()) cfg.detector.mode = ParseDetectorMode(args.mode);
  cfg.seed = args.seed;
  std::vector<TrajectoryPoint> points;
  if (!args.stream.empty()) {
    const TimedStream stream = IngestStreamFile(args.stream);
    if (stream.n != cfg.scenario.pre.size()) {
      throw ConfigError("stream has n=" + std::to_string(stream.n) +
                        " but config has n=" +
                        std::to_string(cfg.scenario.pre.size()));
    }
    points = RunOnGraphs(cfg.detector, cfg.scenario, stream.graphs, cfg.seed);
  } else {
    points = RunTrajectory(cfg, args.trial);
  }
  std::ostringstream csv;
  WriteTrajectoryCsv(csv, points);
  Emit(args.out, csv.str(), out);
  std::ostream& summary = args.out.empty() ? err : out;
  auto alarm = std::find_if(points.begin(), points.end(),
                            [](const TrajectoryPoint& p) { return p.stopped; });
  summary << ToString(cfg.detector.mode) << " detector: ";
  if (alarm != points.end()) {
    summary << "alarm at t=" << alarm->t << " stat=" << Fmt(alarm->stat) << "\n";
  } else {
    summary << "no alarm in " << points.size() << " steps\n";
  }
  return kExitOk;
}

nlohmann::json ReportJson(const SimReport& r) {
  nlohmann::json j;
  j["mean_delay"] = r.mean_delay;
  j["delay_ci"] = {r.delay_ci_lo, r.delay_ci_hi};
  j["arl_estimate"] = r.arl_estimate;
  j["arl_std_error"] = r.arl_std_error;
  j["censored_fraction"] = r.censored_fraction;
  j["arl_lower_biased"] = r.arl_lower_biased;
  j["recovery_error_series"] = r.recovery_error_series;
  nlohmann::json rows = nlohmann::json::array();
  for (const TrialRow& row : r.rows) {
    rows.push_back({{"trial", row.trial},
                    {"stop_time", row.stop_time},
                    {"censored", row.censored},
                    {"delay", row.delay}});
  }
  j["rows"] = rows;
  return j;
}

int RunSimulate(const SimulateArgs& args, std::ostream& out) {
  if (args.kind == "phase") {
    if (args.n < 2) throw ConfigError("--n is required for phase grids");
    std::vector<double> a_values = ParseList(args.a_values);
    std::vector<double> zeta_values = ParseList(args.zeta_values);
    const PhaseGridResult grid =
        PhaseGrid(a_values, zeta_values, args.epsilon, args.n, args.trials,
                  ParseEstimatorKind(args.estimator), args.seed);
    std::ostringstream csv;
    WritePhaseGridCsv(csv, grid);
    Emit(args.out, csv.str(), out);
    out << "phase grid " << a_values.size() << "x" << zeta_values.size()
        << " trials=" << args.trials << "\n";
    return kExitOk;
  }
  if (args.kind == "compare") {
    std::vector<int> n_values;
    for (double v : ParseList(args.n_values)) n_values.push_back(static_cast<int>(v));
    const std::vector<ComparisonRow> rows =
        RecoveryComparison(n_values, ParseList(args.eps_values), args.p,
                           args.zeta, args.trials, args.seed);
    std::ostringstream csv;
    WriteComparisonCsv(csv, rows);
    Emit(args.out, csv.str(), out);
    double worst = 0.0;
    for (const ComparisonRow& r : rows) {
      worst = std::max(worst, std::abs(r.err_sdp - r.err_spectral));
    }
    out << "recovery comparison rows=" << rows.size()
        << " max|sdp-spectral|=" << Fmt(worst) << "\n";
    return kExitOk;
  }
  if (args.config.empty()) throw ConfigError("--config is required for " + args.kind);
  ExperimentConfig cfg = LoadConfig(args.config);
  cfg.seed = args.seed;
  cfg.parallelism = args.parallelism;
  if (args.kind == "delay") {
    const SimReport r = RunDelayTrials(cfg);
    Emit(args.out, ReportJson(r).dump(2) + "\n", out);
    out << "mean_delay=" << Fmt(r.mean_delay) << " ci95=[" << Fmt(r.delay_ci_lo)
        << ", " << Fmt(r.delay_ci_hi) << "] censored=" << Fmt(r.censored_fraction)
        << "\n";
    if (args.max_delay && r.mean_delay > *args.max_delay) {
      out << "check failed: mean delay exceeds " << Fmt(*args.max_delay) << "\n";
      return kExitStatFailure;
    }
    return kExitOk;
  }
  if (args.kind == "arl") {
    const SimReport r = RunArlTrials(cfg);
    double bound = args.min_arl.value_or(0.0);
    if (!args.min_arl) {
      const theory::BoundReport lower =
          cfg.detector.mode == DetectorMode::kCdp
              ? theory::ArlLowerCdp(cfg.detector.b,
                                    cfg.scenario.params_pre.zeta,
                                    cfg.detector.budget.epsilon)
              : theory::ArlLowerLdp(cfg.detector.b);
      bound = lower.ok() ? lower.value : 0.0;
    }
    Emit(args.out, ReportJson(r).dump(2) + "\n", out);
    out << "arl=" << Fmt(r.arl_estimate) << " se=" << Fmt(r.arl_std_error)
        << " censored=" << Fmt(r.censored_fraction)
        << (r.arl_lower_biased ? " (truncated, lower-biased)" : "")
        << " bound=" << Fmt(bound) << "\n";
    if (r.arl_estimate + 2.0 * r.arl_std_error < bound) {
      out << "check failed: ARL below bound\n";
      return kExitStatFailure;
    }
    return kExitOk;
  }
  throw ConfigError("--kind must be delay, arl, phase or compare");
}

template <typename T>
T Need(const std::optional<T>& v, const char* flag) {
  if (!v) throw ConfigError(std::string(flag) + " is required for this bound");
  return *v;
}

int RunThreshold(const ThresholdArgs& args, std::ostream& out) {
  std::optional<double> eps = args.epsilon;
  if (args.eps_log_n) eps = std::log(static_cast<double>(Need(args.n, "--n")));
  std::string which = args.bound;
  if (which.empty()) {
    static const std::map<std::string, std::string> kByNumber = {
        {"1", "ldp-recovery"},   {"2", "stability-recovery"},
        {"3", "subsampling-recovery"}, {"4", "converse-epsilon"},
        {"5", "wadd-ldp"},       {"6", "wadd-cdp"},
        {"7", "min-window"}};
    auto it = kByNumber.find(args.thm);
    if (it == kByNumber.end()) throw ConfigError("--thm must be 1..7");
    which = it->second;
  }
  std::vector<theory::BoundReport> reports;
  auto scenario_labels = [&]() {
    const int n = Need(args.n, "--n");
    if (args.hamming < 0 || 2 * args.hamming > n) {
      throw ConfigError("--hamming must lie in [0, n/2]");
    }
    LabelVector pre = LabelVector::Balanced(n);
    std::vector<int8_t> post = pre.values();
    for (int k = 0; k < args.hamming; ++k) post[n - 1 - k] *= -1;
    return std::make_pair(pre, LabelVector(post));
  };
  auto density = [&]() {
    const int n = Need(args.n, "--n");
    return Need(args.a, "--a") * std::log(static_cast<double>(n)) / n;
  };
  auto gamma = [&]() {
    if (args.gamma) return *args.gamma;
    return std::exp(Need(args.b, "--b or --gamma"));
  };
  if (which == "ldp-recovery") {
    const int n = Need(args.n, "--n");
    const RecoveryMargin m = LdpRecoveryMargin(args.a.value_or(0.0),
                                               Need(args.zeta, "--zeta"),
                                               Need(eps, "--eps"), n);
    theory::BoundReport r{"ldp_recovery", m.rhs,
                          {{"n", static_cast<double>(n)},
                           {"rhs", m.rhs},
                           {"density_bound", m.density_bound}},
                          ""};
    if (args.a) {
      r.inputs["lhs"] = m.lhs;
      r.inputs["margin"] = m.margin;
      if (!m.precondition_ok) r.flag = "density precondition fails";
    }
    reports.push_back(r);
  } else if (which == "stability-recovery" || which == "subsampling-recovery") {
    const auto all = theory::RecoveryThresholds(
        Need(args.a, "--a"), Need(args.zeta, "--zeta"), Need(eps, "--eps"),
        Need(args.n, "--n"));
    reports.push_back(which == "stability-recovery" ? all[0] : all[1]);
  } else if (which == "recovery") {
    reports = theory::RecoveryThresholds(Need(args.a, "--a"),
                                         Need(args.zeta, "--zeta"),
                                         Need(eps, "--eps"), Need(args.n, "--n"));
  } else if (which == "converse-epsilon") {
    reports.push_back(theory::ConverseEpsilonLower(
        Need(args.n, "--n"), Need(args.a, "--a"), Need(args.zeta, "--zeta")));
  } else if (which == "wadd-ldp" || which == "wadd-cdp" || which == "info") {
    const auto [pre, post] = scenario_labels();
    const theory::InfoNumbers info = theory::ComputeInfoNumbers(
        pre, post, density(), Need(args.zeta, "--zeta"), eps);
    if (which == "info") {
      reports.push_back({"info_numbers", info.i0_tilde,
                         {{"i0", info.i0}, {"i0_tilde", info.i0_tilde}}, ""});
    } else {
      reports.push_back(theory::WaddPrediction(
          gamma(), which == "wadd-ldp" ? info.i0_tilde : info.i0));
    }
  } else if (which == "min-window") {
    reports.push_back(theory::MinWindow(Need(args.n, "--n"), Need(eps, "--eps")));
  } else if (which == "arl-ldp") {
    reports.push_back(theory::ArlLowerLdp(Need(args.b, "--b")));
  } else if (which == "arl-cdp") {
    reports.push_back(theory::ArlLowerCdp(Need(args.b, "--b"),
                                          Need(args.zeta, "--zeta"),
                                          Need(eps, "--eps")));
  } else if (which == "kl-upper") {
    const auto [pre, post] = scenario_labels();
    reports.push_back(theory::LdpKlUpper(pre, post, density(),
                                         Need(args.zeta, "--zeta"),
                                         Need(eps, "--eps")));
  } else if (which == "cdp-delay") {
    reports.push_back(theory::CdpDelayLower(gamma(), Need(eps, "--eps"),
                                            args.delta, Need(args.n, "--n"),
                                            Need(args.kl, "--kl"), args.alpha0));
  } else if (which == "kl") {
    const auto [pre, post] = scenario_labels();
    reports.push_back({"kl_divergence",
                       KlDivergence(post, pre, density(), Need(args.zeta, "--zeta")),
                       {},
                       ""});
  } else {
    throw ConfigError("unknown bound '" + which + "'");
  }
  if (!args.out.empty()) Emit(args.out, theory::ToJson(reports) + "\n", out);
  for (const theory::BoundReport& r : reports) {
    out << r.name << " value=" << Fmt(r.value);
    for (const auto& [key, value] : r.inputs) out << " " << key << "=" << Fmt(value);
    if (!r.ok()) out << " flag=\"" << r.flag << "\"";
    out << "\n";
  }
  return kExitOk;
}

int RunIngest(const IngestArgs& args, std::ostream& out) {
  TimedStream stream;
  try {
    stream = IngestStreamFile(args.in);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(args.in + ": " + e.what());
  }
  std::ostringstream csv;
  WriteStream(csv, stream);
  if (!args.out.empty()) Emit(args.out, csv.str(), out);
  out << "ingested " << stream.graphs.size() << " graphs, n=" << stream.n;
  if (!stream.times.empty()) {
    out << ", t in [" << stream.times.front() << ", " << stream.times.back() << "]";
  }
  out << "\n";
  return kExitOk;
}

}  // namespace

const std::map<std::string, std::vector<std::string>>& VerbOperations() {
  static const std::map<std::string, std::vector<std::string>> kMap = {
      {"generate", {"sample_cbm"}},
      {"perturb", {"perturb_graph", "perturbed_params"}},
      {"recover",
       {"sdp_estimate", "spectral_estimate", "ml_exhaustive", "mle_params",
        "log_likelihood", "hamming", "distance_to_instability",
        "estimate_prechange_ldp", "estimate_prechange_cdp", "stability_release",
        "laplace_sample"}},
      {"detect",
       {"ldp_step", "ldp_stop", "cdp_step", "cdp_stop", "cdp_threshold",
        "adaptive_step_unknown_params", "log_likelihood_ratio",
        "stability_release", "subsample_stability_release", "ingest_stream"}},
      {"simulate",
       {"run_delay_trials", "run_arl_trials", "phase_grid",
        "recovery_comparison", "arl_lower_ldp", "arl_lower_cdp"}},
      {"threshold",
       {"ldp_recovery_margin", "recovery_thresholds", "converse_epsilon_lower",
        "info_numbers", "wadd_prediction", "arl_lower_ldp", "arl_lower_cdp",
        "ldp_kl_upper", "cdp_delay_lower", "min_window", "kl_divergence",
        "correlation"}},
      {"ingest", {"ingest_stream"}},
  };
  return kMap;
}

int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Private online community-change detection for censored block "
               "models.",
               "cbmdetect"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every verb");

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Sample a CBM graph as an i,j,w edge list");
  gen_cmd->add_option("--n", gen.n, "n: number of nodes")->required()->check(CLI::Range(2, 1 << 20));
  gen_cmd->add_option("--p", gen.p, "p: edge reveal probability");
  gen_cmd->add_option("--a", gen.a, "a: density, p = a ln(n)/n");
  gen_cmd->add_option("--zeta", gen.zeta, "zeta: flip probability of a revealed edge");
  gen_cmd->add_option("--labels", gen.labels, "sigma: labels as a +/- string (default balanced)");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed")->required();
  gen_cmd->add_option("--out", gen.out, "output CSV path (default stdout)");

  PerturbArgs per;
  CLI::App* per_cmd = app.add_subcommand("perturb", "Apply ternary randomized response to an edge list");
  per_cmd->add_option("--in", per.in, "input edge list CSV")->required();
  per_cmd->add_option("--n", per.n, "n: number of nodes")->required();
  per_cmd->add_option("--eps", per.epsilon, "epsilon: LDP budget")->required();
  per_cmd->add_option("--p", per.p, "p: report p_tilde for this p");
  per_cmd->add_option("--zeta", per.zeta, "zeta: report zeta_tilde for this zeta");
  per_cmd->add_option("--seed", per.seed, "RNG seed")->required();
  per_cmd->add_option("--out", per.out, "output CSV path (default stdout)");

  RecoverArgs rec;
  CLI::App* rec_cmd = app.add_subcommand("recover", "Estimate communities from one or more edge lists");
  rec_cmd->add_option("--in", rec.in, "input edge list CSV (repeat to sum graphs)")->required();
  rec_cmd->add_option("--n", rec.n, "n: number of nodes")->required();
  rec_cmd->add_option("--estimator", rec.estimator, "sdp, spectral or ml (exhaustive, n <= 16)");
  rec_cmd->add_option("--truth", rec.truth, "sigma: true labels, reports the error");
  rec_cmd->add_option("--prechange", rec.prechange, "ldp or cdp: private pre-change estimation");
  rec_cmd->add_option("--eps", rec.epsilon, "epsilon: privacy budget for --prechange");
  rec_cmd->add_option("--delta", rec.delta, "delta: failure probability for --prechange cdp");
  rec_cmd->add_flag("--distance", rec.distance, "report the distance to instability");
  rec_cmd->add_option("--cap", rec.cap, "cap for --distance (default ceil(ln n))");
  rec_cmd->add_option("--seed", rec.seed, "RNG seed")->required();
  rec_cmd->add_option("--out", rec.out, "output JSON path (default stdout)");

  DetectArgs det;
  CLI::App* det_cmd = app.add_subcommand("detect", "Run one detector trajectory and write it as CSV");
  det_cmd->add_option("--config", det.config, "experiment JSON")->required();
  det_cmd->add_option("--mode", det.mode, "ldp, cdp or ldp-adaptive (overrides config)");
  det_cmd->add_option("--stream", det.stream, "t,i,j,w stream to run on instead of simulating");
  det_cmd->add_option("--trial", det.trial, "trial index for the simulated stream");
  det_cmd->add_option("--seed", det.seed, "RNG seed")->required();
  det_cmd->add_option("--out", det.out, "trajectory CSV path (default stdout)");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo delay/ARL, phase grids, estimator comparisons");
  sim_cmd->add_option("--kind", sim.kind, "delay, arl, phase or compare");
  sim_cmd->add_option("--config", sim.config, "experiment JSON (delay, arl)");
  sim_cmd->add_option("--parallelism", sim.parallelism, "worker threads")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--max-delay", sim.max_delay, "exit 1 if the mean delay exceeds this");
  sim_cmd->add_option("--min-arl", sim.min_arl, "exit 1 if ARL + 2 se is below this (default e^b bound)");
  sim_cmd->add_option("--n", sim.n, "n: number of nodes (phase)");
  sim_cmd->add_option("--eps", sim.epsilon, "epsilon: LDP budget (phase)");
  sim_cmd->add_option("--a-values", sim.a_values, "a: comma-separated densities (phase)");
  sim_cmd->add_option("--zeta-values", sim.zeta_values, "zeta: comma-separated values (phase)");
  sim_cmd->add_option("--n-values", sim.n_values, "n: comma-separated sizes (compare)");
  sim_cmd->add_option("--eps-values", sim.eps_values, "epsilon: comma-separated budgets (compare)");
  sim_cmd->add_option("--p", sim.p, "p: edge reveal probability (compare)");
  sim_cmd->add_option("--zeta", sim.zeta, "zeta: flip probability (compare)");
  sim_cmd->add_option("--trials", sim.trials, "trials per cell (phase) or reps (compare)");
  sim_cmd->add_option("--estimator", sim.estimator, "sdp or spectral (phase)");
  sim_cmd->add_option("--seed", sim.seed, "RNG seed")->required();
  sim_cmd->add_option("--out", sim.out, "report path (JSON or CSV)");

  ThresholdArgs thr;
  CLI::App* thr_cmd = app.add_subcommand("threshold", "Evaluate recovery thresholds and detection bounds");
  thr_cmd->add_option("--thm", thr.thm, "1 LDP recovery, 2 stability, 3 subsampling, 4 converse eps, 5 LDP delay, 6 CDP delay, 7 window");
  thr_cmd->add_option("--bound", thr.bound,
                      "named bound: ldp-recovery, recovery, converse-epsilon, info, wadd-ldp, wadd-cdp, "
                      "arl-ldp, arl-cdp, kl, kl-upper, cdp-delay, min-window");
  thr_cmd->add_option("--n", thr.n, "n: number of nodes");
  thr_cmd->add_option("--a", thr.a, "a: density, p = a ln(n)/n");
  thr_cmd->add_option("--zeta", thr.zeta, "zeta: flip probability");
  thr_cmd->add_option("--eps", thr.epsilon, "epsilon: privacy budget");
  thr_cmd->add_flag("--eps-log-n", thr.eps_log_n, "set epsilon = ln n");
  thr_cmd->add_option("--delta", thr.delta, "delta: CDP failure probability");
  thr_cmd->add_option("--b", thr.b, "b: detection threshold");
  thr_cmd->add_option("--gamma", thr.gamma, "gamma: target ARL, b = ln gamma");
  thr_cmd->add_option("--hamming", thr.hamming, "Ham(sigma_pre, sigma_post)");
  thr_cmd->add_option("--kl", thr.kl, "KL: information per sample (cdp-delay)");
  thr_cmd->add_option("--alpha0", thr.alpha0, "alpha_0: per-sample test power (cdp-delay)");
  thr_cmd->add_option("--out", thr.out, "JSON report path");

  IngestArgs ing;
  CLI::App* ing_cmd = app.add_subcommand("ingest", "Validate a t,i,j,w stream and re-emit it normalized");
  ing_cmd->add_option("--in", ing.in, "input stream CSV")->required();
  ing_cmd->add_option("--out", ing.out, "normalized stream path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands()[0];
    err << sub->help();
    return kExitConfigError;
  }

  CLI::App* sub = app.get_subcommands()[0];
  try {
    if (sub == gen_cmd) return RunGenerate(gen, out, err);
    if (sub == per_cmd) return RunPerturb(per, out, err);
    if (sub == rec_cmd) return RunRecover(rec, out);
    if (sub == det_cmd) return RunDetect(det, out, err);
    if (sub == sim_cmd) return RunSimulate(sim, out);
    if (sub == thr_cmd) return RunThreshold(thr, out);
    if (sub == ing_cmd) return RunIngest(ing, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n" << sub->help();
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n" << sub->help();
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace cbmdetect::cli
