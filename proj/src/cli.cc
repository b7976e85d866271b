// Copyright 2026 The nrhc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nrhc/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "nrhc/analysis.h"
#include "nrhc/errors.h"
#include "nrhc/format.h"
#include "nrhc/report.h"
#include "nrhc/sim.h"

namespace nrhc {
namespace {

constexpr char kVersion[] = "nrhc 0.1.0";
const std::vector<double> kAnalysisHGrid = {1e-4, 2e-4, 5e-4, 1e-3, 2e-3,
                                            5e-3, 1e-2, 2e-2, 5e-2, 1e-1};

std::string OutPath(const CliOptions& opt, const std::string& file) {
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + opt.out_dir +
                  "': " + ec.message());
  }
  return (std::filesystem::path(opt.out_dir) / file).string();
}

std::string Title(const std::string& command, const ScenarioConfig& cfg) {
  return std::string(kVersion) + " " + command + " (config " + cfg.source +
         ")";
}

// Result of one simulation, kept even when it diverges.
struct Outcome {
  TrajectoryLog log;
  RunSummary summary;
};

Outcome Simulate(const ScenarioConfig& cfg) {
  Outcome o;
  o.summary.name = cfg.name;
  o.summary.dof = cfg.sim.dof();
  o.summary.torque_limit = cfg.torque_limit;
  try {
    o.log = RunScenario(cfg.sim);
  } catch (const DivergenceError& e) {
    o.summary.divergence_time = e.time();
    return o;
  }
  o.summary.metrics = ComputeMetrics(o.log, cfg.settling_band);
  if (cfg.sim.controller_enabled) {
    const TwoLinkArm nominal(cfg.sim.nominal);
    const TwoLinkArm plant(cfg.sim.plant);
    o.summary.diagnostic = PredictSteadyState(o.log, nominal, plant,
                                              cfg.sim.friction,
                                              cfg.sim.controller.h);
  }
  return o;
}

void PrintSummary(const RunSummary& s, std::ostream& out) {
  if (!s.metrics) {
    out << s.name << ": diverged at t = " << FormatDouble(*s.divergence_time)
        << " s\n";
    return;
  }
  out << s.name << ": steady_state_e1 = "
      << FormatList(s.metrics->steady_state_e1)
      << " rad, max_torque = " << FormatList(s.metrics->max_torque)
      << " N m\n";
}

}  // namespace

void CmdRun(const std::string& config_path, const CliOptions& opt,
            std::ostream& out) {
  const ScenarioConfig cfg = ParseConfigFile(config_path);
  for (const std::string& w : cfg.warnings) out << "warning: " << w << "\n";
  const TrajectoryLog log = RunScenario(cfg.sim);  // DivergenceError escapes
  RunSummary s;
  s.name = cfg.name;
  s.dof = log.dof;
  s.torque_limit = cfg.torque_limit;
  s.metrics = ComputeMetrics(log, cfg.settling_band);
  if (cfg.sim.controller_enabled) {
    s.diagnostic = PredictSteadyState(log, TwoLinkArm(cfg.sim.nominal),
                                      TwoLinkArm(cfg.sim.plant),
                                      cfg.sim.friction, cfg.sim.controller.h);
  }

  const std::string traj = cfg.name + "_trajectory.csv";
  const std::string header = HeaderBlock(cfg, Title("run", cfg));
  WriteTextFile(OutPath(opt, traj), TrajectoryCsv(header, log));
  WriteTextFile(OutPath(opt, cfg.name + "_metrics.csv"),
                MetricsCsv(header, {s}));
  WriteTextFile(OutPath(opt, cfg.name + "_plot.gp"),
                RunPlotScript(header, cfg.name, traj, log.dof,
                              log.has_observer));
  PrintSummary(s, out);
}

void CmdCompare(const std::vector<std::string>& config_paths,
                const CliOptions& opt, std::ostream& out) {
  if (config_paths.size() < 2) {
    throw ValidationError("compare needs at least two config files");
  }
  std::vector<ScenarioConfig> cfgs;
  for (const std::string& p : config_paths) cfgs.push_back(ParseConfigFile(p));
  const ScenarioConfig& first = cfgs.front();
  for (const ScenarioConfig& c : cfgs) {
    if (c.sim.dof() != first.sim.dof()) {
      throw ValidationError("compare: " + c.source +
                            " has a different joint count");
    }
    const RefModelParams& a = c.sim.reference;
    const RefModelParams& b = first.sim.reference;
    if (a.omega != b.omega || a.xi != b.xi || a.amplitude != b.amplitude ||
        a.rate != b.rate || a.literal_form != b.literal_form) {
      throw ValidationError("compare: " + c.source +
                            " uses a different reference");
    }
    for (const ScenarioConfig& d : cfgs) {
      if (&c != &d && c.name == d.name) {
        throw ValidationError("compare: scenario name '" + c.name +
                              "' is used twice");
      }
    }
  }

  std::vector<std::future<Outcome>> jobs;
  for (const ScenarioConfig& c : cfgs) {
    jobs.push_back(std::async(std::launch::async, Simulate, std::cref(c)));
  }
  std::vector<Outcome> results;
  for (auto& j : jobs) results.push_back(j.get());

  std::vector<RunSummary> rows;
  std::vector<std::string> labels, files;
  std::vector<std::string> notes = {"scenarios:"};
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    notes.push_back("  " + cfgs[i].name + " <- " + cfgs[i].source);
    rows.push_back(results[i].summary);
    if (!results[i].summary.metrics) continue;
    const std::string traj = cfgs[i].name + "_trajectory.csv";
    WriteTextFile(OutPath(opt, traj),
                  TrajectoryCsv(HeaderBlock(cfgs[i], Title("compare", cfgs[i])),
                                results[i].log));
    labels.push_back(cfgs[i].name);
    files.push_back(traj);
  }
  // The combined files embed the first config; the others are listed above
  // and in their own trajectory files.
  const std::string header = HeaderBlock(first, Title("compare", first), notes);
  WriteTextFile(OutPath(opt, "compare_metrics.csv"), MetricsCsv(header, rows));
  WriteTextFile(OutPath(opt, "compare_plot.gp"),
                ComparePlotScript(header, "compare", labels, files,
                                  first.sim.dof()));
  for (const RunSummary& s : rows) PrintSummary(s, out);
  for (const RunSummary& s : rows) {
    if (!s.metrics) {
      throw DivergenceError(s.name + " diverged", *s.divergence_time);
    }
  }
}

void CmdAnalyze(const std::string& config_path,
                const std::vector<Eigen::VectorXd>& states, int random_states,
                const CliOptions& opt, std::ostream& out) {
  const ScenarioConfig cfg = ParseConfigFile(config_path);
  const int n = cfg.sim.dof();
  std::vector<Eigen::VectorXd> qs = states;
  std::string state_note = "states: given on the command line";
  if (qs.empty() && random_states > 0) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> dist(-std::numbers::pi,
                                                std::numbers::pi);
    for (int k = 0; k < random_states; ++k) {
      Eigen::VectorXd q(n);
      for (int i = 0; i < n; ++i) q(i) = dist(rng);
      qs.push_back(q);
    }
    state_note = "states: " + std::to_string(random_states) +
                 " uniform draws from [-pi, pi)^2, seed " +
                 std::to_string(opt.seed);
  } else if (qs.empty()) {
    const double pi = std::numbers::pi;
    for (double q1 : {-pi / 2, 0.0, pi / 2, pi}) {
      for (double q2 : {-pi / 2, 0.0, pi / 2, pi}) {
        qs.push_back(Eigen::Vector2d(q1, q2));
      }
    }
    state_note = "states: default grid q1, q2 in {-pi/2, 0, pi/2, pi}";
  }
  for (const Eigen::VectorXd& q : qs) {
    if (q.size() != n || !q.allFinite()) {
      throw ValidationError("analyze: each state needs " + std::to_string(n) +
                            " finite joint angles");
    }
  }

  const TwoLinkArm nominal(cfg.sim.nominal);
  const TwoLinkArm plant(cfg.sim.plant);
  const ControllerParams& cp = cfg.sim.controller;

  // Gains come from one run of the scenario itself.
  UncertaintyBounds ub;
  std::string gain_note = "gamma_est: sampled along a full scenario run";
  try {
    const TrajectoryLog log = RunScenario(cfg.sim);
    ub = EstimateGains(log, nominal, plant, cfg.sim.friction);
    if (ub.all_converged) gain_note += " (all samples converged; gains are 0)";
  } catch (const DivergenceError& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ub.mu = ub.gamma = ub.gamma_integral = nan;
    gain_note = "gamma_est: unavailable, the scenario run diverged at t = " +
                FormatDouble(e.time()) + " s";
  }
  const double m_upper = EstimateInertiaBounds(nominal).upper;

  auto make_row = [&](MatrixKind kind, double h, const Eigen::VectorXd& q) {
    AnalysisRow row;
    row.kind = kind;
    row.h = h;
    row.q_w = cp.q_w;
    row.r_w = cp.r_w;
    row.q = q;
    const Eigen::MatrixXd m0 = nominal.Inertia(q);
    const Eigen::MatrixXd m = plant.Inertia(q);
    const Lemma2Report l2 = Lemma2Check(m, m0, h);
    row.lambda_max_eps = l2.lambda_max_eps;
    row.min_eig_b = l2.b_eigenvalues.minCoeff();
    const int which = kind == MatrixKind::kABasic ? 1
                      : kind == MatrixKind::kBBar ? 2
                                                  : 3;
    TheoremInputs in{h, cp.q_w, cp.r_w, m0, m, m_upper, Eigen::MatrixXd()};
    StabilityReport rep;
    if (which == 1) {
      rep = Analyze(kind, ClosedLoopA(h, cp.q_w, cp.r_w, m0));
    } else {
      const Eigen::MatrixXd b = BMatrix(m, m0);
      rep = Analyze(kind, which == 2 ? BBar(h, b) : BTilde(h, b));
    }
    row.max_re_eig = rep.max_real_part;
    row.hurwitz = rep.hurwitz;
    row.gamma_est = which == 1 ? ub.mu : which == 2 ? ub.gamma : ub.gamma_integral;
    if (rep.hurwitz) {
      const TheoremBound tb = TheoremBounds(in, ub, which);
      row.threshold = tb.threshold;
      row.threshold_stmt = tb.threshold_stmt;
      row.margin = tb.margin;
    } else {
      row.threshold = row.threshold_stmt = row.margin =
          std::numeric_limits<double>::quiet_NaN();
    }
    return row;
  };

  const std::vector<MatrixKind> kinds = {MatrixKind::kABasic, MatrixKind::kBBar,
                                         MatrixKind::kBTilde};
  std::vector<AnalysisRow> rows;
  for (const Eigen::VectorXd& q : qs) {
    for (MatrixKind k : kinds) rows.push_back(make_row(k, cp.h, q));
  }
  std::vector<AnalysisRow> sweep;
  for (const Eigen::VectorXd& q : qs) {
    for (double h : kAnalysisHGrid) {
      for (MatrixKind k : kinds) sweep.push_back(make_row(k, h, q));
    }
  }

  const std::vector<std::string> notes = {
      state_note, gain_note,
      "threshold_proof: bound using lambda_min(Pbar); threshold_stmt uses "
      "lambda_max(Pbar)",
      "A_basic rows use the nominal inertia; B rows use b = M^-1 M0",
      "margin: threshold_proof - gamma_est; nan where the matrix is not Hurwitz"};
  std::vector<std::string> sweep_notes = notes;
  sweep_notes.push_back("h grid: " +
                        FormatList(Eigen::Map<const Eigen::VectorXd>(
                            kAnalysisHGrid.data(),
                            static_cast<Eigen::Index>(kAnalysisHGrid.size()))));
  WriteTextFile(OutPath(opt, cfg.name + "_analysis.csv"),
                AnalysisCsv(HeaderBlock(cfg, Title("analyze", cfg), notes),
                            rows, n));
  WriteTextFile(OutPath(opt, cfg.name + "_hsweep.csv"),
                AnalysisCsv(HeaderBlock(cfg, Title("analyze", cfg), sweep_notes),
                            sweep, n));
  int stable = 0;
  for (const AnalysisRow& r : rows) stable += r.hurwitz ? 1 : 0;
  out << cfg.name << ": " << stable << " of " << rows.size()
      << " frozen-state matrices Hurwitz at h = " << FormatDouble(cp.h)
      << "\n";
}

void CmdSweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const CliOptions& opt,
              std::ostream& out) {
  const ScenarioConfig base = ParseConfigFile(config_path);
  SweepSpec spec;
  if (!param.empty()) {
    spec.param = param;
    spec.values = values;
  } else if (base.sweep) {
    spec = *base.sweep;
  } else {
    throw ValidationError("sweep: no --param given and the config has no "
                          "sweep section");
  }
  if (spec.values.empty()) throw ValidationError("sweep: no values given");

  std::vector<ScenarioConfig> cfgs;
  for (double v : spec.values) {
    ScenarioConfig c =
        ParseConfigFile(config_path, {{spec.param, FormatDouble(v)}});
    c.name = base.name + "_" + FormatDouble(v);
    cfgs.push_back(std::move(c));
  }
  std::vector<std::future<Outcome>> jobs;
  for (const ScenarioConfig& c : cfgs) {
    jobs.push_back(std::async(std::launch::async, Simulate, std::cref(c)));
  }
  std::vector<RunSummary> rows;
  for (auto& j : jobs) rows.push_back(j.get().summary);

  // Empirical h_max: the largest value below the smallest divergent one.
  std::vector<std::size_t> order(spec.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spec.values[a] < spec.values[b];
  });
  std::optional<double> first_divergent, last_stable;
  for (std::size_t i : order) {
    if (!rows[i].metrics) {
      first_divergent = spec.values[i];
      break;
    }
    last_stable = spec.values[i];
  }
  std::string verdict;
  if (!first_divergent) {
    verdict = "no divergence over the swept values";
  } else if (!last_stable) {
    verdict = "every value diverged from the smallest one up";
  } else {
    verdict = "empirical threshold between " + FormatDouble(*last_stable) +
              " and " + FormatDouble(*first_divergent);
  }

  ScenarioConfig header_cfg = base;
  header_cfg.sweep = spec;
  const std::vector<std::string> notes = {"sweep parameter: " + spec.param,
                                          "result: " + verdict};
  WriteTextFile(OutPath(opt, base.name + "_sweep.csv"),
                MetricsCsv(HeaderBlock(header_cfg, Title("sweep", base), notes),
                           rows));
  for (const RunSummary& s : rows) PrintSummary(s, out);
  out << spec.param << ": " << verdict << "\n";
}

int RunGuarded(const std::function<void()>& command, std::ostream& err) {
  try {
    command();
    return kExitOk;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitValidation;
  }
}

std::vector<double> ParseNumberList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ValidationError("empty entry in '" + text + "'");
    const std::string s = item.substr(b, e - b + 1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() ||
        !std::isfinite(v)) {
      throw ValidationError("'" + s + "' is not a finite number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

}  // namespace nrhc
