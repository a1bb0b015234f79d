// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Experiment drivers behind the command-line tool. Each returns typed rows;
// write_csv renders any of them with a '#'-prefixed provenance header so the
// files load directly in gnuplot.

#pragma once

#include <chrono>
#include <ostream>
#include <string>
#include <vector>

#include "rismimo/config.hpp"
#include "rismimo/gradcheck.hpp"
#include "rismimo/mc_oracle.hpp"

namespace rismimo {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

inline std::string cell(double v) { return detail::format_double(v); }
inline std::string cell(bool v) { return v ? "1" : "0"; }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(std::int64_t v) { return std::to_string(v); }
inline std::string cell(const std::string& v) { return v; }

inline void write_csv(std::ostream& out, const Table& t, const ExperimentConfig& cfg,
                      const std::string& experiment) {
  out << "# experiment=" << experiment << " config_hash=" << config_hash(cfg)
      << " seed=" << cfg.run.seed << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

inline McOptions mc_options(const ExperimentConfig& cfg) { return {20, cfg.run.threads}; }

inline OptimizerOptions optimizer_options(const ExperimentConfig& cfg) {
  OptimizerOptions o;
  o.zeta = cfg.zeta;
  o.max_outer = cfg.max_outer;
  return o;
}

/// Seed of the d-th user drop of a run.
inline std::uint64_t drop_seed(const ExperimentConfig& cfg, int drop) {
  return derive_seed(cfg.run.seed, static_cast<std::uint64_t>(drop), 0xD809ULL);
}

// ---- NMSE versus pilot power --------------------------------------------

struct NmseRow {
  int antennas = 0, elements = 0, user = 0;
  double pilot_power = 0.0;
  bool correlated = true;
  double closed = 0.0, mc = 0.0, mc_se = 0.0;

  double rel_gap() const { return (mc - closed) / closed; }
};

/// Phases fixed at zero; "independent" sets every correlation matrix to identity.
inline std::vector<NmseRow> nmse_experiment(const ExperimentConfig& cfg) {
  std::vector<NmseRow> out;
  for (int n : cfg.sweep.elements) {
    for (bool corr : {true, false}) {
      for (double pp : cfg.sweep.pilot_powers) {
        ScenarioParams sp = cfg.scenario;
        sp.num_elements = n;
        sp.correlated = corr;
        sp.pilot_power = pp;
        const Scenario sc = build_scenario(sp, cfg.run.seed);
        const PhaseShifts th = PhaseShifts::zeros(n);
        const auto mc = mc_nmse(sc.stats, th, sc.pilot, cfg.run.trials, cfg.run.seed,
                                mc_options(cfg));
        for (int k = 0; k < sp.num_users; ++k) {
          NmseRow r;
          r.antennas = sp.num_antennas;
          r.elements = n;
          r.user = k;
          r.pilot_power = pp;
          r.correlated = corr;
          r.closed = nmse(build_estimator(sc.stats, th, sc.pilot, k).r_filter, sc.stats.c_bs);
          r.mc = mc[k].mean;
          r.mc_se = mc[k].stderr_;
          out.push_back(r);
        }
      }
    }
  }
  return out;
}

inline Table to_table(const std::vector<NmseRow>& rows) {
  Table t{{"antennas", "elements", "correlated", "pilot_power", "user", "closed_form", "mc_mean",
           "mc_stderr", "rel_gap"},
          {}};
  for (const auto& r : rows)
    t.add({cell(r.antennas), cell(r.elements), cell(r.correlated), cell(r.pilot_power),
           cell(r.user), cell(r.closed), cell(r.mc), cell(r.mc_se), cell(r.rel_gap())});
  return t;
}

// ---- Closed-form rate versus Monte-Carlo ergodic rate -------------------

struct BoundRow {
  int antennas = 0, elements = 0, user = 0;
  double closed = 0.0;
  Estimate uatf, per_realization;

  double uatf_gap() const { return std::abs(closed - uatf.mean) / std::abs(uatf.mean); }
  bool below_ergodic() const {
    return closed <= per_realization.mean + 2.0 * per_realization.stderr_;
  }
};

/// Equal per-user power sweep.bound_power, phases drawn from the run seed.
inline std::vector<BoundRow> bound_experiment(const ExperimentConfig& cfg) {
  std::vector<BoundRow> out;
  for (int m : cfg.sweep.antennas) {
    for (int n : cfg.sweep.elements) {
      ScenarioParams sp = cfg.scenario;
      sp.num_antennas = m;
      sp.num_elements = n;
      const Scenario sc = build_scenario(sp, cfg.run.seed);
      const OptimizationProblem prob = sc.problem();
      const PhaseShifts th = random_phases(n, cfg.run.seed);
      const RVector p = RVector::Constant(sp.num_users, cfg.sweep.bound_power);
      const SinrBreakdown bd = build_breakdown(PhaseWorkspace(sc.stats, sc.pilot, th));
      const McRate mc = mc_ergodic_rate(sc.stats, th, sc.pilot, p, prob.model, cfg.run.trials,
                                        cfg.run.seed, mc_options(cfg));
      for (int k = 0; k < sp.num_users; ++k) {
        BoundRow r;
        r.antennas = m;
        r.elements = n;
        r.user = k;
        r.closed = prob.model.rate(k, sinr_hat(bd, p, k));
        r.uatf = mc.uatf[k];
        r.per_realization = mc.per_realization[k];
        out.push_back(r);
      }
    }
  }
  return out;
}

inline Table to_table(const std::vector<BoundRow>& rows) {
  Table t{{"antennas", "elements", "user", "closed_form", "uatf_mc", "uatf_stderr",
           "ergodic_mc", "ergodic_stderr", "uatf_rel_gap", "below_ergodic"},
          {}};
  for (const auto& r : rows)
    t.add({cell(r.antennas), cell(r.elements), cell(r.user), cell(r.closed), cell(r.uatf.mean),
           cell(r.uatf.stderr_), cell(r.per_realization.mean), cell(r.per_realization.stderr_),
           cell(r.uatf_gap()), cell(r.below_ergodic())});
  return t;
}

// ---- Optimizer convergence trace -----------------------------------------

inline OptimizationResult converge_experiment(const ExperimentConfig& cfg) {
  const Scenario sc = build_scenario(cfg.scenario, cfg.run.seed);
  return alternating_optimize(sc.problem(), random_phases(cfg.scenario.num_elements, cfg.run.seed),
                              optimizer_options(cfg));
}

inline Table to_table(const OptimizationTrace& trace) {
  Table t{{"iter", "wsr", "min_sinr", "min_rate_slack", "grad_norm", "gp_kkt", "inner_iterations",
           "gradient_evals", "gp_solves", "power_kept", "wall_ms"},
          {}};
  for (const auto& r : trace.rows)
    t.add({cell(r.iter), cell(r.wsr), cell(r.gamma.size() ? r.gamma.minCoeff() : 0.0),
           cell(r.min_slack), cell(r.grad_norm), cell(r.gp_kkt), cell(r.inner_iterations),
           cell(r.gradient_evals), cell(r.gp_solves), cell(r.power_kept), cell(r.wall_ms)});
  return t;
}

// ---- Proposed method against the two baselines ---------------------------

struct MethodRow {
  int drop = 0;
  std::string method;
  bool feasible = false;
  double wsr = 0.0;
  double min_rate_slack = 0.0;
  int outer_iterations = 0;
  double wall_ms = 0.0;
};

struct DropComparison {
  MethodRow proposed, random_phase, shannon_phase;
};

inline DropComparison compare_methods(const ScenarioParams& sp, std::uint64_t seed, int drop,
                                      const OptimizerOptions& opt) {
  const Scenario sc = build_scenario(sp, seed);
  const OptimizationProblem prob = sc.problem();
  const PhaseShifts th0 = random_phases(sp.num_elements, seed);
  auto run = [&](const std::string& name, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    const OptimizationResult r = fn();
    MethodRow row;
    row.drop = drop;
    row.method = name;
    row.feasible = r.feasible;
    row.wsr = r.wsr;
    row.min_rate_slack = r.sinr.size() ? min_rate_slack(prob, r.sinr) : 0.0;
    row.outer_iterations = r.outer_iterations;
    row.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
  };
  DropComparison c;
  c.proposed = run("proposed", [&] { return alternating_optimize(prob, th0, opt); });
  c.random_phase = run("random_phase_gp", [&] { return fixed_phase_optimize(prob, th0, opt); });
  c.shannon_phase = run("shannon_phase", [&] { return shannon_phase_optimize(prob, th0, opt); });
  return c;
}

inline std::vector<DropComparison> optimize_experiment(const ExperimentConfig& cfg) {
  std::vector<DropComparison> out;
  for (int d = 0; d < cfg.run.drops; ++d)
    out.push_back(compare_methods(cfg.scenario, drop_seed(cfg, d), d, optimizer_options(cfg)));
  return out;
}

inline Table to_table(const std::vector<DropComparison>& drops) {
  Table t{{"drop", "method", "feasible", "wsr", "min_rate_slack", "outer_iterations", "wall_ms"},
          {}};
  for (const auto& d : drops)
    for (const MethodRow* r : {&d.proposed, &d.random_phase, &d.shannon_phase})
      t.add({cell(r->drop), r->method, cell(r->feasible), cell(r->wsr), cell(r->min_rate_slack),
             cell(r->outer_iterations), cell(r->wall_ms)});
  return t;
}

// ---- WSR versus number of reflecting elements ----------------------------

struct SweepRow {
  int elements = 0;
  std::string method;
  double mean_wsr = 0.0;  // infeasible drops count as zero
  double feasible_fraction = 0.0;
};

inline std::vector<SweepRow> sweep_experiment(const ExperimentConfig& cfg) {
  std::vector<SweepRow> out;
  for (int n : cfg.sweep.elements) {
    ScenarioParams sp = cfg.scenario;
    sp.num_elements = n;
    SweepRow rows[3];
    const char* names[3] = {"proposed", "random_phase_gp", "shannon_phase"};
    for (int d = 0; d < cfg.run.sweep_drops; ++d) {
      const DropComparison c = compare_methods(sp, drop_seed(cfg, d), d, optimizer_options(cfg));
      const MethodRow* m[3] = {&c.proposed, &c.random_phase, &c.shannon_phase};
      for (int i = 0; i < 3; ++i) {
        rows[i].mean_wsr += m[i]->wsr / cfg.run.sweep_drops;
        rows[i].feasible_fraction += (m[i]->feasible ? 1.0 : 0.0) / cfg.run.sweep_drops;
      }
    }
    for (int i = 0; i < 3; ++i) {
      rows[i].elements = n;
      rows[i].method = names[i];
      out.push_back(rows[i]);
    }
  }
  return out;
}

inline Table to_table(const std::vector<SweepRow>& rows) {
  Table t{{"elements", "method", "mean_wsr", "feasible_fraction"}, {}};
  for (const auto& r : rows)
    t.add({cell(r.elements), r.method, cell(r.mean_wsr), cell(r.feasible_fraction)});
  return t;
}

// ---- Gradient audit -------------------------------------------------------

struct GradcheckRow {
  int instance = 0;
  std::string quantity;
  double rel_error = 0.0;
};

inline std::vector<GradcheckRow> gradcheck_experiment(std::uint64_t seed, int instances = 20,
                                                      int m = 6, int n = 4, int k_users = 3,
                                                      double h = 1e-6) {
  std::vector<GradcheckRow> out;
  for (int i = 0; i < instances; ++i) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i), 0x96ADULL);
    const SmallInstance inst = random_instance(s, m, n, k_users);
    Engine rng = make_engine(s, 0, 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    WeightedRateModel model;
    model.weights.resize(k_users);
    model.alphas.resize(k_users);
    RVector p(k_users);
    for (int k = 0; k < k_users; ++k) {
      model.weights(k) = 1.0 - unif(rng);
      model.alphas(k) = 0.1 + 0.4 * unif(rng);
      p(k) = 0.2 + unif(rng);
    }
    model.eta = 0.025;
    for (const auto& row : gradient_check(inst, model, p, h))
      out.push_back({i, row.quantity, row.rel_error});
  }
  return out;
}

inline Table to_table(const std::vector<GradcheckRow>& rows) {
  Table t{{"instance", "quantity", "rel_error"}, {}};
  for (const auto& r : rows) t.add({cell(r.instance), r.quantity, cell(r.rel_error)});
  return t;
}

// ---- Matrix identity checks ------------------------------------------------

struct IdentityRow {
  std::string identity;
  int m = 0, n = 0;
  IdentityReport report;
};

inline std::vector<IdentityRow> identity_experiment(std::int64_t trials, std::uint64_t seed,
                                                    const McOptions& opt = {}) {
  std::vector<IdentityRow> out;
  const std::pair<int, int> dims[] = {{2, 2}, {4, 3}, {8, 8}};
  for (const auto& [m, n] : dims) {
    out.push_back({"second_moment", m, n, check_second_moment(m, n, trials, seed, 0.02, opt)});
    out.push_back({"fourth_moment", m, n, check_fourth_moment(m, n, trials, seed, 0.02, opt)});
  }
  return out;
}

inline Table to_table(const std::vector<IdentityRow>& rows) {
  Table t{{"identity", "m", "n", "trials", "rel_frobenius_dev", "tol", "pass"}, {}};
  for (const auto& r : rows)
    t.add({r.identity, cell(r.m), cell(r.n), cell(r.report.trials), cell(r.report.rel_dev),
           cell(r.report.tol), cell(r.report.pass)});
  return t;
}

}  // namespace rismimo
