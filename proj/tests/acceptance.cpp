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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rismimo/experiments.hpp"

namespace rismimo {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Closed-form rate against Monte-Carlo at M = 64, K = 5, N in {16, 36, 64}.
Outcome bound_check() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.scenario.num_users = 5;
  cfg.sweep.antennas = {64};
  cfg.sweep.elements = {16, 36, 64};
  cfg.sweep.bound_power = 0.2;
  cfg.run.trials = 10000;
  const auto rows = bound_experiment(cfg);
  double worst_gap = 0.0;
  int above = 0;
  for (const auto& r : rows) {
    worst_gap = std::max(worst_gap, r.uatf_gap());
    if (!r.below_ergodic()) ++above;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = above == 0 && worst_gap <= 0.05 && secs <= 300.0;
  o.detail = "max UatF gap " + fmt("%.4f", worst_gap) + ", rows above ergodic " +
             std::to_string(above) + "/" + std::to_string(rows.size()) + ", " +
             fmt("%.1f s", secs);
  return o;
}

// 2. NMSE: MC within 2%, decreasing in pilot power and N, correlated below independent.
Outcome nmse_check() {
  ExperimentConfig cfg;
  cfg.scenario.num_antennas = 32;
  cfg.scenario.snr_offset_db = 0.0;
  cfg.sweep.elements = {16, 36, 64};
  cfg.sweep.pilot_powers = {1e-3, 1e-2, 1e-1, 1.0};
  cfg.run.trials = 10000;
  const auto rows = nmse_experiment(cfg);
  double worst = 0.0;
  // user-averaged closed form keyed by (correlated, N, P_p)
  std::map<std::tuple<bool, int, double>, double> avg;
  for (const auto& r : rows) {
    worst = std::max(worst, std::abs(r.rel_gap()));
    avg[{r.correlated, r.elements, r.pilot_power}] += r.closed / cfg.scenario.num_users;
  }
  int violations = 0;
  for (bool corr : {true, false}) {
    for (std::size_t i = 0; i < cfg.sweep.elements.size(); ++i) {
      for (std::size_t j = 0; j < cfg.sweep.pilot_powers.size(); ++j) {
        const int n = cfg.sweep.elements[i];
        const double pp = cfg.sweep.pilot_powers[j];
        const double v = avg[{corr, n, pp}];
        if (j + 1 < cfg.sweep.pilot_powers.size() &&
            !(avg[{corr, n, cfg.sweep.pilot_powers[j + 1]}] < v))
          ++violations;
        if (i + 1 < cfg.sweep.elements.size() &&
            !(avg[{corr, cfg.sweep.elements[i + 1], pp}] < v))
          ++violations;
        if (corr && !(v < avg[{false, n, pp}])) ++violations;
      }
    }
  }
  Outcome o;
  o.pass = worst <= 0.02 && violations == 0;
  o.detail = "max MC rel gap " + fmt("%.4f", worst) + ", ordering violations " +
             std::to_string(violations);
  return o;
}

struct SeedRun {
  std::unique_ptr<Scenario> sc;  // prob points into sc->stats
  OptimizationProblem prob;
  OptimizationResult proposed, random_phase, shannon;
};

// Shared by criteria 3, 4 and 8: M = 32, N = 16, K = 4, seeds 0..19.
const std::vector<SeedRun>& optimizer_runs() {
  static const std::vector<SeedRun> runs = [] {
    std::vector<SeedRun> out;
    ExperimentConfig cfg;
    cfg.scenario.num_antennas = 32;
    cfg.scenario.num_elements = 16;
    cfg.scenario.num_users = 4;
    const OptimizerOptions opt = optimizer_options(cfg);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SeedRun r;
      r.sc = std::make_unique<Scenario>(build_scenario(cfg.scenario, seed));
      r.prob = r.sc->problem();
      const PhaseShifts th0 = random_phases(cfg.scenario.num_elements, seed);
      r.proposed = alternating_optimize(r.prob, th0, opt);
      r.random_phase = fixed_phase_optimize(r.prob, th0, opt);
      r.shannon = shannon_phase_optimize(r.prob, th0, opt);
      out.push_back(std::move(r));
    }
    return out;
  }();
  return runs;
}

Outcome convergence_check() {
  int bad = 0, max_iter = 0;
  for (const auto& r : optimizer_runs()) {
    max_iter = std::max(max_iter, r.proposed.outer_iterations);
    if (!r.proposed.trace.monotone(1e-9) || r.proposed.outer_iterations > 10) ++bad;
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = "non-monotone or slow runs " + std::to_string(bad) + "/20, max outer iterations " +
             std::to_string(max_iter);
  return o;
}

Outcome baseline_check() {
  int beats = 0, shannon_only = 0, prop_feas = 0, rand_feas = 0, shan_feas = 0;
  for (const auto& r : optimizer_runs()) {
    if (r.proposed.wsr > r.random_phase.wsr) ++beats;
    if (r.shannon.feasible && !r.proposed.feasible) ++shannon_only;
    prop_feas += r.proposed.feasible;
    rand_feas += r.random_phase.feasible;
    shan_feas += r.shannon.feasible;
  }
  Outcome o;
  o.pass = beats >= 19 && shannon_only == 0;
  o.detail = "beats random-phase on " + std::to_string(beats) +
             "/20, Shannon-only feasible " + std::to_string(shannon_only) +
             ", feasible proposed/random/Shannon " + std::to_string(prop_feas) + "/" +
             std::to_string(rand_feas) + "/" + std::to_string(shan_feas);
  return o;
}

Outcome gradient_check_all() {
  const auto rows = gradcheck_experiment(1, 20, 6, 4, 3, 1e-6);
  double worst = 0.0;
  std::string where;
  for (const auto& r : rows) {
    if (r.rel_error > worst) {
      worst = r.rel_error;
      where = r.quantity;
    }
  }
  Outcome o;
  o.pass = worst <= 1e-5;
  o.detail = "max rel error " + fmt("%.3g", worst) + " (" + where + ") over " +
             std::to_string(rows.size()) + " checks";
  return o;
}

struct GpSetup {
  Scenario sc;
  SinrBreakdown bd;
  ScaCoefficients coeffs;
  RVector chi_req;
};

GpSetup gp_setup(int k_users, std::uint64_t seed) {
  ScenarioParams sp;
  sp.num_elements = 16;
  sp.num_users = k_users;
  sp.snr_offset_db = 20.0;
  GpSetup s{build_scenario(sp, seed), {}, {}, {}};
  const OptimizationProblem prob = s.sc.problem();
  s.bd = build_breakdown(PhaseWorkspace(s.sc.stats, s.sc.pilot, PhaseShifts::zeros(16)));
  const PowerAllocation p = PowerAllocation::uniform(k_users, s.sc.total_power);
  s.coeffs = update_sca(sinr_all(s.bd, p.p).cwiseMax(0.5), prob.model);
  sanitize_exponents(s.coeffs);
  s.chi_req = prob.chi_req;
  return s;
}

// 6. Power GP: full power for one user, grid oracle for two, KKT on 50 instances.
Outcome gp_check() {
  std::ostringstream msg;
  bool pass = true;
  {
    const GpSetup s = gp_setup(1, 3);
    const PowerStep st = solve_power_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power);
    const double rel = std::abs(st.power.p(0) - s.sc.total_power) / s.sc.total_power;
    pass &= st.gp.status == GpStatus::optimal && rel <= 1e-6;
    msg << "K=1 power gap " << fmt("%.2g", rel);
  }
  double worst_grid = 0.0;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const GpSetup s = gp_setup(2, seed);
    const PowerStep st = solve_power_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power);
    if (st.gp.status != GpStatus::optimal) {
      pass = false;
      continue;
    }
    const double gp_value = s.coeffs.w_hat.dot(st.chi.array().log().matrix());
    const int steps = 400;
    const double total = s.sc.total_power;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= steps; ++i) {
      for (int j = 1; i + j <= steps; ++j) {
        const RVector p = (RVector(2) << i * total / steps, j * total / steps).finished();
        const RVector gamma = sinr_all(s.bd, p);
        if (gamma(0) < s.chi_req(0) || gamma(1) < s.chi_req(1)) continue;
        best = std::max(best, s.coeffs.w_hat.dot(gamma.array().log().matrix()));
      }
    }
    const double gap = std::expm1(std::abs(gp_value - best));
    worst_grid = std::max(worst_grid, gap);
    pass &= std::isfinite(best) && gp_value >= best - 1e-9 && gap < 1e-3;
  }
  msg << ", K=2 grid gap " << fmt("%.2g", worst_grid);
  int solved = 0;
  double worst_kkt = 0.0;
  for (std::uint64_t seed = 100; solved < 50 && seed < 200; ++seed) {
    const GpSetup s = gp_setup(2 + static_cast<int>(seed % 3), seed);
    const PowerStep st = solve_power_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power);
    if (st.gp.status == GpStatus::infeasible) continue;
    pass &= st.gp.status == GpStatus::optimal;
    worst_kkt = std::max(worst_kkt, st.gp.kkt_residual);
    ++solved;
  }
  pass &= solved == 50 && worst_kkt <= 1e-8;
  msg << ", KKT max " << fmt("%.2g", worst_kkt) << " on " << solved << " instances";
  return {pass, msg.str()};
}

Outcome identity_check() {
  const auto rows = identity_experiment(100000, 1);
  int failed = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    if (!r.report.pass) ++failed;
    worst = std::max(worst, r.report.rel_dev);
  }
  Outcome o;
  o.pass = failed == 0;
  o.detail = "failed " + std::to_string(failed) + "/" + std::to_string(rows.size()) +
             ", max rel dev " + fmt("%.4f", worst);
  return o;
}

// 8. Any run whose feasibility stage reached Gamma >= 1 meets QoS above the SCA threshold.
Outcome feasibility_check() {
  int feasible_starts = 0, bad = 0;
  for (const auto& r : optimizer_runs()) {
    if (r.proposed.init.gamma < 1.0) continue;
    ++feasible_starts;
    const RVector& g = r.proposed.sinr;
    const bool ok = r.proposed.feasible && g.size() == r.prob.num_users() &&
                    meets_qos(r.prob, g, 1e-9) && g.minCoeff() > kSinrValidityThreshold;
    if (!ok) ++bad;
  }
  Outcome o;
  o.pass = bad == 0 && feasible_starts > 0;
  o.detail = "violations " + std::to_string(bad) + " among " + std::to_string(feasible_starts) +
             " feasible starts";
  return o;
}

}  // namespace
}  // namespace rismimo

int main() {
  using namespace rismimo;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 closed-form rate vs Monte-Carlo", bound_check},
      {"2 channel estimation NMSE", nmse_check},
      {"3 optimizer convergence", convergence_check},
      {"4 baseline comparison", baseline_check},
      {"5 analytic gradients", gradient_check_all},
      {"6 power allocation GP", gp_check},
      {"7 matrix moment identities", identity_check},
      {"8 feasibility and QoS", feasibility_check},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
