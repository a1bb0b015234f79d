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


// Alternating weighted-sum-rate maximization: SCA + GP power allocation at
// fixed phases, accelerated gradient ascent on phases at fixed power, and a
// max-min feasibility initialization.

#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rismimo/gp_solver.hpp"
#include "rismimo/phase_gradient.hpp"

namespace rismimo {

struct PowerAllocation {
  RVector p;

  int num_users() const { return static_cast<int>(p.size()); }

  void validate(double total_power) const {
    detail::require((p.array() > 0.0).all(), "PowerAllocation: powers must be positive");
    detail::require(p.sum() <= total_power + 1e-9, "PowerAllocation: total power exceeded");
  }

  static PowerAllocation uniform(int k_users, double total_power) {
    return {RVector::Constant(k_users, total_power / k_users)};
  }
};

/// Everything the optimizer needs besides the phase vector.
struct OptimizationProblem {
  const ChannelStatistics* stats = nullptr;
  PilotConfig pilot;
  WeightedRateModel model;
  RVector rate_req;  // R_k^req, bits/s/Hz
  RVector chi_min;   // SINR meeting R_k^req exactly
  RVector chi_req;   // GP lower bound on chi: chi_min with margin, above the validity threshold
  double total_power = 1.0;

  int num_users() const { return model.num_users(); }
};

inline OptimizationProblem make_problem(const ChannelStatistics& stats, const PilotConfig& pilot,
                                        const std::vector<QosTarget>& targets,
                                        const BlocklengthBudget& budget, double total_power) {
  stats.validate();
  detail::require(static_cast<int>(targets.size()) == stats.num_users(),
                  "make_problem: one QoS target per user required");
  detail::require(total_power > 0.0, "make_problem: total power must be positive");
  OptimizationProblem prob;
  prob.stats = &stats;
  prob.pilot = pilot;
  prob.model = make_rate_model(targets, budget);
  prob.total_power = total_power;
  const int k_users = stats.num_users();
  prob.rate_req.resize(k_users);
  prob.chi_min.resize(k_users);
  prob.chi_req.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    prob.rate_req(k) = targets[k].rate_req;
    prob.chi_min(k) = chi_min(targets[k], budget);
    prob.chi_req(k) =
        std::max(prob.chi_min(k) * (1.0 + 1e-7), kSinrValidityThreshold * (1.0 + 1e-6));
  }
  return prob;
}

/// Per-user rates and QoS status at a given SINR vector.
inline bool meets_qos(const OptimizationProblem& prob, const RVector& gamma, double slack = 1e-9) {
  for (int k = 0; k < prob.num_users(); ++k) {
    if (!(gamma(k) > kSinrValidityThreshold)) return false;
    if (prob.model.rate(k, gamma(k)) < prob.rate_req(k) - slack) return false;
  }
  return true;
}

inline double min_rate_slack(const OptimizationProblem& prob, const RVector& gamma) {
  double slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < prob.num_users(); ++k)
    slack = std::min(slack, prob.model.rate(k, gamma(k)) - prob.rate_req(k));
  return slack;
}

// ---------------------------------------------------------------- SCA ----

struct ScaCoefficients {
  RVector rho, delta, rho_hat, delta_hat;
  RVector w_bar, w_tilde;
  RVector w_hat;  // w_bar (rho - alpha rho_hat); exponent of chi_k in the GP objective
};

inline ScaCoefficients update_sca(const RVector& chi, const WeightedRateModel& model) {
  const int k_users = model.num_users();
  detail::require(chi.size() == k_users, "update_sca: size mismatch");
  detail::require((chi.array() > 0.0).all(), "update_sca: chi must be positive");
  ScaCoefficients c;
  c.rho.resize(k_users);
  c.delta.resize(k_users);
  c.rho_hat.resize(k_users);
  c.delta_hat.resize(k_users);
  c.w_bar.resize(k_users);
  c.w_tilde.resize(k_users);
  c.w_hat.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double x = chi(k);
    const double lx = std::log(x);
    c.rho(k) = x / (1.0 + x);
    c.delta(k) = std::log1p(x) - c.rho(k) * lx;
    c.rho_hat(k) = x / ((1.0 + x) * (1.0 + x) * std::sqrt(x * x + 2.0 * x));
    c.delta_hat(k) = std::sqrt(1.0 - 1.0 / ((1.0 + x) * (1.0 + x))) - c.rho_hat(k) * lx;
    c.w_bar(k) = model.weights(k) * (1.0 - model.eta) / kLn2;
    c.w_tilde(k) = c.w_bar(k) * model.alphas(k);
    c.w_hat(k) = c.w_bar(k) * (c.rho(k) - model.alphas(k) * c.rho_hat(k));
  }
  return c;
}

/// Surrogate weighted sum rate at chi (a global lower bound above the threshold).
inline double sca_surrogate(const ScaCoefficients& c, const RVector& chi) {
  double total = 0.0;
  for (int k = 0; k < chi.size(); ++k) {
    const double lx = std::log(chi(k));
    total += c.w_bar(k) * (c.rho(k) * lx + c.delta(k)) -
             c.w_tilde(k) * (c.rho_hat(k) * lx + c.delta_hat(k));
  }
  return total;
}

/// Replaces non-positive exponents by 1e-6; returns the number replaced.
inline int sanitize_exponents(ScaCoefficients& c) {
  int replaced = 0;
  for (int k = 0; k < c.w_hat.size(); ++k) {
    if (!(c.w_hat(k) > 0.0)) {
      c.w_hat(k) = 1e-6;
      ++replaced;
    }
  }
  return replaced;
}

// ----------------------------------------------------------------- GP ----

namespace detail {

inline Monomial unit_monomial(int n) { return {1.0, RVector::Zero(n)}; }

// SINR constraint of user k scaled by `target_scale` (chi_k or Gamma chi_req_k),
// whose exponent is placed in column `scale_col` with coefficient `scale_coeff`.
inline Posynomial sinr_constraint(const SinrBreakdown& bd, int k, int n, int scale_col,
                                  double scale_coeff) {
  const int k_users = bd.num_users();
  const double s = bd.signal(k);
  detail::require(s > 0.0, "build_gp: signal term must be positive");
  Posynomial c;
  c.label = "sinr_" + std::to_string(k);
  Monomial self = unit_monomial(n);
  self.coeff = scale_coeff * (bd.leakage_coeff(k) + bd.interference(k, k)) / s;
  self.exponents(scale_col) = 1.0;
  if (self.coeff > 0.0) c.terms.push_back(self);
  for (int kp = 0; kp < k_users; ++kp) {
    if (kp == k || !(bd.interference(k, kp) > 0.0)) continue;
    Monomial t = unit_monomial(n);
    t.coeff = scale_coeff * bd.interference(k, kp) / s;
    t.exponents(scale_col) = 1.0;
    t.exponents(kp) = 1.0;
    t.exponents(k) = -1.0;
    c.terms.push_back(t);
  }
  Monomial noise = unit_monomial(n);
  noise.coeff = scale_coeff * bd.noise / s;
  noise.exponents(scale_col) = 1.0;
  noise.exponents(k) = -1.0;
  c.terms.push_back(noise);
  return c;
}

inline Posynomial power_constraint(int k_users, int n, double total_power) {
  Posynomial c;
  c.label = "power";
  for (int k = 0; k < k_users; ++k) {
    Monomial t = unit_monomial(n);
    t.coeff = 1.0 / total_power;
    t.exponents(k) = 1.0;
    c.terms.push_back(t);
  }
  return c;
}

}  // namespace detail

/// Variables [p_1..p_K, chi_1..chi_K]; maximize prod chi_k^{w_hat_k}.
inline GpInstance build_gp(const SinrBreakdown& bd, const ScaCoefficients& coeffs,
                           const RVector& chi_req, double total_power) {
  const int k_users = bd.num_users();
  detail::require(coeffs.w_hat.size() == k_users && chi_req.size() == k_users,
                  "build_gp: size mismatch");
  for (int k = 0; k < k_users; ++k) {
    if (!(coeffs.w_hat(k) > 0.0))
      throw CoefficientDegeneracyError("build_gp: non-positive SCA exponent for user " +
                                       std::to_string(k));
  }
  const int n = 2 * k_users;
  GpInstance gp;
  gp.num_vars = n;
  gp.objective = detail::unit_monomial(n);
  gp.objective.exponents.tail(k_users) = -coeffs.w_hat;
  for (int k = 0; k < k_users; ++k)
    gp.constraints.push_back(detail::sinr_constraint(bd, k, n, k_users + k, 1.0));
  for (int k = 0; k < k_users; ++k) {
    Posynomial c;
    c.label = "chi_min_" + std::to_string(k);
    Monomial t = detail::unit_monomial(n);
    t.coeff = chi_req(k);
    t.exponents(k_users + k) = -1.0;
    c.terms.push_back(t);
    gp.constraints.push_back(c);
  }
  gp.constraints.push_back(detail::power_constraint(k_users, n, total_power));
  return gp;
}

/// Variables [p_1..p_K, Gamma]; maximize Gamma s.t. gamma_k >= Gamma chi_req_k.
inline GpInstance build_feasibility_gp(const SinrBreakdown& bd, const RVector& chi_req,
                                       double total_power) {
  const int k_users = bd.num_users();
  detail::require(chi_req.size() == k_users, "build_feasibility_gp: size mismatch");
  const int n = k_users + 1;
  GpInstance gp;
  gp.num_vars = n;
  gp.objective = detail::unit_monomial(n);
  gp.objective.exponents(k_users) = -1.0;
  for (int k = 0; k < k_users; ++k)
    gp.constraints.push_back(detail::sinr_constraint(bd, k, n, k_users, chi_req(k)));
  gp.constraints.push_back(detail::power_constraint(k_users, n, total_power));
  return gp;
}

struct PowerStep {
  GpResult gp;
  PowerAllocation power;
  RVector chi;       // SINR targets (or Gamma chi_req for the feasibility GP)
  double gamma = 0;  // feasibility GP only
};

inline PowerStep solve_power_gp(const SinrBreakdown& bd, const ScaCoefficients& coeffs,
                                const RVector& chi_req, double total_power,
                                const PowerAllocation* start = nullptr,
                                const GpOptions& opt = {}) {
  GpInstance gp = build_gp(bd, coeffs, chi_req, total_power);
  const int k_users = bd.num_users();
  if (start != nullptr) {
    gp.start.resize(2 * k_users);
    gp.start.head(k_users) = start->p;
    gp.start.tail(k_users) = chi_req;
  }
  PowerStep out;
  out.gp = solve_gp(gp, opt);
  out.power.p = out.gp.x.head(k_users);
  out.chi = out.gp.x.tail(k_users);
  return out;
}

inline PowerStep solve_feasibility_gp(const SinrBreakdown& bd, const RVector& chi_req,
                                      double total_power, const GpOptions& opt = {}) {
  GpInstance gp = build_feasibility_gp(bd, chi_req, total_power);
  const int k_users = bd.num_users();
  gp.start = RVector::Constant(k_users + 1, total_power / (2.0 * k_users));
  gp.start(k_users) = 1e-12;
  PowerStep out;
  out.gp = solve_gp(gp, opt);
  out.power.p = out.gp.x.head(k_users);
  out.gamma = out.gp.x(k_users);
  out.chi = out.gamma * chi_req;
  return out;
}

// ---------------------------------------------------------- phase step ----

struct AscentOptions {
  double initial_step = 1.0;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_halvings = 50;
  double gain_tol = 1e-5;
  int max_iterations = 200;
};

/// Objective value, admissibility and (optionally) gradient at a phase vector.
struct PhaseEval {
  double objective = 0.0;
  bool admissible = true;
  RVector grad;
};

using PhaseEvaluator = std::function<PhaseEval(const PhaseShifts&, bool need_grad)>;

struct AscentResult {
  PhaseShifts theta;
  double objective = 0.0;
  int iterations = 0;
  int gradient_evals = 0;
  int restarts = 0;
  double last_grad_norm = 0.0;
  std::vector<double> history;  // objective after each accepted step
};

/// Monotone accelerated gradient ascent with backtracking. theta0 must be admissible.
inline AscentResult phase_ascent(const PhaseShifts& theta0, const PhaseEvaluator& eval,
                                 const AscentOptions& opt = {}) {
  AscentResult out;
  RVector x = theta0.values();
  PhaseEval fx = eval(theta0, false);
  out.history.push_back(fx.objective);
  RVector y = x, x_prev = x;
  double a = 1.0;
  bool at_momentum = false;
  while (out.iterations < opt.max_iterations) {
    ++out.iterations;
    const PhaseEval fy = eval(PhaseShifts(y), true);
    ++out.gradient_evals;
    const RVector& g = fy.grad;
    const double g2 = g.squaredNorm();
    out.last_grad_norm = std::sqrt(g2);
    if (!(g2 > 0.0) || !std::isfinite(g2)) {
      if (at_momentum) {
        y = x;
        a = 1.0;
        at_momentum = false;
        ++out.restarts;
        continue;
      }
      break;
    }
    double step = opt.initial_step;
    bool accepted = false;
    RVector cand;
    PhaseEval fc;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      cand = y + step * g;
      fc = eval(PhaseShifts(cand), false);
      if (fc.admissible && std::isfinite(fc.objective) &&
          fc.objective >= fy.objective + opt.armijo * step * g2 && fc.objective >= fx.objective) {
        accepted = true;
        break;
      }
      step *= opt.shrink;
    }
    if (!accepted) {
      if (at_momentum) {
        // Momentum point did not lead to an improvement: restart from x.
        y = x;
        a = 1.0;
        at_momentum = false;
        ++out.restarts;
        continue;
      }
      break;
    }
    const double gain = fc.objective - fx.objective;
    x_prev = x;
    x = cand;
    fx = fc;
    out.history.push_back(fx.objective);
    const double a_next = 0.5 * (1.0 + std::sqrt(4.0 * a * a + 1.0));
    y = x + ((a - 1.0) / a_next) * (x - x_prev);
    at_momentum = a > 1.0;
    a = a_next;
    if (gain < opt.gain_tol) break;
  }
  out.theta = PhaseShifts(x);
  out.objective = fx.objective;
  return out;
}

// ---------------------------------------------------- alternating loop ----

struct OptimizerOptions {
  double zeta = 1e-3;
  int max_outer = 50;
  AscentOptions ascent;
  GpOptions gp;
  double feasibility_temperature = 0.05;
  int feasibility_max_iter = 20;
  double feasibility_tol = 1e-3;
};

struct TraceRow {
  int iter = 0;
  double wsr = 0.0;
  RVector gamma;
  RVector p;
  double min_slack = 0.0;
  double grad_norm = 0.0;
  double gp_kkt = 0.0;
  double wall_ms = 0.0;
  int inner_iterations = 0;
  int gradient_evals = 0;
  int gp_solves = 0;
  bool power_kept = false;
};

struct OptimizationTrace {
  std::vector<TraceRow> rows;
  std::vector<std::string> warnings;

  bool monotone(double slack = 1e-9) const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].wsr < rows[i - 1].wsr - slack) return false;
    return true;
  }
};

struct FeasibilityResult {
  PhaseShifts theta;
  PowerAllocation power;
  double gamma = 0.0;  // common target scaling; >= 1 means feasible
  int iterations = 0;
  std::vector<double> history;
};

struct OptimizationResult {
  bool feasible = false;
  PhaseShifts theta;
  PowerAllocation power;
  RVector sinr;
  double wsr = 0.0;
  FeasibilityResult init;
  OptimizationTrace trace;
  int outer_iterations = 0;
};

/// Closed-form SINR vector at (theta, p).
inline RVector evaluate_sinr(const OptimizationProblem& prob, const PhaseShifts& theta,
                             const PowerAllocation& power) {
  PhaseWorkspace ws(*prob.stats, prob.pilot, theta);
  return sinr_all(build_breakdown(ws), power.p);
}

inline double evaluate_wsr(const OptimizationProblem& prob, const PhaseShifts& theta,
                           const PowerAllocation& power) {
  return prob.model.wsr(evaluate_sinr(prob, theta, power));
}

namespace detail {

// WSR objective at fixed power; admissible when every user keeps its QoS.
inline PhaseEvaluator wsr_evaluator(const OptimizationProblem& prob, const PowerAllocation& power,
                                    const WeightedRateModel& model, bool enforce_qos) {
  return [&prob, power, model, enforce_qos](const PhaseShifts& th, bool need_grad) {
    PhaseWorkspace ws(*prob.stats, prob.pilot, th);
    const SinrBreakdown bd = build_breakdown(ws);
    const RVector gamma = sinr_all(bd, power.p);
    PhaseEval out;
    out.objective = model.wsr(gamma);
    if (enforce_qos) {
      for (int k = 0; k < prob.num_users(); ++k)
        if (!(gamma(k) >= prob.chi_min(k)) || !(gamma(k) > kSinrValidityThreshold))
          out.admissible = false;
    }
    if (need_grad) {
      GradientWorkspace gw(ws);
      out.grad = grad_wsr(model, bd, power.p, gw);
    }
    return out;
  };
}

// Smoothed min over k of log(gamma_k / chi_req_k) at fixed power.
inline PhaseEvaluator smoothed_min_evaluator(const OptimizationProblem& prob,
                                             const PowerAllocation& power, double temperature) {
  return [&prob, power, temperature](const PhaseShifts& th, bool need_grad) {
    PhaseWorkspace ws(*prob.stats, prob.pilot, th);
    const SinrBreakdown bd = build_breakdown(ws);
    const int k_users = prob.num_users();
    RVector u(k_users);
    for (int k = 0; k < k_users; ++k)
      u(k) = std::log(sinr_hat(bd, power.p, k) / prob.chi_req(k));
    const double umin = u.minCoeff();
    const RVector e = (-(u.array() - umin) / temperature).exp().matrix();
    PhaseEval out;
    out.objective = umin - temperature * std::log(e.sum());
    if (need_grad) {
      GradientWorkspace gw(ws);
      const RVector pi = e / e.sum();
      out.grad = RVector::Zero(th.size());
      for (int k = 0; k < k_users; ++k) {
        const double gamma = sinr_hat(bd, power.p, k);
        out.grad += (pi(k) / gamma) * grad_sinr(k, bd, power.p, gw);
      }
    }
    return out;
  };
}

inline double min_scaled_sinr(const OptimizationProblem& prob, const RVector& gamma) {
  return (gamma.array() / prob.chi_req.array()).minCoeff();
}

}  // namespace detail

/// Max-min initialization: alternate the Gamma-GP with phase ascent on a
/// smoothed min of log(gamma_k / chi_req_k).
inline FeasibilityResult find_feasible(const OptimizationProblem& prob, const PhaseShifts& theta0,
                                       const OptimizerOptions& opt = {}) {
  FeasibilityResult out;
  out.theta = theta0;
  out.power = PowerAllocation::uniform(prob.num_users(), prob.total_power);
  {
    PhaseWorkspace ws(*prob.stats, prob.pilot, out.theta);
    out.gamma = detail::min_scaled_sinr(prob, sinr_all(build_breakdown(ws), out.power.p));
  }
  for (int it = 0; it < opt.feasibility_max_iter; ++it) {
    ++out.iterations;
    const double before = out.gamma;
    PhaseWorkspace ws(*prob.stats, prob.pilot, out.theta);
    const SinrBreakdown bd = build_breakdown(ws);
    const PowerStep step = solve_feasibility_gp(bd, prob.chi_req, prob.total_power, opt.gp);
    if (step.gp.status == GpStatus::optimal) {
      const PowerAllocation cand{step.power.p * std::min(1.0, prob.total_power / step.power.p.sum())};
      const double g = detail::min_scaled_sinr(prob, sinr_all(bd, cand.p));
      if (g >= out.gamma) {
        out.gamma = g;
        out.power = cand;
      }
    }
    const AscentResult asc = phase_ascent(
        out.theta, detail::smoothed_min_evaluator(prob, out.power, opt.feasibility_temperature),
        opt.ascent);
    const double g_new =
        detail::min_scaled_sinr(prob, evaluate_sinr(prob, asc.theta, out.power));
    if (g_new > out.gamma) {
      out.gamma = g_new;
      out.theta = asc.theta;
    }
    out.history.push_back(out.gamma);
    if (out.gamma - before <= opt.feasibility_tol * std::abs(before)) break;
  }
  return out;
}

namespace detail {

// One SCA + GP power update at fixed phases. Keeps the old power if the GP
// fails or would lower the WSR.
inline PowerAllocation power_update(const OptimizationProblem& prob, const SinrBreakdown& bd,
                                    const PowerAllocation& power, const OptimizerOptions& opt,
                                    TraceRow& row, OptimizationTrace& trace) {
  const RVector gamma = sinr_all(bd, power.p);
  ScaCoefficients coeffs = update_sca(gamma, prob.model);
  if (const int bad = sanitize_exponents(coeffs); bad > 0)
    trace.warnings.push_back("iteration " + std::to_string(row.iter) + ": " +
                             std::to_string(bad) + " SCA exponent(s) replaced by 1e-6");
  const PowerStep step = solve_power_gp(bd, coeffs, prob.chi_req, prob.total_power, &power, opt.gp);
  ++row.gp_solves;
  row.gp_kkt = step.gp.kkt_residual;
  if (step.gp.status != GpStatus::optimal) {
    trace.warnings.push_back("iteration " + std::to_string(row.iter) + ": GP " +
                             to_string(step.gp.status) + ", power kept");
    row.power_kept = true;
    return power;
  }
  PowerAllocation cand = step.power;
  if (cand.p.sum() > prob.total_power) cand.p *= prob.total_power / cand.p.sum();
  const RVector g_new = sinr_all(bd, cand.p);
  const bool qos = meets_qos(prob, g_new, 0.0);
  if (!qos || prob.model.wsr(g_new) < prob.model.wsr(gamma)) {
    row.power_kept = true;
    return power;
  }
  return cand;
}

}  // namespace detail

/// Alternating optimization from a feasible starting point.
inline OptimizationResult alternating_optimize(const OptimizationProblem& prob,
                                               const PhaseShifts& theta0,
                                               const OptimizerOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  OptimizationResult res;
  res.init = find_feasible(prob, theta0, opt);
  res.theta = res.init.theta;
  res.power = res.init.power;
  res.sinr = evaluate_sinr(prob, res.theta, res.power);
  if (res.init.gamma < 1.0 || !meets_qos(prob, res.sinr, 0.0)) {
    res.feasible = false;
    res.wsr = 0.0;
    return res;
  }
  res.feasible = true;
  double prev = 0.0;  // WSR^(0) = 0
  {
    TraceRow row;
    row.iter = 0;
    row.wsr = prob.model.wsr(res.sinr);
    row.gamma = res.sinr;
    row.p = res.power.p;
    row.min_slack = min_rate_slack(prob, res.sinr);
    res.trace.rows.push_back(row);
  }
  for (int i = 1; i <= opt.max_outer; ++i) {
    const auto t0 = clock::now();
    TraceRow row;
    row.iter = i;
    {
      PhaseWorkspace ws(*prob.stats, prob.pilot, res.theta);
      const SinrBreakdown bd = build_breakdown(ws);
      res.power = detail::power_update(prob, bd, res.power, opt, row, res.trace);
    }
    const AscentResult asc = phase_ascent(
        res.theta, detail::wsr_evaluator(prob, res.power, prob.model, true), opt.ascent);
    res.theta = asc.theta;
    row.inner_iterations = asc.iterations;
    row.gradient_evals = asc.gradient_evals;
    row.grad_norm = asc.last_grad_norm;
    res.sinr = evaluate_sinr(prob, res.theta, res.power);
    row.wsr = prob.model.wsr(res.sinr);
    row.gamma = res.sinr;
    row.p = res.power.p;
    row.min_slack = min_rate_slack(prob, res.sinr);
    row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    res.trace.rows.push_back(row);
    res.outer_iterations = i;
    const double rel = prev > 0.0 ? (row.wsr - prev) / prev : std::numeric_limits<double>::infinity();
    prev = row.wsr;
    if (rel < opt.zeta) break;
  }
  res.wsr = prob.model.wsr(res.sinr);
  res.theta = res.theta.wrapped();
  return res;
}

// ------------------------------------------------------------ baselines ----

/// Power-only optimization at fixed phases (the "GP + random phase" baseline).
inline OptimizationResult fixed_phase_optimize(const OptimizationProblem& prob,
                                               const PhaseShifts& theta,
                                               const OptimizerOptions& opt = {}) {
  OptimizerOptions fixed = opt;
  fixed.ascent.max_iterations = 0;
  OptimizationResult res;
  res.theta = theta;
  PhaseWorkspace ws(*prob.stats, prob.pilot, theta);
  const SinrBreakdown bd = build_breakdown(ws);
  const PowerStep init = solve_feasibility_gp(bd, prob.chi_req, prob.total_power, opt.gp);
  res.init.theta = theta;
  res.init.gamma = init.gamma;
  res.init.power = init.power;
  res.power = init.power;
  res.sinr = sinr_all(bd, res.power.p);
  if (init.gp.status != GpStatus::optimal || init.gamma < 1.0 || !meets_qos(prob, res.sinr, 0.0)) {
    res.feasible = false;
    return res;
  }
  res.feasible = true;
  double prev = 0.0;
  for (int i = 1; i <= opt.max_outer; ++i) {
    TraceRow row;
    row.iter = i;
    res.power = detail::power_update(prob, bd, res.power, opt, row, res.trace);
    res.sinr = sinr_all(bd, res.power.p);
    row.wsr = prob.model.wsr(res.sinr);
    row.gamma = res.sinr;
    row.p = res.power.p;
    row.min_slack = min_rate_slack(prob, res.sinr);
    res.trace.rows.push_back(row);
    res.outer_iterations = i;
    const double rel = prev > 0.0 ? (row.wsr - prev) / prev : std::numeric_limits<double>::infinity();
    prev = row.wsr;
    if (rel < opt.zeta) break;
  }
  res.wsr = prob.model.wsr(res.sinr);
  return res;
}

/// Phases ascended on the infinite-blocklength (alpha = 0) objective without
/// QoS rejection; power from the same SCA-GP. `feasible` reports whether the
/// final point meets every finite-blocklength QoS target.
inline OptimizationResult shannon_phase_optimize(const OptimizationProblem& prob,
                                                 const PhaseShifts& theta0,
                                                 const OptimizerOptions& opt = {}) {
  OptimizationResult res;
  res.init = find_feasible(prob, theta0, opt);
  res.theta = res.init.theta;
  res.power = res.init.power;
  res.sinr = evaluate_sinr(prob, res.theta, res.power);
  if (res.init.gamma < 1.0 || !meets_qos(prob, res.sinr, 0.0)) {
    res.feasible = false;
    return res;
  }
  const WeightedRateModel shannon = prob.model.shannon();
  double prev = 0.0;
  for (int i = 1; i <= opt.max_outer; ++i) {
    TraceRow row;
    row.iter = i;
    {
      PhaseWorkspace ws(*prob.stats, prob.pilot, res.theta);
      const SinrBreakdown bd = build_breakdown(ws);
      const RVector gamma = sinr_all(bd, res.power.p);
      if (meets_qos(prob, gamma, 0.0))
        res.power = detail::power_update(prob, bd, res.power, opt, row, res.trace);
    }
    const AscentResult asc = phase_ascent(
        res.theta, detail::wsr_evaluator(prob, res.power, shannon, false), opt.ascent);
    res.theta = asc.theta;
    res.sinr = evaluate_sinr(prob, res.theta, res.power);
    row.wsr = shannon.wsr(res.sinr);
    row.gamma = res.sinr;
    row.p = res.power.p;
    res.trace.rows.push_back(row);
    res.outer_iterations = i;
    const double rel = prev > 0.0 ? (row.wsr - prev) / prev : std::numeric_limits<double>::infinity();
    prev = row.wsr;
    if (rel < opt.zeta) break;
  }
  res.feasible = meets_qos(prob, res.sinr);
  res.wsr = res.feasible ? prob.model.wsr(res.sinr) : 0.0;
  res.theta = res.theta.wrapped();
  return res;
}

}  // namespace rismimo
