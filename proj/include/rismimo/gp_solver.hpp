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


// Small dense geometric-program solver. With y = log x a monomial becomes
// affine and a posynomial constraint F(x) <= 1 becomes the convex
// log-sum-exp constraint log sum_i exp(b_i + a_i^T y) <= 0. The objective is
// a monomial to minimize, i.e. a linear function of y.
//
// Phase 1 minimizes s subject to F_i(y) <= s; a strictly negative optimum
// gives an interior start and a positive one certifies infeasibility.
// Phase 2 runs a log-barrier method with damped Newton centering.

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rismimo/linalg.hpp"

namespace rismimo {

/// coeff * prod_j x_j^{exponents_j}
struct Monomial {
  double coeff = 1.0;
  RVector exponents;
};

struct Posynomial {
  std::vector<Monomial> terms;
  std::string label;
};

struct GpInstance {
  int num_vars = 0;
  Monomial objective;                  // minimized
  std::vector<Posynomial> constraints;  // each <= 1
  RVector start;                        // optional positive starting point

  void validate() const {
    detail::require(num_vars > 0, "GpInstance: no variables");
    detail::require(objective.coeff > 0.0 && objective.exponents.size() == num_vars,
                    "GpInstance: malformed objective monomial");
    for (const auto& c : constraints) {
      detail::require(!c.terms.empty(), "GpInstance: empty posynomial");
      for (const auto& t : c.terms) {
        detail::require(t.coeff > 0.0 && std::isfinite(t.coeff),
                        "GpInstance: posynomial coefficients must be positive and finite");
        detail::require(t.exponents.size() == num_vars, "GpInstance: exponent size mismatch");
      }
    }
    if (start.size() > 0) {
      detail::require(start.size() == num_vars, "GpInstance: start size mismatch");
      detail::require((start.array() > 0.0).all(), "GpInstance: start must be positive");
    }
  }

  /// Largest posynomial value at x (<= 1 means feasible).
  double max_constraint(const RVector& x) const {
    double worst = 0.0;
    for (const auto& c : constraints) worst = std::max(worst, evaluate(c, x));
    return worst;
  }

  static double evaluate(const Monomial& m, const RVector& x) {
    return m.coeff * std::exp((x.array().log() * m.exponents.array()).sum());
  }
  static double evaluate(const Posynomial& p, const RVector& x) {
    double v = 0.0;
    for (const auto& t : p.terms) v += evaluate(t, x);
    return v;
  }
};

enum class GpStatus { optimal, infeasible, stalled };

inline const char* to_string(GpStatus s) {
  switch (s) {
    case GpStatus::optimal: return "optimal";
    case GpStatus::infeasible: return "infeasible";
    case GpStatus::stalled: return "stalled";
  }
  return "unknown";
}

struct GpResult {
  GpStatus status = GpStatus::stalled;
  RVector x;                   // primal point (best iterate when stalled)
  double objective = 0.0;      // monomial objective at x
  double kkt_residual = 0.0;   // max(|c + sum lambda_i grad F_i|_inf, max_i lambda_i |F_i|)
  double phase1_value = 0.0;   // optimal s of phase 1 (> 0 certifies infeasible)
  RVector duals;               // one per user constraint
  int newton_steps = 0;
};

struct GpOptions {
  double newton_tol = 1e-10;     // lambda^2 / 2
  double barrier_mu = 10.0;
  double gap_tol = 1e-10;        // per-constraint complementarity 1 / t at exit
  double stationarity_tol = 1e-10;  // |grad / t|_inf on the last barrier stage
  double log_bound = 60.0;       // |log x_j| box kept as extra constraints
  double infeasible_tol = 1e-9;  // phase-1 optimum above this certifies infeasibility
  int max_newton = 200;
  int max_total_newton = 20000;
};

namespace detail {

// Constraints in log space: F_i(y) = log sum_r exp(b_r + a_r^T y) - s * use_slack.
struct LogConstraint {
  RMatrix a;  // terms x vars
  RVector b;
};

struct ConstraintEval {
  double value = 0.0;
  RVector grad;
  RMatrix hess;
};

inline double lse_value(const LogConstraint& c, const RVector& y) {
  const RVector z = c.a * y + c.b;
  const double zmax = z.maxCoeff();
  return zmax + std::log((z.array() - zmax).exp().sum());
}

inline ConstraintEval lse_eval(const LogConstraint& c, const RVector& y) {
  const RVector z = c.a * y + c.b;
  const double zmax = z.maxCoeff();
  const RVector e = (z.array() - zmax).exp().matrix();
  const double total = e.sum();
  const RVector pi = e / total;
  ConstraintEval out;
  out.value = zmax + std::log(total);
  out.grad = c.a.transpose() * pi;
  out.hess = c.a.transpose() * pi.asDiagonal() * c.a - out.grad * out.grad.transpose();
  return out;
}

// Barrier problem over v = (y) or (y, s): minimize c^T v subject to
// F_i(y) - slack_i * s <= 0.
class BarrierProblem {
 public:
  BarrierProblem(std::vector<LogConstraint> cons, RVector cost, bool with_slack)
      : cons_(std::move(cons)), cost_(std::move(cost)), slack_(with_slack) {}

  int dim() const { return static_cast<int>(cost_.size()); }
  int num_constraints() const { return static_cast<int>(cons_.size()); }
  const RVector& cost() const { return cost_; }
  const std::vector<LogConstraint>& constraints() const { return cons_; }

  double value(int i, const RVector& v) const {
    const int ny = slack_ ? dim() - 1 : dim();
    double f = lse_value(cons_[i], v.head(ny));
    if (slack_) f -= v(dim() - 1);
    return f;
  }

  bool strictly_feasible(const RVector& v) const {
    for (int i = 0; i < num_constraints(); ++i)
      if (!(value(i, v) < 0.0)) return false;
    return true;
  }

  double barrier_objective(double t, const RVector& v) const {
    double phi = t * cost_.dot(v);
    for (int i = 0; i < num_constraints(); ++i) {
      const double f = value(i, v);
      if (!(f < 0.0)) return std::numeric_limits<double>::infinity();
      phi -= std::log(-f);
    }
    return phi;
  }

  // Gradient and Hessian of the barrier objective, plus per-constraint values.
  void derivatives(double t, const RVector& v, RVector& grad, RMatrix& hess,
                   RVector& values) const {
    const int n = dim();
    const int ny = slack_ ? n - 1 : n;
    grad = t * cost_;
    hess = RMatrix::Zero(n, n);
    values.resize(num_constraints());
    for (int i = 0; i < num_constraints(); ++i) {
      ConstraintEval ev = lse_eval(cons_[i], v.head(ny));
      RVector g = RVector::Zero(n);
      g.head(ny) = ev.grad;
      double f = ev.value;
      if (slack_) {
        g(n - 1) = -1.0;
        f -= v(n - 1);
      }
      values(i) = f;
      const double inv = -1.0 / f;
      grad += inv * g;
      hess.topLeftCorner(ny, ny) += inv * ev.hess;
      hess += (inv * inv) * g * g.transpose();
    }
  }

 private:
  std::vector<LogConstraint> cons_;
  RVector cost_;
  bool slack_;
};

struct BarrierOutcome {
  RVector v;
  double t = 1.0;
  double stationarity = 0.0;
  int newton_steps = 0;
  bool converged = false;
  bool stopped_early = false;
};

// Path-following barrier method. stop_fn(v) may end the run early (phase 1).
template <typename StopFn>
BarrierOutcome run_barrier(const BarrierProblem& prob, RVector v, const GpOptions& opt,
                           StopFn stop_fn) {
  BarrierOutcome out;
  const int m = prob.num_constraints();
  double t = 1.0;
  RVector grad, values;
  RMatrix hess;
  while (true) {
    bool centered = false;
    const bool last_stage = 1.0 / t <= opt.gap_tol;
    for (int it = 0; it < opt.max_newton; ++it) {
      if (out.newton_steps >= opt.max_total_newton) break;
      prob.derivatives(t, v, grad, hess, values);
      if (last_stage && (grad / t).cwiseAbs().maxCoeff() <= opt.stationarity_tol) {
        centered = true;
        break;
      }
      // Jacobi scaling keeps the solve accurate when the barrier Hessian
      // spans many orders of magnitude.
      const RVector d = hess.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      const RMatrix scaled = d.asDiagonal() * hess * d.asDiagonal();
      Eigen::LDLT<RMatrix> ldlt(scaled);
      RVector step = -(d.asDiagonal() * ldlt.solve(d.asDiagonal() * grad)).eval();
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        RMatrix reg = scaled;
        reg.diagonal().array() += 1e-12;
        step = -(d.asDiagonal() * reg.ldlt().solve(d.asDiagonal() * grad)).eval();
      }
      const double decrement = -grad.dot(step);
      if (decrement / 2.0 <= opt.newton_tol) {
        centered = true;
        break;
      }
      ++out.newton_steps;
      // Close to the centre the full step is accepted on feasibility alone:
      // barrier values at large t carry roundoff far above the decrease.
      if (decrement < 0.1) {
        const RVector trial = v + step;
        if (prob.strictly_feasible(trial)) {
          v = trial;
          if (stop_fn(v)) {
            out.v = v;
            out.t = t;
            out.stopped_early = true;
            return out;
          }
          continue;
        }
      }
      const double phi0 = prob.barrier_objective(t, v);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls) {
        const RVector trial = v + alpha * step;
        const double phi = prob.barrier_objective(t, trial);
        if (std::isfinite(phi) && phi <= phi0 - 0.25 * alpha * decrement) {
          v = trial;
          moved = phi0 - phi > 1e-15 * std::max(1.0, std::abs(phi0));
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) {
        // No progress at machine precision: treat as centered.
        centered = true;
        break;
      }
      if (stop_fn(v)) {
        out.v = v;
        out.t = t;
        out.stopped_early = true;
        return out;
      }
    }
    prob.derivatives(t, v, grad, hess, values);
    out.stationarity = (grad / t).cwiseAbs().maxCoeff();
    out.v = v;
    out.t = t;
    if (!centered) return out;
    if (last_stage) {
      out.converged = true;
      return out;
    }
    t *= opt.barrier_mu;
  }
}

struct KktReport {
  RVector duals;
  double residual = 0.0;
};

// KKT residual at a primal point: duals fitted by least squares on the
// near-active set (the barrier estimates 1/(t(-F_i)) lose relative accuracy
// as F_i -> 0), clipped at zero. Residual is the max of stationarity,
// complementarity and primal infeasibility, all in the infinity norm.
inline KktReport kkt_report(const BarrierProblem& prob, const RVector& y, double t) {
  const int m = prob.num_constraints();
  const int n = prob.dim();
  RVector f(m), lambda0(m);
  RMatrix jac(m, n);
  for (int i = 0; i < m; ++i) {
    const ConstraintEval ev = lse_eval(prob.constraints()[i], y);
    f(i) = ev.value;
    jac.row(i) = ev.grad.transpose();
    lambda0(i) = 1.0 / (t * std::max(-f(i), 1e-300));
  }
  auto residual_of = [&](const RVector& lam) {
    double r = (prob.cost() + jac.transpose() * lam).cwiseAbs().maxCoeff();
    for (int i = 0; i < m; ++i) r = std::max({r, lam(i) * std::abs(f(i)), f(i)});
    return r;
  };
  KktReport best{lambda0, residual_of(lambda0)};
  std::vector<int> active;
  const double lmax = lambda0.maxCoeff();
  for (int i = 0; i < m; ++i)
    if (lambda0(i) >= 1e-6 * lmax) active.push_back(i);
  for (int round = 0; round < 4 && !active.empty(); ++round) {
    RMatrix ja(active.size(), n);
    for (std::size_t r = 0; r < active.size(); ++r) ja.row(r) = jac.row(active[r]);
    const RVector la = ja.transpose().colPivHouseholderQr().solve(-prob.cost());
    RVector lam = RVector::Zero(m);
    std::vector<int> keep;
    for (std::size_t r = 0; r < active.size(); ++r) {
      if (la(r) > 0.0) {
        lam(active[r]) = la(r);
        keep.push_back(active[r]);
      }
    }
    const double r = residual_of(lam);
    if (r < best.residual) best = {lam, r};
    if (keep.size() == active.size()) break;
    active = keep;
  }
  return best;
}

}  // namespace detail

inline GpResult solve_gp(const GpInstance& gp, const GpOptions& opt = {}) {
  gp.validate();
  const int n = gp.num_vars;
  const int m_user = static_cast<int>(gp.constraints.size());

  std::vector<detail::LogConstraint> cons;
  cons.reserve(m_user + 2 * n);
  for (const auto& p : gp.constraints) {
    detail::LogConstraint c;
    const int terms = static_cast<int>(p.terms.size());
    c.a.resize(terms, n);
    c.b.resize(terms);
    for (int r = 0; r < terms; ++r) {
      c.a.row(r) = p.terms[r].exponents.transpose();
      c.b(r) = std::log(p.terms[r].coeff);
    }
    cons.push_back(std::move(c));
  }
  for (int j = 0; j < n; ++j) {
    for (double sign : {1.0, -1.0}) {
      detail::LogConstraint c;
      c.a = RMatrix::Zero(1, n);
      c.a(0, j) = sign;
      c.b = RVector::Constant(1, -opt.log_bound);
      cons.push_back(std::move(c));
    }
  }

  RVector y0 = RVector::Zero(n);
  if (gp.start.size() == n) y0 = gp.start.array().log().matrix();
  y0 = y0.cwiseMax(-0.5 * opt.log_bound).cwiseMin(0.5 * opt.log_bound);

  GpResult res;
  // Phase 1.
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& c : cons) worst = std::max(worst, detail::lse_value(c, y0));
    RVector cost = RVector::Zero(n + 1);
    cost(n) = 1.0;
    detail::BarrierProblem p1(cons, cost, true);
    RVector v(n + 1);
    v.head(n) = y0;
    v(n) = worst + 1.0;
    bool already = worst < -1e-3;
    RVector y = y0;
    if (!already) {
      auto stop = [n](const RVector& vv) { return vv(n) < -1e-3; };
      detail::BarrierOutcome o = detail::run_barrier(p1, v, opt, stop);
      res.newton_steps += o.newton_steps;
      y = o.v.head(n);
      double s_star = -std::numeric_limits<double>::infinity();
      for (const auto& c : cons) s_star = std::max(s_star, detail::lse_value(c, y));
      res.phase1_value = s_star;
      if (!(s_star < 0.0)) {
        const bool certified = s_star > opt.infeasible_tol && (o.converged || o.stopped_early);
        res.status = certified ? GpStatus::infeasible : GpStatus::stalled;
        res.x = y.array().exp().matrix();
        res.objective = GpInstance::evaluate(gp.objective, res.x);
        return res;
      }
    } else {
      res.phase1_value = worst;
    }
    y0 = y;
  }

  // Phase 2.
  detail::BarrierProblem p2(cons, gp.objective.exponents, false);
  detail::BarrierOutcome o = detail::run_barrier(p2, y0, opt, [](const RVector&) { return false; });
  res.newton_steps += o.newton_steps;
  res.x = o.v.array().exp().matrix();
  res.objective = GpInstance::evaluate(gp.objective, res.x);
  const detail::KktReport kkt = detail::kkt_report(p2, o.v, o.t);
  res.kkt_residual = kkt.residual;
  res.duals = kkt.duals.head(m_user);
  res.status = o.converged ? GpStatus::optimal : GpStatus::stalled;
  return res;
}

}  // namespace rismimo
