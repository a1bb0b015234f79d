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


// Finite-difference audit of every analytic phase gradient on small random
// instances, plus the instance generator it uses.

#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rismimo/phase_gradient.hpp"

namespace rismimo {

/// Random Hermitian PSD matrix with unit mean diagonal, bounded away from singular.
inline CMatrix random_psd(Engine& rng, int n, double ridge = 0.2) {
  const CMatrix a = complex_gaussian(rng, n, n, 1.0);
  CMatrix c = a * a.adjoint();
  c /= c.trace().real() / n;
  c.diagonal().array() += ridge;
  c /= 1.0 + ridge;
  return 0.5 * (c + c.adjoint());
}

inline CMatrix random_hermitian(Engine& rng, int n) {
  const CMatrix a = complex_gaussian(rng, n, n, 1.0);
  return 0.5 * (a + a.adjoint());
}

struct SmallInstance {
  ChannelStatistics stats;
  PilotConfig pilot;
  PhaseShifts theta;
};

/// M x N x K instance with distinct per-user RIS correlations and O(1) gains.
inline SmallInstance random_instance(std::uint64_t seed, int m, int n, int k_users,
                                     bool distinct_users = true) {
  Engine rng = make_engine(seed, 0, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SmallInstance inst;
  inst.stats.c_bs = {random_psd(rng, m), CorrelationKind::bs_exponential};
  inst.stats.c_ris_rx = {random_psd(rng, n), CorrelationKind::ris_sinc};
  const CMatrix shared = random_psd(rng, n);
  for (int k = 0; k < k_users; ++k) {
    inst.stats.c_ris_user.push_back(
        {distinct_users ? random_psd(rng, n) : shared, CorrelationKind::ris_sinc});
    inst.stats.beta_ru.push_back(0.5 + unif(rng));
  }
  inst.stats.beta_br = 0.3 + 0.4 * unif(rng);
  inst.pilot.tau = k_users;
  inst.pilot.power = 0.5 + unif(rng);
  inst.pilot.noise = 0.5 + unif(rng);
  RVector th(n);
  for (int i = 0; i < n; ++i) th(i) = kTwoPi * unif(rng);
  inst.theta = PhaseShifts(th);
  return inst;
}

/// Central-difference gradient of a scalar function of theta.
inline RVector fd_gradient(const std::function<double(const PhaseShifts&)>& fn,
                           const PhaseShifts& theta, double h = 1e-6) {
  const int n = theta.size();
  RVector g(n);
  for (int i = 0; i < n; ++i) {
    RVector up = theta.values(), dn = theta.values();
    up(i) += h;
    dn(i) -= h;
    g(i) = (fn(PhaseShifts(up)) - fn(PhaseShifts(dn))) / (2.0 * h);
  }
  return g;
}

inline double rel_error(const RVector& analytic, const RVector& reference) {
  const double denom = std::max(reference.norm(), 1e-300);
  return (analytic - reference).norm() / denom;
}

struct GradientCheckRow {
  std::string quantity;
  double rel_error = 0.0;
};

/// Worst relative error per gradient family on one instance.
inline std::vector<GradientCheckRow> gradient_check(const SmallInstance& inst,
                                                    const WeightedRateModel& model,
                                                    const RVector& p, double h = 1e-6) {
  const int k_users = inst.stats.num_users();
  const PhaseWorkspace ws(inst.stats, inst.pilot, inst.theta);
  const GradientWorkspace gw(ws);
  const SinrBreakdown bd = build_breakdown(ws);
  auto at = [&inst, h](auto fn) {
    return fd_gradient(
        [&inst, &fn](const PhaseShifts& th) {
          return fn(PhaseWorkspace(inst.stats, inst.pilot, th));
        },
        inst.theta, h);
  };
  std::vector<GradientCheckRow> rows;
  auto record = [&rows](const std::string& name, double err) {
    for (auto& r : rows)
      if (r.quantity == name) {
        r.rel_error = std::max(r.rel_error, err);
        return;
      }
    rows.push_back({name, err});
  };
  const CMatrix& cb = inst.stats.c_bs.entries;
  for (int k = 0; k < k_users; ++k) {
    record("trace_z", rel_error(gw.d_tr_z(k), at([k](const PhaseWorkspace& w) {
                                 return w.tr_z(k);
                               })));
    record("trace_x_filter", rel_error(gw.z_g(cb, k), at([&cb, k](const PhaseWorkspace& w) {
                                         return trace_product(cb, w.estimator(k).r_filter).real();
                                       })));
    const TermGradients t = term_gradients(k, gw);
    record("signal", rel_error(t.signal, at([k](const PhaseWorkspace& w) {
                                 return signal_term(w, k);
                               })));
    record("trace_zz", rel_error(t.tr_zz, at([k](const PhaseWorkspace& w) {
                                   return w.tr_zz(k, k);
                                 })));
    record("trace_cbr_cbr", rel_error(t.tr_cbr_cbr, at([k](const PhaseWorkspace& w) {
                                        return w.tr_cbr_cbr(k);
                                      })));
    record("trace_cb_rr", rel_error(t.tr_cb_rr, at([k](const PhaseWorkspace& w) {
                                      return w.tr_cb_rr(k);
                                    })));
    record("leakage", rel_error(grad_leakage(k, gw), at([k](const PhaseWorkspace& w) {
                                  return leakage_term(w, k);
                                })));
    for (int kp = 0; kp < k_users; ++kp)
      record("interference", rel_error(grad_interference(k, kp, gw),
                                       at([k, kp](const PhaseWorkspace& w) {
                                         return interference_term(w, k, kp);
                                       })));
    record("sinr", rel_error(grad_sinr(k, bd, p, gw), at([&p, k](const PhaseWorkspace& w) {
                               return sinr_hat(build_breakdown(w), p, k);
                             })));
  }
  record("wsr", rel_error(grad_wsr(model, bd, p, gw), at([&](const PhaseWorkspace& w) {
                            return model.wsr(sinr_all(build_breakdown(w), p));
                          })));
  return rows;
}

}  // namespace rismimo
