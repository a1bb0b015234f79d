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

// Closed-form (deterministic-equivalent) SINR of MRT precoding on LMMSE
// cascaded-channel estimates. Every term depends on the correlation
// matrices, path losses and phase vector only:
//
//   gamma_k = p_k |Tr A_k|^2 / (p_k E_k + sum_{k'} p_{k'} UI_{k,k'} + sigma^2)
//
// The sum over k' includes k' = k. E_k + UI_{k,k} is exactly the variance of
// h_k^H h_hat_k, and UI_{k,k'} (k' != k) is exactly E|h_k^H h_hat_{k'}|^2,
// so gamma_k equals the use-and-then-forget SINR.

#pragma once

#include <cstdint>
#include <vector>

#include "rismimo/estimation.hpp"

namespace rismimo {

/// Per-phase cache of estimator states and the traces every SINR term uses.
/// Holds a reference to `stats`; the statistics must outlive the workspace.
class PhaseWorkspace {
 public:
  PhaseWorkspace(const ChannelStatistics& stats, const PilotConfig& pilot, PhaseShifts theta)
      : stats_(&stats), pilot_(pilot), theta_(std::move(theta)), stamp_(theta_.stamp()) {
    stats.validate();
    detail::require(theta_.size() == stats.num_elements(),
                    "PhaseWorkspace: phase vector size mismatch");
    const int k_users = stats.num_users();
    const CMatrix& cb = stats.c_bs.entries;
    est_.reserve(k_users);
    tr_z_.resize(k_users);
    tr_cb_r_.resize(k_users);
    tr_cbr_cbr_.resize(k_users);
    tr_cb_rr_.resize(k_users);
    for (int k = 0; k < k_users; ++k) {
      est_.push_back(build_estimator(stats, theta_, pilot_, k));
      const EstimatorState& e = est_.back();
      tr_z_(k) = e.z_trace.real();
      const double scale = std::max(1.0, cb.trace().real());
      tr_cb_r_(k) = real_checked(trace_product(cb, e.r_filter), 1e-8, scale, "Tr{C_B R}");
      const CMatrix cbr = cb * e.r_filter;
      tr_cbr_cbr_(k) = real_checked(trace_product(cbr, cb * e.r_filter.adjoint()), 1e-8,
                                    scale, "Tr{C_B R C_B R^H}");
      tr_cb_rr_(k) = real_checked(trace_product(cbr, e.r_filter.adjoint()), 1e-8, scale,
                                  "Tr{C_B R R^H}");
    }
    tr_zz_.resize(k_users, k_users);
    for (int k = 0; k < k_users; ++k) {
      for (int kp = k; kp < k_users; ++kp) {
        const cdouble t = trace_product(est_[k].z_matrix, est_[kp].z_matrix);
        const double v = real_checked(t, 1e-8, std::abs(tr_z_(k) * tr_z_(kp)), "Tr{Z_k Z_k'}");
        tr_zz_(k, kp) = v;
        tr_zz_(kp, k) = v;
      }
    }
  }

  const ChannelStatistics& stats() const { return *stats_; }
  const PilotConfig& pilot() const { return pilot_; }
  const PhaseShifts& theta() const { return theta_; }
  std::uint64_t stamp() const { return stamp_; }
  int num_users() const { return stats_->num_users(); }
  double noise() const { return pilot_.noise; }

  const EstimatorState& estimator(int k) const { return est_.at(k); }
  double beta_product(int k) const { return stats_->beta_br * stats_->beta_ru[k]; }

  double tr_z(int k) const { return tr_z_(k); }
  double tr_zz(int k, int kp) const { return tr_zz_(k, kp); }
  double tr_cb_r(int k) const { return tr_cb_r_(k); }
  double tr_cbr_cbr(int k) const { return tr_cbr_cbr_(k); }
  double tr_cb_rr(int k) const { return tr_cb_rr_(k); }

  void require_fresh(const PhaseShifts& active) const {
    if (active.stamp() != stamp_)
      throw StaleStateError("phase workspace was built for a different phase vector");
  }

 private:
  const ChannelStatistics* stats_;
  PilotConfig pilot_;
  PhaseShifts theta_;
  std::uint64_t stamp_;
  std::vector<EstimatorState> est_;
  RVector tr_z_, tr_cb_r_, tr_cbr_cbr_, tr_cb_rr_;
  RMatrix tr_zz_;
};

/// |Tr A_k|^2 with A_k = beta_RU beta_BR Tr{Z_k} R_k C_B.
inline double signal_term(const PhaseWorkspace& ws, int k) {
  const double tr_a = ws.estimator(k).gain * ws.tr_cb_r(k);
  return tr_a * tr_a;
}

/// Coefficient of p_k in the leakage power:
/// (beta_BR beta_RU)^2 Tr{Z_k Z_k} Tr{C_B R_k^H C_B R_k}.
inline double leakage_term(const PhaseWorkspace& ws, int k) {
  const double bb = ws.beta_product(k);
  return bb * bb * ws.tr_zz(k, k) * ws.tr_cbr_cbr(k);
}

/// UI_{k,k'}: interference coefficient of p_{k'} at user k, including the
/// pilot-noise term. Valid for k' == k as well.
inline double interference_term(const PhaseWorkspace& ws, int k, int kp) {
  const auto& s = ws.stats();
  const double b2 = s.beta_ru[k] * s.beta_ru[kp] * s.beta_br * s.beta_br;
  const double tcbr = ws.tr_cb_r(kp);
  const double fading = b2 * (tcbr * tcbr * ws.tr_zz(k, kp) +
                              ws.tr_z(kp) * ws.tr_cbr_cbr(kp) * ws.tr_z(k));
  const double pilot_noise = ws.pilot().noise_ratio() * s.beta_br * s.beta_ru[k] *
                             ws.tr_cb_rr(kp) * ws.tr_z(k);
  return fading + pilot_noise;
}

struct SinrBreakdown {
  RVector signal;          // |Tr A_k|^2
  RVector leakage_coeff;   // E_k / p_k
  RMatrix interference;    // UI_{k,k'}
  double noise = 0.0;      // sigma^2
  std::uint64_t stamp = 0;

  int num_users() const { return static_cast<int>(signal.size()); }

  void require_fresh(const PhaseShifts& active) const {
    if (active.stamp() != stamp)
      throw StaleStateError("SINR breakdown was built for a different phase vector");
  }

  /// Scales every power term, i.e. {signal, leakage, UI, sigma^2} -> c * {...}.
  SinrBreakdown scaled(double c) const {
    SinrBreakdown out = *this;
    out.signal *= c;
    out.leakage_coeff *= c;
    out.interference *= c;
    out.noise *= c;
    return out;
  }
};

inline SinrBreakdown build_breakdown(const PhaseWorkspace& ws) {
  const int k_users = ws.num_users();
  SinrBreakdown bd;
  bd.signal.resize(k_users);
  bd.leakage_coeff.resize(k_users);
  bd.interference.resize(k_users, k_users);
  for (int k = 0; k < k_users; ++k) {
    bd.signal(k) = signal_term(ws, k);
    bd.leakage_coeff(k) = leakage_term(ws, k);
    for (int kp = 0; kp < k_users; ++kp) bd.interference(k, kp) = interference_term(ws, k, kp);
  }
  bd.noise = ws.noise();
  bd.stamp = ws.stamp();
  return bd;
}

/// Denominator p_k E_k + sum_{k'} p_{k'} UI_{k,k'} + sigma^2.
inline double sinr_denominator(const SinrBreakdown& bd, const RVector& p, int k) {
  return p(k) * bd.leakage_coeff(k) + bd.interference.row(k).dot(p) + bd.noise;
}

inline double sinr_hat(const SinrBreakdown& bd, const RVector& p, int k) {
  detail::require(p.size() == bd.num_users(), "sinr_hat: power vector size mismatch");
  detail::require(k >= 0 && k < bd.num_users(), "sinr_hat: user index out of range");
  return p(k) * bd.signal(k) / sinr_denominator(bd, p, k);
}

inline RVector sinr_all(const SinrBreakdown& bd, const RVector& p) {
  RVector g(bd.num_users());
  for (int k = 0; k < bd.num_users(); ++k) g(k) = sinr_hat(bd, p, k);
  return g;
}

}  // namespace rismimo
