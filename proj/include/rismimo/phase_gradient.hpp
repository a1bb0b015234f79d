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


// Gradients of the closed-form SINR terms and of the weighted sum rate with
// respect to the real phase vector theta (b = e^{j theta}, Phi = diag(b)).
//
// Building blocks:
//   u_g(A, B)  d/dtheta Tr{A Phi B Phi^H}
//   z_g(X, k)  d/dtheta Tr{X R_k}, through Tr{Z_k} in the LMMSE filter

#pragma once

#include <cstdint>
#include <vector>

#include "rismimo/deterministic_sinr.hpp"
#include "rismimo/fbl_rate.hpp"

namespace rismimo {

/// Gradient of Tr{A Phi B Phi^H} = b^H (A o B^T) b with respect to theta:
/// -j conj(b) o (A o B^T) b + j b o ((A o B^T)^T conj(b)).
inline RVector u_g(const CMatrix& a, const CMatrix& b_mat, const CVector& b) {
  const Eigen::Index n = b.size();
  detail::require(a.rows() == n && a.cols() == n && b_mat.rows() == n && b_mat.cols() == n,
                  "u_g: dimension mismatch");
  const CMatrix m = a.cwiseProduct(b_mat.transpose());
  const CVector mb = m * b;
  const CVector mtb = m.transpose() * b.conjugate();
  const cdouble j(0.0, 1.0);
  RVector out(n);
  double scale = 0.0, residue = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const cdouble t1 = std::conj(b(i)) * mb(i);
    const cdouble t2 = b(i) * mtb(i);
    const cdouble g = -j * t1 + j * t2;
    out(i) = g.real();
    scale = std::max(scale, std::abs(t1) + std::abs(t2));
    residue = std::max(residue, std::abs(g.imag()));
  }
  if (residue > 1e-9 * std::max(scale, 1e-300) && residue > 1e-300)
    throw NumericalFailure("u_g: gradient has a non-negligible imaginary part");
  return out;
}

inline RVector u_g(const CMatrix& a, const CMatrix& b_mat, const PhaseShifts& theta) {
  return u_g(a, b_mat, theta.phasors());
}

/// Per-phase cache for gradient assembly. Holds a reference to the phase
/// workspace, which must outlive it.
class GradientWorkspace {
 public:
  explicit GradientWorkspace(const PhaseWorkspace& ws)
      : ws_(&ws), b_(ws.theta().phasors()), stamp_(ws.stamp()) {
    const auto& s = ws.stats();
    const int k_users = ws.num_users();
    const CMatrix& cr = s.c_ris_rx.entries;
    const CMatrix& cb = s.c_bs.entries;
    d_tr_z_.resize(k_users);
    ww_.resize(k_users);
    std::vector<CMatrix> q(k_users);
    for (int k = 0; k < k_users; ++k) {
      const EstimatorState& e = ws.estimator(k);
      d_tr_z_[k] = u_g(cr, s.c_ris_user[k].entries, b_);
      ww_[k] = e.w_matrix * e.w_matrix;
      q[k] = cr * e.z_matrix;  // C_R Phi C_RU Phi^H C_R
    }
    // d Tr{Z_k Z_k'} = u_g(C_R Phi C_k' Phi^H C_R, C_k) + u_g(C_R Phi C_k Phi^H C_R, C_k')
    d_tr_zz_.assign(static_cast<std::size_t>(k_users) * k_users, RVector());
    for (int k = 0; k < k_users; ++k) {
      for (int kp = k; kp < k_users; ++kp) {
        RVector g = u_g(q[kp], s.c_ris_user[k].entries, b_) +
                    u_g(q[k], s.c_ris_user[kp].entries, b_);
        d_tr_zz_[idx(kp, k)] = g;
        d_tr_zz_[idx(k, kp)] = std::move(g);
      }
    }
    d_tr_cb_r_.resize(k_users);
    d_tr_cbr_cbr_.resize(k_users);
    d_tr_cb_rr_.resize(k_users);
    for (int k = 0; k < k_users; ++k) {
      const CMatrix& r = ws.estimator(k).r_filter;
      const CMatrix cbr = cb * r;
      d_tr_cb_r_[k] = z_g(cb, k);
      d_tr_cbr_cbr_[k] = 2.0 * z_g(cbr * cb, k);
      d_tr_cb_rr_[k] = 2.0 * z_g(cbr, k);
    }
  }

  const PhaseWorkspace& phase() const { return *ws_; }
  const CVector& phasors() const { return b_; }
  std::uint64_t stamp() const { return stamp_; }
  int num_users() const { return ws_->num_users(); }
  int num_elements() const { return static_cast<int>(b_.size()); }

  void require_fresh(const PhaseShifts& active) const {
    if (active.stamp() != stamp_)
      throw StaleStateError("gradient workspace was built for a different phase vector");
  }

  /// d Tr{X R_k}: bb (Tr{X W_k} - bb Tr{Z_k} Tr{X W_k W_k}) d Tr{Z_k}.
  RVector z_g(const CMatrix& x, int k) const {
    const EstimatorState& e = ws_->estimator(k);
    detail::require(x.rows() == e.w_matrix.rows() && x.cols() == e.w_matrix.cols(),
                    "z_g: dimension mismatch");
    const double bb = ws_->beta_product(k);
    const cdouble c = trace_product(x, e.w_matrix) - e.gain * trace_product(x, ww_[k]);
    const double scale = std::max(x.norm() * e.w_matrix.norm(), 1e-300);
    const double coeff = real_checked(c, 1e-8, scale, "z_g coefficient");
    return bb * coeff * d_tr_z_[k];
  }

  const RVector& d_tr_z(int k) const { return d_tr_z_.at(k); }
  const RVector& d_tr_zz(int k, int kp) const { return d_tr_zz_.at(idx(k, kp)); }
  const RVector& d_tr_cb_r(int k) const { return d_tr_cb_r_.at(k); }
  const RVector& d_tr_cbr_cbr(int k) const { return d_tr_cbr_cbr_.at(k); }
  const RVector& d_tr_cb_rr(int k) const { return d_tr_cb_rr_.at(k); }

 private:
  std::size_t idx(int k, int kp) const {
    return static_cast<std::size_t>(k) * ws_->num_users() + kp;
  }

  const PhaseWorkspace* ws_;
  CVector b_;
  std::uint64_t stamp_;
  std::vector<RVector> d_tr_z_;
  std::vector<CMatrix> ww_;
  std::vector<RVector> d_tr_zz_;
  std::vector<RVector> d_tr_cb_r_, d_tr_cbr_cbr_, d_tr_cb_rr_;
};

/// Gradients of |Tr{A_k}|^2, Tr{Z_k Z_k}, Tr{C_B R_k^H C_B R_k}, Tr{C_B R_k R_k^H}.
struct TermGradients {
  RVector signal;
  RVector tr_zz;
  RVector tr_cbr_cbr;
  RVector tr_cb_rr;
};

inline TermGradients term_gradients(int k, const GradientWorkspace& gw) {
  const PhaseWorkspace& ws = gw.phase();
  const double bb = ws.beta_product(k);
  const double tr_a = bb * ws.tr_z(k) * ws.tr_cb_r(k);
  TermGradients out;
  out.signal = 2.0 * bb * tr_a * (ws.tr_z(k) * gw.d_tr_cb_r(k) + ws.tr_cb_r(k) * gw.d_tr_z(k));
  out.tr_zz = gw.d_tr_zz(k, k);
  out.tr_cbr_cbr = gw.d_tr_cbr_cbr(k);
  out.tr_cb_rr = gw.d_tr_cb_rr(k);
  return out;
}

inline RVector grad_signal(int k, const GradientWorkspace& gw) {
  return term_gradients(k, gw).signal;
}

/// Gradient of the leakage coefficient E_k / p_k.
inline RVector grad_leakage(int k, const GradientWorkspace& gw) {
  const PhaseWorkspace& ws = gw.phase();
  const double bb = ws.beta_product(k);
  return bb * bb * (ws.tr_cbr_cbr(k) * gw.d_tr_zz(k, k) + ws.tr_zz(k, k) * gw.d_tr_cbr_cbr(k));
}

/// Gradient of UI_{k,k'} (valid for k' == k).
inline RVector grad_interference(int k, int kp, const GradientWorkspace& gw) {
  const PhaseWorkspace& ws = gw.phase();
  const auto& s = ws.stats();
  const double b2 = s.beta_ru[k] * s.beta_ru[kp] * s.beta_br * s.beta_br;
  const double t1 = ws.tr_cb_r(kp);
  const double t2 = ws.tr_cbr_cbr(kp);
  const double t3 = ws.tr_cb_rr(kp);
  const double zk = ws.tr_z(k), zkp = ws.tr_z(kp);
  RVector g = b2 * (2.0 * t1 * ws.tr_zz(k, kp) * gw.d_tr_cb_r(kp) + t1 * t1 * gw.d_tr_zz(k, kp) +
                    t2 * zkp * gw.d_tr_z(k) + t2 * zk * gw.d_tr_z(kp) +
                    zk * zkp * gw.d_tr_cbr_cbr(kp));
  const double pn = ws.pilot().noise_ratio() * s.beta_br * s.beta_ru[k];
  g += pn * (t3 * gw.d_tr_z(k) + zk * gw.d_tr_cb_rr(kp));
  return g;
}

/// Quotient-rule gradient of gamma_k at fixed power.
inline RVector grad_sinr(int k, const SinrBreakdown& bd, const RVector& p,
                         const GradientWorkspace& gw) {
  detail::require(bd.stamp == gw.stamp(), "grad_sinr: breakdown and workspace disagree on phase");
  detail::require(p.size() == bd.num_users(), "grad_sinr: power vector size mismatch");
  const double den = sinr_denominator(bd, p, k);
  const double gamma = p(k) * bd.signal(k) / den;
  RVector d_den = p(k) * grad_leakage(k, gw);
  for (int kp = 0; kp < bd.num_users(); ++kp) d_den += p(kp) * grad_interference(k, kp, gw);
  return (p(k) / den) * grad_signal(k, gw) - (gamma / den) * d_den;
}

/// Gradient of the weighted sum of Jensen lower-bound rates at fixed power.
inline RVector grad_wsr(const WeightedRateModel& model, const SinrBreakdown& bd,
                        const RVector& p, const GradientWorkspace& gw) {
  detail::require(model.num_users() == bd.num_users(), "grad_wsr: user count mismatch");
  RVector g = RVector::Zero(gw.num_elements());
  for (int k = 0; k < bd.num_users(); ++k) {
    const double slope = model.weighted_slope(k, sinr_hat(bd, p, k));
    g += slope * grad_sinr(k, bd, p, gw);
  }
  return g;
}

}  // namespace rismimo
