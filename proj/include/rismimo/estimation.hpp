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

#pragma once

#include <cstdint>

#include "rismimo/channel_model.hpp"

namespace rismimo {

/// Z = diag(b) C_RU diag(b)^H C_R and its trace.
struct PhaseCorrelation {
  CMatrix z;
  cdouble trace;
};

inline PhaseCorrelation compute_z(const PhaseShifts& theta, const CorrelationMatrix& c_ris_user,
                                  const CorrelationMatrix& c_ris_rx) {
  const int n = theta.size();
  detail::require(c_ris_user.dim() == n && c_ris_rx.dim() == n,
                  "compute_z: dimension mismatch between phases and correlation matrices");
  const CVector b = theta.phasors();
  // (diag(b) C diag(b)^H)_{ij} = b_i C_ij conj(b_j)
  const CMatrix rotated = b.asDiagonal() * c_ris_user.entries * b.conjugate().asDiagonal();
  PhaseCorrelation out;
  out.z = rotated * c_ris_rx.entries;
  out.trace = out.z.trace();
  return out;
}

/// LMMSE filter of one user. gain = beta_RU beta_BR Re Tr{Z};
/// W = C_B (gain C_B + s I)^{-1}; R = gain W.
struct EstimatorState {
  cdouble z_trace;
  CMatrix z_matrix;
  double gain = 0.0;
  CMatrix w_matrix;
  CMatrix r_filter;
  std::uint64_t stamp = 0;
};

inline EstimatorState lmmse_filter(const ChannelStatistics& stats, cdouble z_trace,
                                   const PilotConfig& pilot, int k) {
  detail::require(k >= 0 && k < stats.num_users(), "lmmse_filter: user index out of range");
  detail::require(pilot.noise > 0.0, "lmmse_filter: noise power must be positive");
  detail::require(pilot.power > 0.0, "lmmse_filter: pilot power must be positive");
  detail::require(pilot.tau >= stats.num_users(), "lmmse_filter: pilot length must be >= K");

  const double tr_z = real_checked(z_trace, 1e-8, 0.0, "Tr{Z_k}");
  if (tr_z < -1e-10 * std::max(1.0, std::abs(z_trace)))
    throw NumericalFailure("lmmse_filter: Tr{Z_k} has negative real part");

  EstimatorState st;
  st.z_trace = z_trace;
  st.gain = stats.beta_ru[k] * stats.beta_br * std::max(tr_z, 0.0);
  const CMatrix& cb = stats.c_bs.entries;
  CMatrix regularized = st.gain * cb;
  regularized.diagonal().array() += pilot.noise_ratio();
  // C_B and the regularized matrix commute, so W = S^{-1} C_B = C_B S^{-1}.
  Eigen::LDLT<CMatrix> ldlt(regularized);
  if (ldlt.info() != Eigen::Success)
    throw NumericalFailure("lmmse_filter: regularized matrix is not positive definite");
  st.w_matrix = ldlt.solve(cb);
  st.w_matrix = 0.5 * (st.w_matrix + st.w_matrix.adjoint()).eval();
  st.r_filter = st.gain * st.w_matrix;
  return st;
}

/// Full per-user estimator for a phase vector.
inline EstimatorState build_estimator(const ChannelStatistics& stats, const PhaseShifts& theta,
                                      const PilotConfig& pilot, int k) {
  detail::require(k >= 0 && k < stats.num_users(), "build_estimator: user index out of range");
  PhaseCorrelation z = compute_z(theta, stats.c_ris_user.at(k), stats.c_ris_rx);
  EstimatorState st = lmmse_filter(stats, z.trace, pilot, k);
  st.z_matrix = std::move(z.z);
  st.stamp = theta.stamp();
  return st;
}

/// h_hat = R y
inline CVector estimate(const CMatrix& r_filter, const CVector& y_pilot) {
  detail::require(r_filter.cols() == y_pilot.size(), "estimate: dimension mismatch");
  return r_filter * y_pilot;
}

/// Tr{(I - R) C_B} / Tr{C_B}
inline double nmse(const CMatrix& r_filter, const CorrelationMatrix& c_bs) {
  detail::require(r_filter.rows() == c_bs.dim() && r_filter.cols() == c_bs.dim(),
                  "nmse: dimension mismatch");
  const cdouble tr_cb = c_bs.entries.trace();
  const cdouble num = tr_cb - trace_product(r_filter, c_bs.entries);
  const double value = real_checked(num / tr_cb, 1e-8, 1e-10, "NMSE");
  return value;
}

}  // namespace rismimo
