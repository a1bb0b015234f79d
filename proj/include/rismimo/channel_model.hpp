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

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rismimo/linalg.hpp"
#include "rismimo/phase_shifts.hpp"
#include "rismimo/rng.hpp"

namespace rismimo {

enum class CorrelationKind { bs_exponential, ris_sinc, identity };

inline const char* to_string(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::bs_exponential: return "bs_exponential";
    case CorrelationKind::ris_sinc: return "ris_sinc";
    case CorrelationKind::identity: return "identity";
  }
  return "unknown";
}

/// Eigenvalues below this are treated as a construction error, not round-off.
inline constexpr double kPsdFloor = -1e-10;

struct CorrelationMatrix {
  CMatrix entries;
  CorrelationKind kind = CorrelationKind::identity;

  int dim() const { return static_cast<int>(entries.rows()); }
};

inline double min_eigenvalue(const CMatrix& c) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(c, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

inline CorrelationMatrix identity_correlation(int dim) {
  detail::require(dim >= 1, "identity_correlation: dim must be >= 1");
  return {CMatrix::Identity(dim, dim), CorrelationKind::identity};
}

/// Exponential model: entry(i,j) = r^(j-i) above the diagonal, Hermitian below.
inline CorrelationMatrix build_exponential_correlation(int dim, cdouble r) {
  detail::require(dim >= 1, "build_exponential_correlation: dim must be >= 1");
  detail::require(std::abs(r) <= 1.0, "build_exponential_correlation: |r| must be <= 1");
  CMatrix c(dim, dim);
  for (int i = 0; i < dim; ++i) {
    c(i, i) = 1.0;
    cdouble power = 1.0;
    for (int j = i + 1; j < dim; ++j) {
      power *= r;
      c(i, j) = power;
      c(j, i) = std::conj(power);
    }
  }
  return {std::move(c), CorrelationKind::bs_exponential};
}

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

/// Square planar RIS in the y-z plane; element i sits at
/// [0, mod(i, s) d, floor(i / s) d] with s = sqrt(n_elements) (zero-based i).
inline CorrelationMatrix build_sinc_correlation(int n_elements, double spacing,
                                                double wavelength) {
  detail::require(n_elements >= 1, "build_sinc_correlation: n_elements must be >= 1");
  detail::require(spacing > 0.0 && wavelength > 0.0,
                  "build_sinc_correlation: spacing and wavelength must be positive");
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_elements))));
  detail::require(side * side == n_elements,
                  "build_sinc_correlation: n_elements must be a perfect square");
  CMatrix c(n_elements, n_elements);
  for (int i = 0; i < n_elements; ++i) {
    const double yi = (i % side) * spacing;
    const double zi = (i / side) * spacing;
    for (int j = i; j < n_elements; ++j) {
      const double yj = (j % side) * spacing;
      const double zj = (j / side) * spacing;
      const double dist = std::hypot(yi - yj, zi - zj);
      const double v = sinc(2.0 * dist / wavelength);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return {std::move(c), CorrelationKind::ris_sinc};
}

inline double path_loss(double distance, double exponent, double beta0) {
  detail::require(distance > 0.0, "path_loss: distance must be positive");
  return beta0 * std::pow(distance, -exponent);
}

/// Hermitian square root F = U sqrt(max(L, 0)) U^H, so F F^H = C up to clamping.
inline CMatrix psd_factor(const CorrelationMatrix& c) {
  detail::require(c.entries.rows() == c.entries.cols(), "psd_factor: matrix must be square");
  if (c.kind == CorrelationKind::identity) return c.entries;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(c.entries);
  if (eig.info() != Eigen::Success) throw NumericalFailure("psd_factor: eigendecomposition failed");
  const RVector& lambda = eig.eigenvalues();
  if (lambda.minCoeff() < kPsdFloor) {
    throw NotPsdError("psd_factor: min eigenvalue " + std::to_string(lambda.minCoeff()) +
                      " below floor");
  }
  const RVector root = lambda.cwiseMax(0.0).cwiseSqrt();
  const CMatrix& u = eig.eigenvectors();
  return u * root.asDiagonal() * u.adjoint();
}

struct ChannelStatistics {
  CorrelationMatrix c_bs;                     // M x M
  CorrelationMatrix c_ris_rx;                 // N x N
  std::vector<CorrelationMatrix> c_ris_user;  // K of N x N
  double beta_br = 0.0;
  std::vector<double> beta_ru;

  int num_antennas() const { return c_bs.dim(); }
  int num_elements() const { return c_ris_rx.dim(); }
  int num_users() const { return static_cast<int>(c_ris_user.size()); }

  void validate() const {
    detail::require(beta_br > 0.0, "ChannelStatistics: beta_br must be positive");
    detail::require(beta_ru.size() == c_ris_user.size(),
                    "ChannelStatistics: beta_ru and c_ris_user sizes differ");
    detail::require(!c_ris_user.empty(), "ChannelStatistics: no users");
    for (double b : beta_ru)
      detail::require(b > 0.0, "ChannelStatistics: every beta_ru must be positive");
    for (const auto& c : c_ris_user)
      detail::require(c.dim() == num_elements(),
                      "ChannelStatistics: user correlation dimension mismatch");
  }
};

/// Uplink training parameters. Orthogonal pilots reduce the per-user
/// observation to y_k = h_k + n with n ~ CN(0, noise / (tau * power) I).
struct PilotConfig {
  int tau = 1;
  double power = 0.1;
  double noise = 1.0;

  double noise_ratio() const { return noise / (static_cast<double>(tau) * power); }
};

struct ChannelRealization {
  CMatrix g;                  // M x N
  std::vector<CVector> v;     // K of N
  std::vector<CVector> h;     // K of M, h_k = G diag(b) v_k
  CMatrix pilot_noise;        // M x K, already scaled by 1/sqrt(tau P_p)

  CVector pilot_observation(int k) const { return h[k] + pilot_noise.col(k); }
};

namespace detail {

// Per-trial stream layout shared by the sampling routines.
inline constexpr std::uint64_t kStreamBsRis = 0;
inline std::uint64_t user_stream(int k) { return 1 + static_cast<std::uint64_t>(k); }

}  // namespace detail

/// Draws one full realization (including the M x N matrix G).
inline ChannelRealization sample_realization(const ChannelStatistics& stats,
                                             const PhaseShifts& theta,
                                             const PilotConfig& pilot, std::uint64_t seed,
                                             std::uint64_t trial = 0) {
  stats.validate();
  const int m = stats.num_antennas();
  const int n = stats.num_elements();
  const int k_users = stats.num_users();
  detail::require(theta.size() == n, "sample_realization: phase vector size mismatch");
  detail::require(pilot.noise >= 0.0 && pilot.power > 0.0 && pilot.tau >= 1,
                  "sample_realization: invalid pilot configuration");

  const CMatrix sqrt_bs = psd_factor(stats.c_bs);
  const CMatrix sqrt_rx = psd_factor(stats.c_ris_rx);

  ChannelRealization out;
  Engine rng = make_engine(seed, trial, detail::kStreamBsRis);
  const CMatrix g_tilde = complex_gaussian(rng, m, n);
  out.g = std::sqrt(stats.beta_br) * sqrt_bs * g_tilde * sqrt_rx;

  const CVector b = theta.phasors();
  const double noise_var = pilot.noise_ratio();
  out.pilot_noise = CMatrix::Zero(m, k_users);
  for (int k = 0; k < k_users; ++k) {
    Engine urng = make_engine(seed, trial, detail::user_stream(k));
    const CVector v_tilde = complex_gaussian_vector(urng, n);
    CVector v = std::sqrt(stats.beta_ru[k]) * (psd_factor(stats.c_ris_user[k]) * v_tilde);
    out.h.push_back(out.g * b.cwiseProduct(v));
    out.v.push_back(std::move(v));
    if (noise_var > 0.0) {
      CVector noise = complex_gaussian_vector(urng, m, noise_var);
      out.pilot_noise.col(k) = noise;
    }
  }
  return out;
}

/// Cascaded-channel sampler for Monte-Carlo loops. Square-root factors are
/// computed once; each draw forms h_k = sqrt(b_BR) C_B^{1/2} G~ (C_R^{1/2} diag(b) v_k)
/// without materializing G. Same distribution as sample_realization.
class CascadedSampler {
 public:
  CascadedSampler(const ChannelStatistics& stats, const PhaseShifts& theta,
                  const PilotConfig& pilot)
      : m_(stats.num_antennas()), n_(stats.num_elements()), k_(stats.num_users()) {
    stats.validate();
    detail::require(theta.size() == n_, "CascadedSampler: phase vector size mismatch");
    sqrt_bs_ = std::sqrt(stats.beta_br) * psd_factor(stats.c_bs);
    bs_is_identity_ = stats.c_bs.kind == CorrelationKind::identity;
    const CMatrix sqrt_rx = psd_factor(stats.c_ris_rx);
    const CVector b = theta.phasors();
    for (int k = 0; k < k_; ++k) {
      // C_R^{1/2} diag(b) sqrt(beta_k) C_k^{1/2}
      CMatrix f = sqrt_rx * b.asDiagonal() * psd_factor(stats.c_ris_user[k]);
      user_factor_.push_back(std::sqrt(stats.beta_ru[k]) * f);
    }
    noise_var_ = pilot.noise_ratio();
  }

  int num_users() const { return k_; }

  /// Fills h (M x K) and pilot observations y (M x K) for one trial.
  void draw(std::uint64_t seed, std::uint64_t trial, CMatrix& h, CMatrix& y) const {
    Engine rng = make_engine(seed, trial, detail::kStreamBsRis);
    g_tilde_.resize(m_, n_);
    fill_complex_gaussian(rng, g_tilde_);
    x_.resize(n_, k_);
    noise_.resize(m_, k_);
    for (int k = 0; k < k_; ++k) {
      Engine urng = make_engine(seed, trial, detail::user_stream(k));
      v_tilde_.resize(n_);
      fill_complex_gaussian(urng, v_tilde_);
      x_.col(k).noalias() = user_factor_[k] * v_tilde_;
      if (noise_var_ > 0.0) {
        auto col = noise_.col(k);
        fill_complex_gaussian(urng, col, noise_var_);
      } else {
        noise_.col(k).setZero();
      }
    }
    if (bs_is_identity_) {
      h.noalias() = g_tilde_ * x_;
      h *= sqrt_bs_(0, 0);
    } else {
      tmp_.noalias() = g_tilde_ * x_;
      h.noalias() = sqrt_bs_ * tmp_;
    }
    y = h + noise_;
  }

 private:
  int m_, n_, k_;
  CMatrix sqrt_bs_;
  bool bs_is_identity_ = false;
  std::vector<CMatrix> user_factor_;
  double noise_var_ = 0.0;
  // Scratch; a sampler is used by one thread at a time.
  mutable CMatrix g_tilde_, x_, noise_, tmp_;
  mutable CVector v_tilde_;
};

/// Planar deployment used by the experiments (coordinates in metres).
struct Geometry {
  Eigen::Vector2d bs_position{0.0, 0.0};
  Eigen::Vector2d ris_position{0.0, 50.0};
  std::vector<Eigen::Vector2d> user_positions;
  double element_spacing = 0.025;
  double wavelength = 0.1;

  double bs_ris_distance() const { return (ris_position - bs_position).norm(); }
  double ris_user_distance(int k) const { return (user_positions[k] - ris_position).norm(); }

  void validate() const {
    detail::require(bs_ris_distance() > 0.0, "Geometry: BS and RIS coincide");
    for (std::size_t k = 0; k < user_positions.size(); ++k) {
      detail::require(ris_user_distance(static_cast<int>(k)) > 0.0,
                      "Geometry: user coincides with RIS");
      detail::require((user_positions[k] - bs_position).norm() > 0.0,
                      "Geometry: user coincides with BS");
    }
    detail::require(element_spacing > 0.0 && wavelength > 0.0,
                    "Geometry: spacing and wavelength must be positive");
  }
};

/// BS at the origin, RIS at (0, 50); users on the far half of a circle of
/// radius `radius` centred `offset` metres beyond the RIS on the BS-RIS axis.
inline Geometry semicircle_geometry(int num_users, std::uint64_t seed, double radius = 5.0,
                                    double offset = 10.0, double spacing_over_lambda = 0.25,
                                    double wavelength = 0.1) {
  detail::require(num_users >= 1, "semicircle_geometry: need at least one user");
  Geometry geo;
  geo.wavelength = wavelength;
  geo.element_spacing = spacing_over_lambda * wavelength;
  const Eigen::Vector2d axis = (geo.ris_position - geo.bs_position).normalized();
  const Eigen::Vector2d centre = geo.ris_position + offset * axis;
  const Eigen::Vector2d normal{-axis.y(), axis.x()};
  Engine rng = make_engine(seed, 0, 0x5E41C12CULL);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  for (int k = 0; k < num_users; ++k) {
    const double phi = angle(rng);
    geo.user_positions.push_back(centre + radius * (std::cos(phi) * normal + std::sin(phi) * axis));
  }
  geo.validate();
  return geo;
}

struct LargeScaleModel {
  int num_antennas = 32;
  int num_elements = 36;
  double beta0 = 1e-2;
  double exponent_br = 2.2;
  double exponent_ru = 2.1;
  cdouble bs_correlation = 0.5;
  bool correlated = true;  // false: all correlation matrices are identities
};

inline ChannelStatistics statistics_from_geometry(const Geometry& geo, const LargeScaleModel& model) {
  geo.validate();
  ChannelStatistics stats;
  const int k_users = static_cast<int>(geo.user_positions.size());
  if (model.correlated) {
    stats.c_bs = build_exponential_correlation(model.num_antennas, model.bs_correlation);
    stats.c_ris_rx = build_sinc_correlation(model.num_elements, geo.element_spacing, geo.wavelength);
  } else {
    stats.c_bs = identity_correlation(model.num_antennas);
    stats.c_ris_rx = identity_correlation(model.num_elements);
  }
  stats.beta_br = path_loss(geo.bs_ris_distance(), model.exponent_br, model.beta0);
  for (int k = 0; k < k_users; ++k) {
    stats.c_ris_user.push_back(stats.c_ris_rx);
    stats.beta_ru.push_back(path_loss(geo.ris_user_distance(k), model.exponent_ru, model.beta0));
  }
  stats.validate();
  return stats;
}

/// Thermal noise power B k T 10^{NF/10} in watts (T = 290 K).
inline double thermal_noise_power(double bandwidth, double noise_figure_db) {
  detail::require(bandwidth > 0.0, "thermal_noise_power: bandwidth must be positive");
  return bandwidth * 1.381e-23 * 290.0 * std::pow(10.0, noise_figure_db / 10.0);
}

}  // namespace rismimo
