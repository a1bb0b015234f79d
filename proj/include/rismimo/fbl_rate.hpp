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

// Finite-blocklength (normal approximation) rate of a Gaussian channel and
// the scalar helpers the optimizer needs to invert it.
//
// With x = 1/SINR the per-user kernel is
//   f(x) = ln(1 + 1/x) - alpha * sqrt((2x + 1) / (1 + x)^2),
//   alpha = Q^{-1}(eps) / sqrt(L (1 - eta)),
// and the rate in bits/s/Hz is (1 - eta) / ln 2 * f(x). f is nonnegative iff
// x <= g^{-1}(alpha) with g(x) = (1 + x) ln(1 + 1/x) / sqrt(2x + 1).

#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "rismimo/linalg.hpp"

namespace rismimo {

/// Lowest SINR at which the logarithmic SCA surrogate is a valid lower bound.
inline const double kSinrValidityThreshold = (std::sqrt(17.0) - 3.0) / 4.0;

struct QosTarget {
  double rate_req = 0.0;  // bits/s/Hz
  double dep = 1e-7;      // decoding error probability
  double weight = 1.0;

  void validate() const {
    detail::require(dep > 0.0 && dep < 0.5, "QosTarget: dep must lie in (0, 0.5)");
    detail::require(rate_req >= 0.0, "QosTarget: rate_req must be nonnegative");
    detail::require(weight > 0.0 && weight <= 1.0, "QosTarget: weight must lie in (0, 1]");
  }
};

struct BlocklengthBudget {
  double blocklength = 200.0;  // L
  double pilot_length = 5.0;   // tau

  double eta() const { return pilot_length / blocklength; }

  void validate() const {
    detail::require(pilot_length > 0.0 && pilot_length < blocklength,
                    "BlocklengthBudget: need 0 < tau < L");
  }
};

/// Gaussian tail Q(x) = P(N(0,1) > x).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Q^{-1}(eps) by bisection on erfc, polished with Newton steps.
inline double q_inv(double eps) {
  detail::require(eps > 0.0 && eps < 1.0, "q_inv: eps must lie in (0, 1)");
  if (eps == 0.5) return 0.0;
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > eps) lo = mid; else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
    if (pdf <= 0.0) break;
    const double step = (q_function(x) - eps) / pdf;
    if (!std::isfinite(step) || std::abs(step) > 1e-6) break;
    x += step;
  }
  return x;
}

inline double dispersion_alpha(double dep, const BlocklengthBudget& budget) {
  return q_inv(dep) / std::sqrt(budget.blocklength * (1.0 - budget.eta()));
}

/// Normal-approximation rate; may be negative.
inline double fbl_rate(double gamma, double eps, double blocklength, double eta) {
  detail::require(gamma >= 0.0, "fbl_rate: SINR must be nonnegative");
  const double v = 1.0 - 1.0 / ((1.0 + gamma) * (1.0 + gamma));
  return (1.0 - eta) * std::log2(1.0 + gamma) -
         q_inv(eps) / kLn2 * std::sqrt((1.0 - eta) * v / blocklength);
}

inline double f_kernel(double x, double alpha) {
  detail::require(x > 0.0, "f_kernel: x must be positive");
  return std::log1p(1.0 / x) - alpha * std::sqrt((2.0 * x + 1.0) / ((1.0 + x) * (1.0 + x)));
}

inline double g_kernel(double x) {
  detail::require(x > 0.0, "g_kernel: x must be positive");
  return (1.0 + x) * std::log1p(1.0 / x) / std::sqrt(2.0 * x + 1.0);
}

namespace detail {

inline constexpr double kBracketLo = 1e-12;
inline constexpr double kBracketHi = 1e12;

// Root of a strictly decreasing function on [lo, hi], bisected in log space.
inline double bisect_decreasing(const std::function<double(double)>& fn, double target,
                                double lo, double hi) {
  double llo = std::log(lo), lhi = std::log(hi);
  for (int it = 0; it < 400; ++it) {
    const double lmid = 0.5 * (llo + lhi);
    if (fn(std::exp(lmid)) > target) llo = lmid; else lhi = lmid;
    if (lhi - llo < 1e-15) break;
  }
  return std::exp(0.5 * (llo + lhi));
}

}  // namespace detail

/// x with g(x) = alpha.
inline double g_inv(double alpha) {
  detail::require(alpha > 0.0, "g_inv: alpha must be positive");
  const double lo = detail::kBracketLo, hi = detail::kBracketHi;
  if (g_kernel(hi) >= alpha) return hi;
  if (g_kernel(lo) <= alpha) return lo;
  return detail::bisect_decreasing(g_kernel, alpha, lo, hi);
}

/// Largest admissible x = 1/SINR for a given alpha (infinite without dispersion).
inline double zero_rate_point(double alpha) {
  return alpha > 0.0 ? g_inv(alpha) : detail::kBracketHi;
}

struct RateBound {
  double value = 0.0;          // bits/s/Hz, may be negative
  bool above_boundary = true;  // 1/SINR within the nonnegative-rate region
};

/// Jensen lower bound (1 - eta)/ln 2 * f(1/gamma_hat).
inline RateBound rate_lower_bound(double gamma_hat, double alpha, double eta) {
  detail::require(gamma_hat > 0.0, "rate_lower_bound: SINR must be positive");
  RateBound out;
  const double x = 1.0 / gamma_hat;
  out.value = (1.0 - eta) / kLn2 * f_kernel(x, alpha);
  out.above_boundary = alpha <= 0.0 || x <= g_inv(alpha);
  return out;
}

/// Smallest SINR meeting rate_req at the target DEP:
/// 1 / f^{-1}(rate_req ln 2 / (1 - eta)).
inline double chi_min(const QosTarget& target, const BlocklengthBudget& budget) {
  target.validate();
  budget.validate();
  const double alpha = dispersion_alpha(target.dep, budget);
  const double level = target.rate_req * kLn2 / (1.0 - budget.eta());
  const double hi = zero_rate_point(alpha);
  if (level <= 0.0) return 1.0 / hi;
  const double lo = detail::kBracketLo;
  auto fn = [alpha](double x) { return f_kernel(x, alpha); };
  if (fn(lo) < level) throw InfeasibleTargetError("chi_min: rate requirement not attainable");
  const double x = detail::bisect_decreasing(fn, level, lo, hi);
  return 1.0 / x;
}

/// Weighted sum of per-user Jensen lower-bound rates as a function of SINR.
struct WeightedRateModel {
  RVector weights;  // w_k
  RVector alphas;   // alpha_k (0 gives the Shannon rate)
  double eta = 0.0;

  int num_users() const { return static_cast<int>(weights.size()); }

  /// (1 - eta)/ln 2 * f(1/gamma, alpha_k)
  double rate(int k, double gamma) const {
    return (1.0 - eta) / kLn2 * f_kernel(1.0 / gamma, alphas(k));
  }

  double wsr(const RVector& gamma) const {
    double total = 0.0;
    for (int k = 0; k < num_users(); ++k) total += weights(k) * rate(k, gamma(k));
    return total;
  }

  /// d(w_k * rate_k)/d gamma, with gamma floored at 1e-9 where the dispersion
  /// derivative diverges. Feasible iterates sit far above the floor.
  double weighted_slope(int k, double gamma) const {
    const double g = std::max(gamma, 1e-9);
    const double w_bar = weights(k) * (1.0 - eta) / kLn2;
    const double w_tilde = w_bar * alphas(k);
    const double one_plus = 1.0 + g;
    const double root = std::sqrt(1.0 - 1.0 / (one_plus * one_plus));
    return w_bar / one_plus - w_tilde / (one_plus * one_plus * one_plus * root);
  }

  /// Same weights with alpha = 0 (infinite-blocklength objective).
  WeightedRateModel shannon() const {
    WeightedRateModel out = *this;
    out.alphas.setZero();
    return out;
  }
};

inline WeightedRateModel make_rate_model(const std::vector<QosTarget>& targets,
                                         const BlocklengthBudget& budget) {
  budget.validate();
  WeightedRateModel m;
  const int k_users = static_cast<int>(targets.size());
  m.weights.resize(k_users);
  m.alphas.resize(k_users);
  m.eta = budget.eta();
  for (int k = 0; k < k_users; ++k) {
    targets[k].validate();
    m.weights(k) = targets[k].weight;
    m.alphas(k) = dispersion_alpha(targets[k].dep, budget);
  }
  return m;
}

}  // namespace rismimo
