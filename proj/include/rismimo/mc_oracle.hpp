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


// Monte-Carlo estimators for the expectations behind the closed forms.
// Trials are split into contiguous batches; each batch is accumulated
// sequentially and batches are combined in index order, so results do not
// depend on the number of worker threads. Standard errors are batch means.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "rismimo/deterministic_sinr.hpp"
#include "rismimo/fbl_rate.hpp"

namespace rismimo {

struct McOptions {
  int batches = 20;
  int threads = 0;  // 0: hardware concurrency
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

namespace detail {

inline int worker_count(const McOptions& opt, int batches) {
  int t = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(t, 1, batches);
}

/// Calls fn(worker_state, batch, first_trial, count) for every batch and
/// returns the per-batch results in batch order.
template <class Result, class MakeState, class Fn>
std::vector<Result> run_batches(std::int64_t trials, const McOptions& opt, MakeState make_state,
                                Fn fn) {
  detail::require(opt.batches >= 2, "run_batches: need at least two batches");
  detail::require(trials >= opt.batches, "run_batches: fewer trials than batches");
  const int nb = opt.batches;
  std::vector<Result> out(nb);
  std::atomic<int> next{0};
  auto work = [&] {
    auto state = make_state();
    for (int b = next++; b < nb; b = next++) {
      const std::int64_t first = trials * b / nb;
      const std::int64_t last = trials * (b + 1) / nb;
      out[b] = fn(state, b, first, last - first);
    }
  };
  const int nt = worker_count(opt, nb);
  if (nt == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < nt; ++i) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  return out;
}

inline Estimate batch_estimate(double point, const std::vector<double>& per_batch) {
  const double nb = static_cast<double>(per_batch.size());
  double mean = 0.0;
  for (double v : per_batch) mean += v;
  mean /= nb;
  double ss = 0.0;
  for (double v : per_batch) ss += (v - mean) * (v - mean);
  return {point, std::sqrt(ss / (nb - 1.0) / nb)};
}

/// Per-batch sums of x_{k,k'} = h_k^H hhat_{k'} and of per-realization rates.
struct GainSums {
  std::int64_t n = 0;
  CMatrix x;       // sum of x
  RMatrix x2;      // sum of |x|^2
  RVector rate;    // sum of per-realization rates
  RVector nh2;     // sum of ||h_k - hhat_k||^2
  RVector h2;      // sum of ||h_k||^2

  void init(int k_users) {
    x = CMatrix::Zero(k_users, k_users);
    x2 = RMatrix::Zero(k_users, k_users);
    rate = RVector::Zero(k_users);
    nh2 = RVector::Zero(k_users);
    h2 = RVector::Zero(k_users);
  }

  void add(const GainSums& o) {
    n += o.n;
    x += o.x;
    x2 += o.x2;
    rate += o.rate;
    nh2 += o.nh2;
    h2 += o.h2;
  }
};

/// Rate at SINR gamma; the kernel's limit at gamma -> 0 is zero.
inline double rate_or_zero(const WeightedRateModel& model, int k, double gamma) {
  return gamma > 0.0 ? model.rate(k, gamma) : 0.0;
}

// `power` and `model` may be null when only the gain moments are needed.
inline std::vector<GainSums> sample_gains(const ChannelStatistics& stats, const PhaseShifts& theta,
                                          const PilotConfig& pilot, std::int64_t trials,
                                          std::uint64_t seed, const McOptions& opt,
                                          const RVector* power, const WeightedRateModel* model) {
  const int k_users = stats.num_users();
  std::vector<CMatrix> filters;
  for (int k = 0; k < k_users; ++k)
    filters.push_back(build_estimator(stats, theta, pilot, k).r_filter);
  struct State {
    CascadedSampler sampler;
    CMatrix h, y, hhat, x;
  };
  auto make_state = [&] { return State{CascadedSampler(stats, theta, pilot), {}, {}, {}, {}}; };
  auto fn = [&](State& s, int, std::int64_t first, std::int64_t count) {
    GainSums acc;
    acc.init(k_users);
    acc.n = count;
    for (std::int64_t t = first; t < first + count; ++t) {
      s.sampler.draw(seed, static_cast<std::uint64_t>(t), s.h, s.y);
      s.hhat.resize(s.h.rows(), k_users);
      for (int k = 0; k < k_users; ++k) s.hhat.col(k).noalias() = filters[k] * s.y.col(k);
      s.x.noalias() = s.h.adjoint() * s.hhat;
      acc.x += s.x;
      acc.x2 += s.x.cwiseAbs2();
      for (int k = 0; k < k_users; ++k) {
        acc.nh2(k) += (s.h.col(k) - s.hhat.col(k)).squaredNorm();
        acc.h2(k) += s.h.col(k).squaredNorm();
      }
      if (power != nullptr) {
        for (int k = 0; k < k_users; ++k) {
          double interference = pilot.noise;
          for (int kp = 0; kp < k_users; ++kp)
            if (kp != k) interference += (*power)(kp) * std::norm(s.x(k, kp));
          const double gamma = (*power)(k) * std::norm(s.x(k, k)) / interference;
          acc.rate(k) += rate_or_zero(*model, k, gamma);
        }
      }
    }
    return acc;
  };
  return run_batches<GainSums>(trials, opt, make_state, fn);
}

inline GainSums total(const std::vector<GainSums>& parts) {
  GainSums all;
  all.init(static_cast<int>(parts.front().x.rows()));
  for (const auto& p : parts) all.add(p);
  return all;
}

// Moment estimates from one set of sums.
struct Moments {
  RVector signal, self_var;
  RMatrix cross;
};

inline Moments moments(const GainSums& s) {
  const int k_users = static_cast<int>(s.x.rows());
  const double n = static_cast<double>(s.n);
  Moments m;
  m.signal.resize(k_users);
  m.self_var.resize(k_users);
  m.cross = s.x2 / n;
  for (int k = 0; k < k_users; ++k) {
    const cdouble mean = s.x(k, k) / n;
    const double var = (s.x2(k, k) / n - std::norm(mean)) * n / (n - 1.0);
    m.self_var(k) = var;
    // |mean|^2 overshoots |E x|^2 by var / n on average.
    m.signal(k) = std::norm(mean) - var / n;
    m.cross(k, k) = 0.0;
  }
  return m;
}

}  // namespace detail

/// Empirical SINR terms. signal = |E{h_k^H hhat_k}|^2, self_var = Var{h_k^H hhat_k},
/// cross(k, k') = E{|h_k^H hhat_k'|^2} for k' != k (zero on the diagonal).
struct McTerms {
  RVector signal, signal_se;
  RVector self_var, self_var_se;
  RMatrix cross, cross_se;
  double noise = 0.0;
  std::int64_t trials = 0;

  int num_users() const { return static_cast<int>(signal.size()); }

  /// Breakdown with E_k + UI_{k,k} folded into the leakage slot.
  SinrBreakdown breakdown(std::uint64_t stamp = 0) const {
    SinrBreakdown bd;
    bd.signal = signal;
    bd.leakage_coeff = self_var;
    bd.interference = cross;
    bd.noise = noise;
    bd.stamp = stamp;
    return bd;
  }
};

namespace detail {

inline McTerms terms_from(const std::vector<GainSums>& parts, double noise) {
  const GainSums all = total(parts);
  const Moments m = moments(all);
  const int k_users = static_cast<int>(m.signal.size());
  std::vector<Moments> per;
  for (const auto& p : parts) per.push_back(moments(p));
  McTerms out;
  out.signal = m.signal;
  out.self_var = m.self_var;
  out.cross = m.cross;
  out.signal_se.resize(k_users);
  out.self_var_se.resize(k_users);
  out.cross_se = RMatrix::Zero(k_users, k_users);
  std::vector<double> v(parts.size());
  for (int k = 0; k < k_users; ++k) {
    for (std::size_t b = 0; b < per.size(); ++b) v[b] = per[b].signal(k);
    out.signal_se(k) = batch_estimate(0.0, v).stderr_;
    for (std::size_t b = 0; b < per.size(); ++b) v[b] = per[b].self_var(k);
    out.self_var_se(k) = batch_estimate(0.0, v).stderr_;
    for (int kp = 0; kp < k_users; ++kp) {
      if (kp == k) continue;
      for (std::size_t b = 0; b < per.size(); ++b) v[b] = per[b].cross(k, kp);
      out.cross_se(k, kp) = batch_estimate(0.0, v).stderr_;
    }
  }
  out.noise = noise;
  out.trials = all.n;
  return out;
}

}  // namespace detail

inline McTerms mc_terms(const ChannelStatistics& stats, const PhaseShifts& theta,
                        const PilotConfig& pilot, std::int64_t trials, std::uint64_t seed,
                        const McOptions& opt = {}) {
  detail::require(trials >= 100, "mc_terms: need at least 100 trials");
  const auto parts =
      detail::sample_gains(stats, theta, pilot, trials, seed, opt, nullptr, nullptr);
  return detail::terms_from(parts, pilot.noise);
}

/// Per-user E||h - hhat||^2 / E||h||^2.
inline std::vector<Estimate> mc_nmse(const ChannelStatistics& stats, const PhaseShifts& theta,
                                     const PilotConfig& pilot, std::int64_t trials,
                                     std::uint64_t seed, const McOptions& opt = {}) {
  detail::require(trials >= 100, "mc_nmse: need at least 100 trials");
  const auto parts =
      detail::sample_gains(stats, theta, pilot, trials, seed, opt, nullptr, nullptr);
  const detail::GainSums all = detail::total(parts);
  std::vector<Estimate> out;
  std::vector<double> v(parts.size());
  for (int k = 0; k < stats.num_users(); ++k) {
    for (std::size_t b = 0; b < parts.size(); ++b) v[b] = parts[b].nh2(k) / parts[b].h2(k);
    out.push_back(detail::batch_estimate(all.nh2(k) / all.h2(k), v));
  }
  return out;
}

/// Ergodic rates in bits/s/Hz. `uatf` assembles the use-and-then-forget SINR
/// from the empirical terms; `per_realization` averages the rate of the
/// instantaneous SINR p_k |h_k^H hhat_k|^2 / (sum_{k'!=k} p_k' |h_k^H hhat_k'|^2 + sigma^2).
struct McRate {
  RVector uatf_sinr;
  std::vector<Estimate> uatf;
  std::vector<Estimate> per_realization;
  McTerms terms;
};

inline McRate mc_ergodic_rate(const ChannelStatistics& stats, const PhaseShifts& theta,
                              const PilotConfig& pilot, const RVector& power,
                              const WeightedRateModel& model, std::int64_t trials,
                              std::uint64_t seed, const McOptions& opt = {}) {
  detail::require(trials >= 100, "mc_ergodic_rate: need at least 100 trials");
  const int k_users = stats.num_users();
  detail::require(power.size() == k_users && model.num_users() == k_users,
                  "mc_ergodic_rate: size mismatch");
  detail::require((power.array() >= 0.0).all(), "mc_ergodic_rate: negative power");
  const auto parts = detail::sample_gains(stats, theta, pilot, trials, seed, opt, &power, &model);
  McRate out;
  out.terms = detail::terms_from(parts, pilot.noise);
  const SinrBreakdown bd = out.terms.breakdown();
  out.uatf_sinr.resize(k_users);
  std::vector<RVector> batch_gamma;
  for (const auto& p : parts) {
    const detail::Moments m = detail::moments(p);
    SinrBreakdown b = bd;
    b.signal = m.signal;
    b.leakage_coeff = m.self_var;
    b.interference = m.cross;
    RVector g(k_users);
    for (int k = 0; k < k_users; ++k)
      g(k) = power(k) > 0.0 ? std::max(sinr_hat(b, power, k), 0.0) : 0.0;
    batch_gamma.push_back(g);
  }
  const detail::GainSums all = detail::total(parts);
  std::vector<double> v(parts.size());
  for (int k = 0; k < k_users; ++k) {
    const double g = power(k) > 0.0 ? std::max(sinr_hat(bd, power, k), 0.0) : 0.0;
    out.uatf_sinr(k) = g;
    for (std::size_t b = 0; b < parts.size(); ++b)
      v[b] = detail::rate_or_zero(model, k, batch_gamma[b](k));
    out.uatf.push_back(detail::batch_estimate(detail::rate_or_zero(model, k, g), v));
    for (std::size_t b = 0; b < parts.size(); ++b)
      v[b] = parts[b].rate(k) / static_cast<double>(parts[b].n);
    out.per_realization.push_back(
        detail::batch_estimate(all.rate(k) / static_cast<double>(all.n), v));
  }
  return out;
}

/// Deviation of an empirical matrix mean from its closed form.
struct IdentityReport {
  CMatrix closed;
  CMatrix empirical;
  double rel_dev = 0.0;  // ||emp - closed||_F / ||closed||_F (absolute if closed = 0)
  double tol = 0.02;
  std::int64_t trials = 0;
  bool pass = false;
};

namespace detail {

inline IdentityReport finish_report(CMatrix closed, CMatrix empirical, std::int64_t trials,
                                 double tol) {
  IdentityReport r;
  const double scale = closed.norm();
  const double dev = (empirical - closed).norm();
  r.rel_dev = scale > 0.0 ? dev / scale : dev;
  r.closed = std::move(closed);
  r.empirical = std::move(empirical);
  r.tol = tol;
  r.trials = trials;
  r.pass = r.rel_dev <= tol;
  return r;
}

template <class Fn>
CMatrix mc_matrix_mean(Eigen::Index rows, std::int64_t trials, const McOptions& opt, Fn sample) {
  auto parts = run_batches<CMatrix>(
      trials, opt, [] { return 0; },
      [&](int&, int, std::int64_t first, std::int64_t count) {
        CMatrix acc = CMatrix::Zero(rows, rows);
        for (std::int64_t t = first; t < first + count; ++t) acc += sample(t);
        return acc;
      });
  CMatrix sum = CMatrix::Zero(rows, rows);
  for (const auto& p : parts) sum += p;
  return sum / static_cast<double>(trials);
}

}  // namespace detail

inline constexpr int kIdentityMaxDim = 8;

/// E{V X V^H} = Tr{X} I_M for V (M x N) with i.i.d. CN(0, 1) entries.
inline IdentityReport check_second_moment(const CMatrix& x, int m, std::int64_t trials,
                                          std::uint64_t seed, double tol = 0.02,
                                          const McOptions& opt = {}) {
  const int n = static_cast<int>(x.rows());
  detail::require(x.cols() == n && n >= 1 && m >= 1, "check_second_moment: bad dimensions");
  detail::require(m <= kIdentityMaxDim && n <= kIdentityMaxDim,
                  "check_second_moment: dims capped at 8");
  const CMatrix emp = detail::mc_matrix_mean(m, trials, opt, [&](std::int64_t t) {
    Engine rng = make_engine(seed, static_cast<std::uint64_t>(t), 0);
    const CMatrix v = complex_gaussian(rng, m, n);
    return CMatrix(v * x * v.adjoint());
  });
  const CMatrix closed = x.trace() * CMatrix::Identity(m, m);
  return detail::finish_report(closed, emp, trials, tol);
}

/// E{V^H C V X V^H C V} = Tr{X} Tr{C^2} I_N + |Tr{C}|^2 X for Hermitian C (M x M).
inline IdentityReport check_fourth_moment(const CMatrix& x, const CMatrix& c,
                                          std::int64_t trials, std::uint64_t seed,
                                          double tol = 0.02, const McOptions& opt = {}) {
  const int n = static_cast<int>(x.rows());
  const int m = static_cast<int>(c.rows());
  detail::require(x.cols() == n && c.cols() == m && n >= 1 && m >= 1,
                  "check_fourth_moment: bad dimensions");
  detail::require(m <= kIdentityMaxDim && n <= kIdentityMaxDim,
                  "check_fourth_moment: dims capped at 8");
  detail::require(hermitian_defect(c) <= 1e-12 * std::max(1.0, c.norm()),
                  "check_fourth_moment: C must be Hermitian");
  const CMatrix emp = detail::mc_matrix_mean(n, trials, opt, [&](std::int64_t t) {
    Engine rng = make_engine(seed, static_cast<std::uint64_t>(t), 0);
    const CMatrix v = complex_gaussian(rng, m, n);
    const CMatrix a = v.adjoint() * c * v;
    return CMatrix(a * x * a);
  });
  const CMatrix closed = x.trace() * (c * c).trace() * CMatrix::Identity(n, n) +
                         std::norm(c.trace()) * x;
  return detail::finish_report(closed, emp, trials, tol);
}

/// Random test matrices for the identity checks: X Hermitian PSD (N x N),
/// C Hermitian with a unit-scale positive trace offset (M x M).
struct IdentityInstance {
  CMatrix x, c;
};

inline IdentityInstance random_identity_instance(int m, int n, std::uint64_t seed) {
  Engine rng = make_engine(seed, 0, 1);
  const CMatrix a = complex_gaussian(rng, n, n);
  const CMatrix b = complex_gaussian(rng, m, m);
  IdentityInstance out;
  out.x = a * a.adjoint() / static_cast<double>(n);
  out.c = 0.5 * (b + b.adjoint()) / std::sqrt(static_cast<double>(m)) +
          CMatrix::Identity(m, m);
  return out;
}

inline IdentityReport check_second_moment(int m, int n, std::int64_t trials, std::uint64_t seed,
                                          double tol = 0.02, const McOptions& opt = {}) {
  return check_second_moment(random_identity_instance(m, n, seed).x, m, trials, seed, tol, opt);
}

inline IdentityReport check_fourth_moment(int m, int n, std::int64_t trials, std::uint64_t seed,
                                          double tol = 0.02, const McOptions& opt = {}) {
  const IdentityInstance inst = random_identity_instance(m, n, seed);
  return check_fourth_moment(inst.x, inst.c, trials, seed, tol, opt);
}

/// One closed-form vs Monte-Carlo comparison.
struct ComparisonRow {
  std::string quantity;
  double closed_form = 0.0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double rel_gap = 0.0;
  bool pass = false;
};

inline ComparisonRow compare(std::string quantity, double closed, double mc, double se,
                             double n_sigma) {
  ComparisonRow r{std::move(quantity), closed, mc, se, 0.0, false};
  r.rel_gap = mc != 0.0 ? (closed - mc) / std::abs(mc) : closed - mc;
  r.pass = std::abs(closed - mc) <= n_sigma * se;
  return r;
}

/// Each closed-form term bracketed by its MC estimate +- n_sigma standard errors.
inline std::vector<ComparisonRow> compare_terms(const SinrBreakdown& closed, const McTerms& mc,
                                                double n_sigma = 3.0) {
  std::vector<ComparisonRow> rows;
  const int k_users = mc.num_users();
  detail::require(closed.num_users() == k_users, "compare_terms: size mismatch");
  for (int k = 0; k < k_users; ++k) {
    const std::string tag = std::to_string(k);
    rows.push_back(compare("signal_" + tag, closed.signal(k), mc.signal(k), mc.signal_se(k),
                           n_sigma));
    rows.push_back(compare("self_variance_" + tag,
                           closed.leakage_coeff(k) + closed.interference(k, k), mc.self_var(k),
                           mc.self_var_se(k), n_sigma));
    for (int kp = 0; kp < k_users; ++kp) {
      if (kp == k) continue;
      rows.push_back(compare("cross_" + tag + "_" + std::to_string(kp), closed.interference(k, kp),
                             mc.cross(k, kp), mc.cross_se(k, kp), n_sigma));
    }
  }
  return rows;
}

}  // namespace rismimo
