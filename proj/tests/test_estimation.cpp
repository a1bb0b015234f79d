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


#include <gtest/gtest.h>

#include "rismimo/estimation.hpp"
#include "support.hpp"

namespace rismimo {
namespace {

ChannelStatistics identity_stats(int m, int n, int k_users, double beta_br, double beta_ru) {
  ChannelStatistics s;
  s.c_bs = identity_correlation(m);
  s.c_ris_rx = identity_correlation(n);
  for (int k = 0; k < k_users; ++k) {
    s.c_ris_user.push_back(identity_correlation(n));
    s.beta_ru.push_back(beta_ru);
  }
  s.beta_br = beta_br;
  return s;
}

TEST(ComputeZ, IdentityReceiveCorrelationGivesTraceN) {
  const auto inst = testing::random_instance(1, 3, 4, 1);
  const PhaseCorrelation z =
      compute_z(inst.theta, inst.stats.c_ris_user[0], identity_correlation(4));
  EXPECT_NEAR(z.trace.real(), inst.stats.c_ris_user[0].entries.trace().real(), 1e-12);
  const PhaseCorrelation zi = compute_z(inst.theta, identity_correlation(4), identity_correlation(4));
  EXPECT_NEAR(zi.trace.real(), 4.0, 1e-12);
}

TEST(ComputeZ, ZeroPhaseIsPlainProduct) {
  const auto inst = testing::random_instance(2, 3, 4, 1);
  const PhaseCorrelation z =
      compute_z(PhaseShifts::zeros(4), inst.stats.c_ris_user[0], inst.stats.c_ris_rx);
  const CMatrix direct = inst.stats.c_ris_user[0].entries * inst.stats.c_ris_rx.entries;
  EXPECT_LT((z.z - direct).norm(), 1e-13);
}

TEST(ComputeZ, MatchesNaiveLoops) {
  const auto inst = testing::random_instance(3, 3, 4, 1);
  const CMatrix& cu = inst.stats.c_ris_user[0].entries;
  const CMatrix& cr = inst.stats.c_ris_rx.entries;
  const CVector b = inst.theta.phasors();
  const PhaseCorrelation z = compute_z(inst.theta, inst.stats.c_ris_user[0], inst.stats.c_ris_rx);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      cdouble acc = 0.0;
      for (int l = 0; l < 4; ++l) acc += b(i) * cu(i, l) * std::conj(b(l)) * cr(l, j);
      EXPECT_LT(std::abs(acc - z.z(i, j)), 1e-13);
    }
}

TEST(Lmmse, FilterIsGainTimesW) {
  const auto inst = testing::random_instance(4, 5, 4, 2);
  for (int k = 0; k < 2; ++k) {
    const EstimatorState st = build_estimator(inst.stats, inst.theta, inst.pilot, k);
    const double gain = inst.stats.beta_br * inst.stats.beta_ru[k] * st.z_trace.real();
    EXPECT_NEAR(st.gain, gain, 1e-12 * gain);
    EXPECT_LT((st.r_filter - gain * st.w_matrix).norm(), 1e-12 * st.r_filter.norm());
    EXPECT_GE(st.z_trace.real(), -1e-10);
  }
}

TEST(Lmmse, MatchesDirectInverse) {
  const auto inst = testing::random_instance(5, 5, 4, 1);
  const EstimatorState st = build_estimator(inst.stats, inst.theta, inst.pilot, 0);
  const CMatrix& cb = inst.stats.c_bs.entries;
  const CMatrix reg = st.gain * cb + inst.pilot.noise_ratio() * CMatrix::Identity(5, 5);
  const CMatrix direct = st.gain * cb * reg.inverse();
  EXPECT_LT((st.r_filter - direct).norm(), 1e-12 * direct.norm());
}

TEST(Lmmse, NoiselessLimitIsIdentity) {
  auto inst = testing::random_instance(6, 4, 4, 1);
  inst.pilot.noise = 1e-14;
  const EstimatorState st = build_estimator(inst.stats, inst.theta, inst.pilot, 0);
  EXPECT_LT((st.r_filter - CMatrix::Identity(4, 4)).norm(), 1e-8);
  EXPECT_LT(nmse(st.r_filter, inst.stats.c_bs), 1e-8);
}

TEST(Lmmse, IdentityCorrelationsScalarFilter) {
  const ChannelStatistics s = identity_stats(6, 9, 1, 0.4, 0.7);
  PilotConfig pilot{1, 0.2, 0.3};
  const EstimatorState st = build_estimator(s, PhaseShifts::zeros(9), pilot, 0);
  const double bbn = 0.4 * 0.7 * 9.0;
  const double c = bbn / (bbn + pilot.noise_ratio());
  EXPECT_LT((st.r_filter - c * CMatrix::Identity(6, 6)).norm(), 1e-12);
}

TEST(Lmmse, VanishingPathLossGivesZeroFilter) {
  const ChannelStatistics s = identity_stats(4, 4, 1, 0.5, 1e-30);
  const EstimatorState st = build_estimator(s, PhaseShifts::zeros(4), PilotConfig{1, 0.1, 1.0}, 0);
  EXPECT_LT(st.r_filter.norm(), 1e-25);
}

TEST(Lmmse, RejectsBadPilot) {
  const auto inst = testing::random_instance(7, 3, 4, 2);
  PilotConfig p = inst.pilot;
  p.tau = 1;
  EXPECT_THROW(build_estimator(inst.stats, inst.theta, p, 0), InvalidArgument);
  p = inst.pilot;
  p.power = 0.0;
  EXPECT_THROW(build_estimator(inst.stats, inst.theta, p, 0), InvalidArgument);
  EXPECT_THROW(build_estimator(inst.stats, inst.theta, inst.pilot, 2), InvalidArgument);
}

TEST(Estimate, TrivialFiltersAndNaiveLoop) {
  Engine rng = make_engine(1, 0, 0);
  const CVector y = complex_gaussian_vector(rng, 5);
  EXPECT_EQ(estimate(CMatrix::Identity(5, 5), y), y);
  EXPECT_EQ(estimate(CMatrix::Zero(5, 5), y), CVector(CVector::Zero(5)));
  const CMatrix r = complex_gaussian(rng, 5, 5);
  const CVector out = estimate(r, y);
  for (int i = 0; i < 5; ++i) {
    cdouble acc = 0.0;
    for (int j = 0; j < 5; ++j) acc += r(i, j) * y(j);
    EXPECT_LT(std::abs(acc - out(i)), 1e-13);
  }
  EXPECT_THROW(estimate(r, CVector::Zero(4)), InvalidArgument);
}

TEST(Nmse, TrivialFilters) {
  const CorrelationMatrix cb = build_exponential_correlation(4, 0.5);
  EXPECT_NEAR(nmse(CMatrix::Identity(4, 4), cb), 0.0, 1e-15);
  EXPECT_NEAR(nmse(CMatrix::Zero(4, 4), cb), 1.0, 1e-15);
}

TEST(Nmse, ScalarReductionAtNinetyPercentGain) {
  const ChannelStatistics s = identity_stats(64, 64, 1, 1.0, 1.0);
  // beta beta N tau P_p / sigma^2 = 9
  PilotConfig pilot{1, 1.0, 64.0 / 9.0};
  const EstimatorState st = build_estimator(s, PhaseShifts::zeros(64), pilot, 0);
  EXPECT_NEAR(nmse(st.r_filter, s.c_bs), 0.1, 1e-12);
}

TEST(Nmse, MonotoneInPilotPowerAndLength) {
  const auto inst = testing::random_instance(8, 5, 4, 2);
  double prev = 2.0;
  for (double pp : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    PilotConfig p = inst.pilot;
    p.power = pp;
    const double v = nmse(build_estimator(inst.stats, inst.theta, p, 0).r_filter, inst.stats.c_bs);
    EXPECT_LT(v, prev);
    prev = v;
  }
  prev = 2.0;
  for (int tau : {2, 4, 8, 16}) {
    PilotConfig p = inst.pilot;
    p.tau = tau;
    const double v = nmse(build_estimator(inst.stats, inst.theta, p, 0).r_filter, inst.stats.c_bs);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

}  // namespace
}  // namespace rismimo
