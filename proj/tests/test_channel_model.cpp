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

#include "rismimo/channel_model.hpp"
#include "rismimo/estimation.hpp"
#include "support.hpp"

namespace rismimo {
namespace {

double min_eig(const CMatrix& c) { return min_eigenvalue(c); }

TEST(ExponentialCorrelation, ZeroCoefficientIsIdentity) {
  const CorrelationMatrix c = build_exponential_correlation(4, 0.0);
  EXPECT_EQ(c.entries, CMatrix(CMatrix::Identity(4, 4)));
}

TEST(ExponentialCorrelation, PowersOfCoefficient) {
  const CorrelationMatrix c = build_exponential_correlation(3, 0.5);
  EXPECT_DOUBLE_EQ(c.entries(0, 2).real(), 0.25);
  EXPECT_DOUBLE_EQ(c.entries(1, 2).real(), 0.5);
  EXPECT_DOUBLE_EQ(c.entries(2, 0).real(), 0.25);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(c.entries(i, j).imag(), 0.0);
}

TEST(ExponentialCorrelation, ComplexCoefficientIsHermitianPsd) {
  const CorrelationMatrix c = build_exponential_correlation(8, std::polar(0.6, 0.3));
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(c.entries(i, i), cdouble(1.0, 0.0));
    for (int j = 0; j < 8; ++j) EXPECT_EQ(c.entries(i, j), std::conj(c.entries(j, i)));
  }
  EXPECT_GE(min_eig(c.entries), 0.0);
}

TEST(ExponentialCorrelation, RejectsOutOfRangeCoefficient) {
  EXPECT_THROW(build_exponential_correlation(3, 1.5), InvalidArgument);
  EXPECT_THROW(build_exponential_correlation(0, 0.5), InvalidArgument);
}

TEST(SincCorrelation, AdjacentEntries) {
  const double lambda = 0.1;
  const CorrelationMatrix half = build_sinc_correlation(4, lambda / 2.0, lambda);
  EXPECT_NEAR(half.entries(0, 1).real(), 0.0, 1e-15);
  const CorrelationMatrix quarter = build_sinc_correlation(4, lambda / 4.0, lambda);
  EXPECT_NEAR(quarter.entries(0, 1).real(), 2.0 / kPi, 1e-15);
}

TEST(SincCorrelation, RealSymmetricUnitDiagonalPsd) {
  const CorrelationMatrix c = build_sinc_correlation(16, 0.025, 0.1);
  for (int i = 0; i < 16; ++i) {
    EXPECT_EQ(c.entries(i, i), cdouble(1.0, 0.0));
    for (int j = 0; j < 16; ++j) {
      EXPECT_EQ(c.entries(i, j).imag(), 0.0);
      EXPECT_EQ(c.entries(i, j), c.entries(j, i));
    }
  }
  EXPECT_GE(min_eig(c.entries), kPsdFloor);
}

TEST(SincCorrelation, RequiresPerfectSquare) {
  EXPECT_THROW(build_sinc_correlation(15, 0.025, 0.1), InvalidArgument);
}

TEST(PathLoss, ReferenceValues) {
  EXPECT_DOUBLE_EQ(path_loss(1.0, 2.2, 1e-2), 1e-2);
  EXPECT_NEAR(path_loss(50.0, 2.2, 1e-2), 1e-2 * std::pow(50.0, -2.2), 1e-20);
  EXPECT_NEAR(path_loss(50.0, 2.2, 1e-2) / 1.833e-6, 1.0, 3e-3);
  EXPECT_NEAR(path_loss(10.0, 2.1, 1e-2) / 7.94e-5, 1.0, 1e-3);
}

TEST(PathLoss, StrictlyDecreasingInDistance) {
  double prev = path_loss(0.5, 2.1, 1e-2);
  for (double d = 1.0; d < 200.0; d *= 1.3) {
    const double v = path_loss(d, 2.1, 1e-2);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_THROW(path_loss(0.0, 2.0, 1e-2), InvalidArgument);
}

TEST(PsdFactor, Identity) {
  const CMatrix f = psd_factor(identity_correlation(5));
  EXPECT_LT((f - CMatrix::Identity(5, 5)).norm(), 1e-14);
}

TEST(PsdFactor, RankOne) {
  CorrelationMatrix c{CMatrix::Ones(2, 2), CorrelationKind::bs_exponential};
  const CMatrix f = psd_factor(c);
  EXPECT_LT((f * f.adjoint() - c.entries).norm(), 1e-10);
}

TEST(PsdFactor, NearSingularSinc) {
  const CorrelationMatrix c = build_sinc_correlation(36, 0.025, 0.1);
  const CMatrix f = psd_factor(c);
  EXPECT_LE((f * f.adjoint() - c.entries).norm(), 1e-8 * 36);
}

TEST(PsdFactor, RejectsIndefinite) {
  CorrelationMatrix c{CMatrix::Identity(2, 2), CorrelationKind::bs_exponential};
  c.entries(0, 1) = c.entries(1, 0) = 2.0;
  EXPECT_THROW(psd_factor(c), NotPsdError);
}

TEST(NoisePower, ReferenceAndLinearity) {
  EXPECT_NEAR(thermal_noise_power(2e6, 9.0) / 6.362e-14, 1.0, 1e-3);
  EXPECT_NEAR(thermal_noise_power(4e6, 9.0), 2.0 * thermal_noise_power(2e6, 9.0), 1e-27);
  EXPECT_THROW(thermal_noise_power(0.0, 9.0), InvalidArgument);
}

TEST(Sampling, SameSeedIsBitIdentical) {
  const auto inst = testing::random_instance(3, 4, 4, 2);
  const auto a = sample_realization(inst.stats, inst.theta, inst.pilot, 17, 5);
  const auto b = sample_realization(inst.stats, inst.theta, inst.pilot, 17, 5);
  EXPECT_EQ(a.g, b.g);
  EXPECT_EQ(a.h[1], b.h[1]);
  EXPECT_EQ(a.pilot_noise, b.pilot_noise);
}

TEST(Sampling, CascadeRecomputes) {
  const auto inst = testing::random_instance(4, 5, 4, 3);
  const auto r = sample_realization(inst.stats, inst.theta, inst.pilot, 1);
  const CVector b = inst.theta.phasors();
  for (int k = 0; k < 3; ++k) {
    const CVector direct = r.g * b.asDiagonal() * r.v[k];
    EXPECT_LT((direct - r.h[k]).norm(), 1e-12 * std::max(1.0, direct.norm()));
  }
}

TEST(Sampling, NoiselessPilotObservationIsChannel) {
  auto inst = testing::random_instance(5, 4, 4, 2);
  inst.pilot.noise = 0.0;
  const auto r = sample_realization(inst.stats, inst.theta, inst.pilot, 2);
  for (int k = 0; k < 2; ++k) EXPECT_EQ(r.pilot_observation(k), r.h[k]);
}

TEST(Sampling, FastSamplerMatchesFullRealization) {
  const auto inst = testing::random_instance(6, 6, 4, 3);
  const CascadedSampler sampler(inst.stats, inst.theta, inst.pilot);
  CMatrix h, y;
  for (std::uint64_t t = 0; t < 5; ++t) {
    sampler.draw(9, t, h, y);
    const auto r = sample_realization(inst.stats, inst.theta, inst.pilot, 9, t);
    for (int k = 0; k < 3; ++k) {
      EXPECT_LT((h.col(k) - r.h[k]).norm(), 1e-12 * r.h[k].norm());
      EXPECT_LT((y.col(k) - r.pilot_observation(k)).norm(), 1e-12 * y.col(k).norm());
    }
  }
}

TEST(Sampling, ChannelCovarianceMatchesClosedForm) {
  const auto inst = testing::random_instance(7, 4, 4, 2);
  const CascadedSampler sampler(inst.stats, inst.theta, inst.pilot);
  CMatrix h, y;
  const int trials = 10000;
  for (int k = 0; k < 2; ++k) {
    CMatrix acc = CMatrix::Zero(4, 4);
    for (int t = 0; t < trials; ++t) {
      sampler.draw(11, t, h, y);
      acc += h.col(k) * h.col(k).adjoint();
    }
    acc /= trials;
    const EstimatorState st = build_estimator(inst.stats, inst.theta, inst.pilot, k);
    const CMatrix closed = st.gain * inst.stats.c_bs.entries;
    EXPECT_LE((acc - closed).norm() / closed.norm(), 0.03) << "user " << k;
  }
}

TEST(Sampling, BsRisMatrixSecondMoment) {
  const auto inst = testing::random_instance(8, 3, 4, 1);
  Engine xr = make_engine(99, 0, 0);
  const CMatrix x = testing::random_psd(xr, 4);
  CMatrix acc = CMatrix::Zero(3, 3);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const auto r = sample_realization(inst.stats, inst.theta, inst.pilot, 21, t);
    acc += r.g * x * r.g.adjoint();
  }
  acc /= trials;
  const CMatrix sr = psd_factor(inst.stats.c_ris_rx);
  const CMatrix closed = inst.stats.beta_br * (sr * x * sr).trace() * inst.stats.c_bs.entries;
  EXPECT_LE((acc - closed).norm() / closed.norm(), 0.02);
}

TEST(Geometry, SemicircleLayout) {
  const Geometry g = semicircle_geometry(6, 3);
  EXPECT_NEAR(g.bs_ris_distance(), 50.0, 1e-12);
  for (int k = 0; k < 6; ++k) {
    const double dk = g.ris_user_distance(k);
    EXPECT_GE(dk, 10.0 - 1e-9);
    EXPECT_LE(dk, 15.0 + 1e-9);
  }
  const Geometry again = semicircle_geometry(6, 3);
  EXPECT_EQ(g.user_positions[2], again.user_positions[2]);
}

TEST(Statistics, ValidateRejectsBadInputs) {
  const auto inst = testing::random_instance(9, 3, 4, 2);
  ChannelStatistics s = inst.stats;
  s.beta_ru[1] = 0.0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = inst.stats;
  s.c_ris_user[0] = identity_correlation(3);
  EXPECT_THROW(s.validate(), InvalidArgument);
}

}  // namespace
}  // namespace rismimo
