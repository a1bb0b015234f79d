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

#include "rismimo/scenario.hpp"

namespace rismimo {
namespace {

// Desk-scale drop with enough link budget for the QoS targets to be feasible.
Scenario feasible_scenario(int k_users, std::uint64_t seed) {
  ScenarioParams sp;
  sp.num_elements = 16;
  sp.num_users = k_users;
  sp.snr_offset_db = 20.0;
  return build_scenario(sp, seed);
}

struct GpSetup {
  Scenario sc;
  SinrBreakdown bd;
  ScaCoefficients coeffs;
  RVector chi_req;
};

GpSetup gp_setup(int k_users, std::uint64_t seed) {
  GpSetup s{feasible_scenario(k_users, seed), {}, {}, {}};
  const OptimizationProblem prob = s.sc.problem();
  PhaseWorkspace ws(s.sc.stats, s.sc.pilot, PhaseShifts::zeros(16));
  s.bd = build_breakdown(ws);
  const PowerAllocation p = PowerAllocation::uniform(k_users, s.sc.total_power);
  s.coeffs = update_sca(sinr_all(s.bd, p.p).cwiseMax(0.5), prob.model);
  sanitize_exponents(s.coeffs);
  s.chi_req = prob.chi_req;
  return s;
}

TEST(GpSolver, TwoVariableTextbookProblem) {
  // minimize 1/(x y) s.t. x + y <= 1  ->  x = y = 1/2, objective 4.
  GpInstance gp;
  gp.num_vars = 2;
  gp.objective = {1.0, RVector::Constant(2, -1.0)};
  Posynomial c;
  c.terms.push_back({1.0, (RVector(2) << 1.0, 0.0).finished()});
  c.terms.push_back({1.0, (RVector(2) << 0.0, 1.0).finished()});
  gp.constraints.push_back(c);
  const GpResult r = solve_gp(gp);
  ASSERT_EQ(r.status, GpStatus::optimal);
  EXPECT_NEAR(r.x(0), 0.5, 1e-7);
  EXPECT_NEAR(r.x(1), 0.5, 1e-7);
  EXPECT_NEAR(r.objective, 4.0, 1e-6);
  EXPECT_LE(r.kkt_residual, 1e-8);
}

TEST(GpSolver, CertifiesInfeasibility) {
  // x <= 1 and 2 / x <= 1 cannot both hold.
  GpInstance gp;
  gp.num_vars = 1;
  gp.objective = {1.0, RVector::Constant(1, -1.0)};
  gp.constraints.push_back({{{1.0, RVector::Constant(1, 1.0)}}, "upper"});
  gp.constraints.push_back({{{2.0, RVector::Constant(1, -1.0)}}, "lower"});
  const GpResult r = solve_gp(gp);
  EXPECT_EQ(r.status, GpStatus::infeasible);
  EXPECT_GT(r.phase1_value, 0.0);
}

TEST(GpSolver, RejectsMalformedInstance) {
  GpInstance gp;
  gp.num_vars = 1;
  gp.objective = {1.0, RVector::Constant(1, -1.0)};
  gp.constraints.push_back({{{-1.0, RVector::Constant(1, 1.0)}}, "negative"});
  EXPECT_THROW(solve_gp(gp), InvalidArgument);
}

TEST(PowerGp, SingleUserUsesFullPower) {
  const GpSetup s = gp_setup(1, 3);
  const PowerStep st = solve_power_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power);
  ASSERT_EQ(st.gp.status, GpStatus::optimal);
  EXPECT_NEAR(st.power.p(0), s.sc.total_power, 1e-6 * s.sc.total_power);
}

TEST(PowerGp, FeasiblePointSatisfiesConstraints) {
  const GpSetup s = gp_setup(3, 5);
  const GpInstance gp = build_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power);
  const PowerStep st = solve_power_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power);
  ASSERT_EQ(st.gp.status, GpStatus::optimal);
  EXPECT_LE(gp.max_constraint(st.gp.x), 1.0 + 1e-9);
  // Every term of every constraint is a valid posynomial term.
  for (const auto& c : gp.constraints)
    for (const auto& t : c.terms) EXPECT_GT(t.coeff, 0.0);
  // chi never exceeds the SINR it stands for.
  const RVector gamma = sinr_all(s.bd, st.power.p);
  for (int k = 0; k < 3; ++k) EXPECT_LE(st.chi(k), gamma(k) * (1.0 + 1e-8));
}

TEST(PowerGp, TwoUsersMatchGridOracle) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const GpSetup s = gp_setup(2, seed);
    const PowerStep st = solve_power_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power);
    ASSERT_EQ(st.gp.status, GpStatus::optimal);
    const double gp_value = s.coeffs.w_hat.dot(st.chi.array().log().matrix());
    // Grid over the power simplex; chi_k = gamma_k(p) is optimal per point.
    const int steps = 400;
    const double total = s.sc.total_power;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= steps; ++i) {
      for (int j = 1; i + j <= steps; ++j) {
        const RVector p = (RVector(2) << i * total / steps, j * total / steps).finished();
        const RVector gamma = sinr_all(s.bd, p);
        if (gamma(0) < s.chi_req(0) || gamma(1) < s.chi_req(1)) continue;
        best = std::max(best, s.coeffs.w_hat.dot(gamma.array().log().matrix()));
      }
    }
    ASSERT_TRUE(std::isfinite(best));
    // Objective prod chi^w_hat: relative gap exp(|diff|) - 1 within 0.1%.
    EXPECT_GE(gp_value, best - 1e-9);
    EXPECT_LT(std::expm1(std::abs(gp_value - best)), 1e-3);
  }
}

TEST(PowerGp, KktResidualOnRandomFeasibleInstances) {
  int solved = 0;
  for (std::uint64_t seed = 100; solved < 50 && seed < 200; ++seed) {
    const int k_users = 2 + static_cast<int>(seed % 3);
    const GpSetup s = gp_setup(k_users, seed);
    const PowerStep st = solve_power_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power);
    if (st.gp.status == GpStatus::infeasible) continue;
    ASSERT_EQ(st.gp.status, GpStatus::optimal) << "seed " << seed;
    EXPECT_LE(st.gp.kkt_residual, 1e-8) << "seed " << seed;
    ++solved;
  }
  EXPECT_EQ(solved, 50);
}

TEST(PowerGp, ScalingAllPowerTermsLeavesSolutionUnchanged) {
  const GpSetup s = gp_setup(3, 21);
  const PowerStep a = solve_power_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power);
  const PowerStep b = solve_power_gp(s.bd.scaled(10.0), s.coeffs, s.chi_req, s.sc.total_power);
  ASSERT_EQ(a.gp.status, GpStatus::optimal);
  ASSERT_EQ(b.gp.status, GpStatus::optimal);
  EXPECT_LT((a.power.p - b.power.p).cwiseAbs().maxCoeff(), 1e-6 * s.sc.total_power);
}

TEST(PowerGp, HugeTargetsAreInfeasible) {
  const GpSetup s = gp_setup(2, 31);
  const PowerStep st =
      solve_power_gp(s.bd, s.coeffs, RVector::Constant(2, 1e6), s.sc.total_power);
  EXPECT_EQ(st.gp.status, GpStatus::infeasible);
}

TEST(PowerGp, DegenerateExponentIsRejected) {
  GpSetup s = gp_setup(2, 41);
  s.coeffs.w_hat(1) = 0.0;
  EXPECT_THROW(build_gp(s.bd, s.coeffs, s.chi_req, s.sc.total_power), CoefficientDegeneracyError);
}

}  // namespace
}  // namespace rismimo
