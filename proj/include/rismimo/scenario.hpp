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


// Deployment builder: geometry, statistics, pilot/noise and QoS targets for
// one seeded user drop.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "rismimo/optimizer.hpp"

namespace rismimo {

struct ScenarioParams {
  int num_antennas = 32;
  int num_elements = 36;
  int num_users = 4;
  double radius = 5.0;
  double offset = 10.0;
  double spacing_over_lambda = 0.25;
  double wavelength = 0.1;
  double beta0 = 1e-2;
  double exponent_br = 2.2;
  double exponent_ru = 2.1;
  double bs_correlation = 0.5;
  bool correlated = true;
  double bandwidth = 2e6;    // Hz
  double latency = 1e-4;     // s
  double noise_figure_db = 9.0;
  double snr_offset_db = 0.0;  // divides the noise power; compensates reduced array gain
  double pilot_power = 0.1;  // W
  double total_power = 1.0;  // W
  double rate_req = 0.2;     // bits/s/Hz
  double dep = 1e-7;
  bool random_weights = true;  // uniform on (0, 1]; otherwise all ones
};

struct Scenario {
  Geometry geometry;
  ChannelStatistics stats;
  PilotConfig pilot;
  BlocklengthBudget budget;
  std::vector<QosTarget> targets;
  double total_power = 1.0;

  /// The returned problem refers to this scenario's statistics.
  OptimizationProblem problem() const {
    return make_problem(stats, pilot, targets, budget, total_power);
  }
};

inline constexpr std::uint64_t kStreamWeights = 0x3E16A7ULL;
inline constexpr std::uint64_t kStreamPhases = 0x9A5E5ULL;

inline Scenario build_scenario(const ScenarioParams& sp, std::uint64_t seed) {
  detail::require(sp.num_users >= 1, "build_scenario: need at least one user");
  Scenario sc;
  sc.geometry = semicircle_geometry(sp.num_users, seed, sp.radius, sp.offset,
                                    sp.spacing_over_lambda, sp.wavelength);
  LargeScaleModel lsm;
  lsm.num_antennas = sp.num_antennas;
  lsm.num_elements = sp.num_elements;
  lsm.beta0 = sp.beta0;
  lsm.exponent_br = sp.exponent_br;
  lsm.exponent_ru = sp.exponent_ru;
  lsm.bs_correlation = sp.bs_correlation;
  lsm.correlated = sp.correlated;
  sc.stats = statistics_from_geometry(sc.geometry, lsm);
  sc.pilot.tau = sp.num_users;
  sc.pilot.power = sp.pilot_power;
  sc.pilot.noise = thermal_noise_power(sp.bandwidth, sp.noise_figure_db) /
                   std::pow(10.0, sp.snr_offset_db / 10.0);
  sc.budget.blocklength = std::round(sp.bandwidth * sp.latency);
  sc.budget.pilot_length = sp.num_users;
  sc.budget.validate();
  Engine rng = make_engine(seed, 0, kStreamWeights);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < sp.num_users; ++k) {
    QosTarget t;
    t.rate_req = sp.rate_req;
    t.dep = sp.dep;
    t.weight = sp.random_weights ? 1.0 - unif(rng) : 1.0;
    sc.targets.push_back(t);
  }
  sc.total_power = sp.total_power;
  return sc;
}

/// Phases uniform on [0, 2 pi), seeded independently of the drop.
inline PhaseShifts random_phases(int n, std::uint64_t seed) {
  Engine rng = make_engine(seed, 0, kStreamPhases);
  std::uniform_real_distribution<double> unif(0.0, kTwoPi);
  RVector th(n);
  for (int i = 0; i < n; ++i) th(i) = unif(rng);
  return PhaseShifts(th);
}

}  // namespace rismimo
