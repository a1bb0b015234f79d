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


// Command-line front end for the experiments. Exit codes: 0 success
// (including infeasible optimization results), 1 configuration error,
// 2 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "rismimo/experiments.hpp"

namespace {

using namespace rismimo;

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<int> drops;
  bool dump = false;
  bool full_scale = false;
};

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.full_scale) apply_full_scale(cfg);
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.trials) cfg.run.trials = *o.trials;
  if (o.out) cfg.run.out_dir = *o.out;
  if (o.threads) cfg.run.threads = *o.threads;
  if (o.drops) cfg.run.drops = *o.drops;
  cfg.validate();
  return cfg;
}

void emit(const ExperimentConfig& cfg, const std::string& name, const Table& t) {
  std::filesystem::create_directories(cfg.run.out_dir);
  const auto path = std::filesystem::path(cfg.run.out_dir) / (name + ".csv");
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  write_csv(f, t, cfg, name);
  std::cout << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
}

void run_nmse(const ExperimentConfig& cfg) {
  const auto rows = nmse_experiment(cfg);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r.rel_gap()));
  emit(cfg, "nmse", to_table(rows));
  std::cout << "max |MC / closed - 1| = " << worst << '\n';
}

void run_bound(const ExperimentConfig& cfg) {
  const auto rows = bound_experiment(cfg);
  double worst = 0.0;
  int above = 0;
  for (const auto& r : rows) {
    worst = std::max(worst, r.uatf_gap());
    above += r.below_ergodic() ? 0 : 1;
  }
  emit(cfg, "bound", to_table(rows));
  std::cout << "max gap to UatF MC rate = " << worst << ", points above ergodic MC + 2 se = "
            << above << '\n';
}

void run_converge(const ExperimentConfig& cfg) {
  const OptimizationResult r = converge_experiment(cfg);
  emit(cfg, "converge", to_table(r.trace));
  std::cout << (r.feasible ? "feasible" : "infeasible") << ", outer iterations "
            << r.outer_iterations << ", WSR " << r.wsr << ", monotone "
            << (r.trace.monotone(1e-9) ? "yes" : "no") << '\n';
  for (const auto& w : r.trace.warnings) std::cout << "warning: " << w << '\n';
}

void run_optimize(const ExperimentConfig& cfg) {
  const auto drops = optimize_experiment(cfg);
  int feas[3] = {0, 0, 0}, beats = 0;
  for (const auto& d : drops) {
    feas[0] += d.proposed.feasible;
    feas[1] += d.random_phase.feasible;
    feas[2] += d.shannon_phase.feasible;
    beats += d.proposed.wsr > d.random_phase.wsr ? 1 : 0;
  }
  emit(cfg, "optimize", to_table(drops));
  std::cout << "feasible drops: proposed " << feas[0] << ", random phase " << feas[1]
            << ", shannon phase " << feas[2] << " of " << drops.size()
            << "; proposed beats random phase on " << beats << '\n';
}

void run_sweep(const ExperimentConfig& cfg) {
  const auto rows = sweep_experiment(cfg);
  emit(cfg, "sweep", to_table(rows));
  for (const auto& r : rows)
    std::cout << "N=" << r.elements << ' ' << r.method << " mean WSR " << r.mean_wsr
              << " feasible " << r.feasible_fraction << '\n';
}

void run_gradcheck(const ExperimentConfig& cfg) {
  const auto rows = gradcheck_experiment(cfg.run.seed);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.rel_error);
  emit(cfg, "gradcheck", to_table(rows));
  std::cout << "worst relative error " << worst << '\n';
}

void run_identitycheck(const ExperimentConfig& cfg) {
  const auto rows = identity_experiment(std::max<std::int64_t>(cfg.run.trials, 100000),
                                        cfg.run.seed, mc_options(cfg));
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.report.rel_dev);
  emit(cfg, "identitycheck", to_table(rows));
  std::cout << "worst relative Frobenius deviation " << worst << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided massive MIMO URLLC simulator and optimizer"};
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "INI configuration file");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--trials", o.trials, "Monte-Carlo trials");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--threads", o.threads, "worker threads (0: all cores)");
  app.add_option("--drops", o.drops, "user drops for optimize");
  app.add_flag("--dump", o.dump, "print the resolved configuration");
  app.add_flag("--full-scale", o.full_scale, "full-scale array size and trial count");

  struct Command {
    const char* name;
    const char* help;
    void (*fn)(const ExperimentConfig&);
  };
  const Command commands[] = {
      {"nmse", "estimator NMSE versus pilot power, closed form and MC", run_nmse},
      {"bound", "closed-form rate versus MC ergodic rate", run_bound},
      {"converge", "alternating optimizer trace for one drop", run_converge},
      {"optimize", "proposed method and baselines over user drops", run_optimize},
      {"sweep", "mean WSR versus number of reflecting elements", run_sweep},
      {"gradcheck", "analytic phase gradients versus finite differences", run_gradcheck},
      {"identitycheck", "MC check of the matrix expectation identities", run_identitycheck},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) subs.push_back(app.add_subcommand(c.name, c.help));
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const ExperimentConfig cfg = resolve(o);
    if (o.dump) std::cout << serialize_config(cfg);
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) commands[i].fn(cfg);
    if (!o.dump && app.get_subcommands().empty()) std::cout << app.help();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleTargetError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
