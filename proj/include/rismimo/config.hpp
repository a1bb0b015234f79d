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


// Experiment configuration: an INI document with flat sections.
//
//   [scenario]   deployment, link budget and power scalars
//   [qos]        rate_req, dep, weights = random | unit
//   [sweep]      comma-separated axes: elements, antennas, pilot_powers
//   [optimizer]  zeta, max_outer
//   [run]        seed, trials, drops, sweep_drops, threads, out_dir
//
// Missing keys keep their defaults; unknown sections or keys are errors.

#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rismimo/scenario.hpp"

namespace rismimo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepAxes {
  std::vector<int> elements{16, 36, 64};
  std::vector<int> antennas{64};
  std::vector<double> pilot_powers{1e-3, 1e-2, 1e-1, 1.0};
  double bound_power = 0.2;  // per-user W for the bound-tightness experiment
};

struct RunSettings {
  std::uint64_t seed = 1;
  std::int64_t trials = 2000;
  int drops = 200;       // user drops for the WSR distribution
  int sweep_drops = 10;  // drops per point of the N sweep
  int threads = 0;
  std::string out_dir = "results";
};

/// Desk-scale deployment: the full-scale link budget with 20 dB less noise, which
/// keeps the QoS targets attainable with 32 antennas.
inline ScenarioParams desk_scenario() {
  ScenarioParams sp;
  sp.snr_offset_db = 20.0;
  return sp;
}

struct ExperimentConfig {
  ScenarioParams scenario = desk_scenario();
  SweepAxes sweep;
  double zeta = 1e-3;
  int max_outer = 50;
  RunSettings run;

  void validate() const;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

template <class T>
T parse_scalar(const std::string& key, std::string text) {
  const auto b = text.find_first_not_of(" \t");
  const auto e = text.find_last_not_of(" \t");
  text = b == std::string::npos ? "" : text.substr(b, e - b + 1);
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || text.empty())
    throw ConfigError("config: cannot parse '" + text + "' for key " + key);
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_scalar<T>(key, item));
  if (out.empty()) throw ConfigError("config: empty list for key " + key);
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("config: expected true/false for key " + key);
}

// One binding per key: how to read it and how to print it.
struct Binding {
  std::function<void(ExperimentConfig&, const std::string&)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

template <class T>
Binding scalar(T ExperimentConfig::*group, auto member, const std::string& key) {
  Binding b;
  b.read = [=](ExperimentConfig& c, const std::string& v) {
    using V = std::remove_reference_t<decltype(c.*group.*member)>;
    if constexpr (std::is_same_v<V, bool>)
      c.*group.*member = parse_bool(key, v);
    else if constexpr (std::is_same_v<V, std::string>)
      c.*group.*member = v;
    else
      c.*group.*member = parse_scalar<V>(key, v);
  };
  b.write = [=](const ExperimentConfig& c) {
    const auto& v = c.*group.*member;
    using V = std::remove_cvref_t<decltype(v)>;
    if constexpr (std::is_same_v<V, bool>)
      return std::string(v ? "true" : "false");
    else if constexpr (std::is_same_v<V, std::string>)
      return v;
    else if constexpr (std::is_floating_point_v<V>)
      return format_double(v);
    else
      return std::to_string(v);
  };
  return b;
}

template <class T>
Binding list(std::vector<T> SweepAxes::*member, const std::string& key) {
  return {[=](ExperimentConfig& c, const std::string& v) {
            c.sweep.*member = parse_list<T>(key, v);
          },
          [=](const ExperimentConfig& c) { return join(c.sweep.*member); }};
}

inline Binding top(auto member, const std::string& key) {
  return {[=](ExperimentConfig& c, const std::string& v) {
            using V = std::remove_reference_t<decltype(c.*member)>;
            c.*member = parse_scalar<V>(key, v);
          },
          [=](const ExperimentConfig& c) {
            const auto& v = c.*member;
            if constexpr (std::is_floating_point_v<std::remove_cvref_t<decltype(v)>>)
              return format_double(v);
            else
              return std::to_string(v);
          }};
}

// Ordered (section, key) -> binding table; serialization follows this order.
inline const std::vector<std::pair<std::string, Binding>>& bindings() {
  using S = ScenarioParams;
  using R = RunSettings;
  using E = ExperimentConfig;
  static const std::vector<std::pair<std::string, Binding>> table = [] {
    std::vector<std::pair<std::string, Binding>> t;
    auto sc = [&t](const std::string& key, auto member) {
      t.emplace_back("scenario." + key, scalar(&E::scenario, member, "scenario." + key));
    };
    sc("antennas", &S::num_antennas);
    sc("elements", &S::num_elements);
    sc("users", &S::num_users);
    sc("radius", &S::radius);
    sc("offset", &S::offset);
    sc("spacing_over_lambda", &S::spacing_over_lambda);
    sc("wavelength", &S::wavelength);
    sc("beta0", &S::beta0);
    sc("exponent_br", &S::exponent_br);
    sc("exponent_ru", &S::exponent_ru);
    sc("bs_correlation", &S::bs_correlation);
    sc("correlated", &S::correlated);
    sc("bandwidth", &S::bandwidth);
    sc("latency", &S::latency);
    sc("noise_figure_db", &S::noise_figure_db);
    sc("snr_offset_db", &S::snr_offset_db);
    sc("pilot_power", &S::pilot_power);
    sc("total_power", &S::total_power);
    t.emplace_back("qos.rate_req", scalar(&E::scenario, &S::rate_req, "qos.rate_req"));
    t.emplace_back("qos.dep", scalar(&E::scenario, &S::dep, "qos.dep"));
    t.emplace_back("qos.weights",
                   Binding{[](ExperimentConfig& c, const std::string& v) {
                             if (v == "random")
                               c.scenario.random_weights = true;
                             else if (v == "unit")
                               c.scenario.random_weights = false;
                             else
                               throw ConfigError("config: qos.weights must be random or unit");
                           },
                           [](const ExperimentConfig& c) {
                             return std::string(c.scenario.random_weights ? "random" : "unit");
                           }});
    t.emplace_back("sweep.elements", list(&SweepAxes::elements, "sweep.elements"));
    t.emplace_back("sweep.antennas", list(&SweepAxes::antennas, "sweep.antennas"));
    t.emplace_back("sweep.pilot_powers", list(&SweepAxes::pilot_powers, "sweep.pilot_powers"));
    t.emplace_back("sweep.bound_power",
                   scalar(&E::sweep, &SweepAxes::bound_power, "sweep.bound_power"));
    t.emplace_back("optimizer.zeta", top(&E::zeta, "optimizer.zeta"));
    t.emplace_back("optimizer.max_outer", top(&E::max_outer, "optimizer.max_outer"));
    auto run = [&t](const std::string& key, auto member) {
      t.emplace_back("run." + key, scalar(&E::run, member, "run." + key));
    };
    run("seed", &R::seed);
    run("trials", &R::trials);
    run("drops", &R::drops);
    run("sweep_drops", &R::sweep_drops);
    run("threads", &R::threads);
    run("out_dir", &R::out_dir);
    return t;
  }();
  return table;
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
  const auto& s = scenario;
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config: ") + what);
  };
  need(s.num_antennas >= 1 && s.num_elements >= 1 && s.num_users >= 1,
       "antennas, elements and users must be positive");
  need(s.bandwidth > 0.0 && s.latency > 0.0, "bandwidth and latency must be positive");
  need(std::round(s.bandwidth * s.latency) > s.num_users,
       "blocklength round(bandwidth * latency) must exceed the pilot length (users)");
  need(s.pilot_power > 0.0 && s.total_power > 0.0, "powers must be positive");
  need(s.dep > 0.0 && s.dep < 0.5, "qos.dep must lie in (0, 0.5)");
  need(s.rate_req >= 0.0, "qos.rate_req must be nonnegative");
  need(s.radius > 0.0 && s.offset > s.radius, "offset must exceed radius");
  need(s.wavelength > 0.0 && s.spacing_over_lambda > 0.0, "spacing must be positive");
  need(s.bs_correlation >= 0.0 && s.bs_correlation <= 1.0, "bs_correlation must lie in [0, 1]");
  for (int n : sweep.elements) {
    need(n >= 1, "sweep.elements must be positive");
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    need(side * side == n, "sweep.elements must be perfect squares");
  }
  {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s.num_elements))));
    need(side * side == s.num_elements, "scenario.elements must be a perfect square");
  }
  for (int m : sweep.antennas) need(m >= 1, "sweep.antennas must be positive");
  for (double p : sweep.pilot_powers) need(p > 0.0, "sweep.pilot_powers must be positive");
  need(sweep.bound_power > 0.0, "sweep.bound_power must be positive");
  need(zeta > 0.0 && max_outer >= 1, "optimizer settings out of range");
  need(run.trials >= 100, "run.trials must be at least 100");
  need(run.drops >= 1 && run.sweep_drops >= 1, "run.drops must be positive");
  need(run.threads >= 0, "run.threads must be nonnegative");
}

inline ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::map<std::string, const detail::Binding*> index;
  for (const auto& [key, b] : detail::bindings()) index[key] = &b;
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = index.find(full);
      if (it == index.end()) throw ConfigError("config: unknown key " + full);
      it->second->read(cfg, value.data());
    }
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  return parse_config(in);
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  std::string current;
  for (const auto& [full, b] : detail::bindings()) {
    const auto dot = full.find('.');
    const std::string section = full.substr(0, dot);
    if (section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << section << "]\n";
      current = section;
    }
    out << full.substr(dot + 1) << " = " << b.write(cfg) << '\n';
  }
  return out.str();
}

/// Short stable identifier of a configuration (hex FNV-1a of the serialized text).
inline std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a(text.data(), text.size());
  return out.str();
}

/// Full-scale values: 100 antennas, 1e4 Monte-Carlo trials, unmodified noise.
inline void apply_full_scale(ExperimentConfig& cfg) {
  cfg.scenario.num_antennas = 100;
  cfg.scenario.snr_offset_db = 0.0;
  cfg.sweep.antennas = {100};
  cfg.run.trials = 10000;
}

}  // namespace rismimo
