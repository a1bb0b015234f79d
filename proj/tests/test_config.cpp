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

#include <algorithm>
#include <sstream>

#include "rismimo/experiments.hpp"

namespace rismimo {
namespace {

TEST(Config, SerializeParseRoundTrip) {
  ExperimentConfig cfg;
  cfg.scenario.num_users = 3;
  cfg.scenario.random_weights = false;
  cfg.sweep.pilot_powers = {0.5, 0.25};
  cfg.run.out_dir = "elsewhere";
  const std::string text = serialize_config(cfg);
  const ExperimentConfig back = parse_config(text);
  EXPECT_EQ(serialize_config(back), text);
  EXPECT_EQ(config_hash(back), config_hash(cfg));
  EXPECT_EQ(back.scenario.num_users, 3);
  EXPECT_FALSE(back.scenario.random_weights);
  EXPECT_EQ(back.sweep.pilot_powers.size(), 2u);
}

TEST(Config, PartialFileKeepsDefaults) {
  const ExperimentConfig cfg = parse_config("; comment\n[run]\nseed = 7\n");
  EXPECT_EQ(cfg.run.seed, 7u);
  EXPECT_EQ(cfg.scenario.snr_offset_db, ExperimentConfig{}.scenario.snr_offset_db);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config("[run]\nsede = 7\n"), ConfigError);
  EXPECT_THROW(parse_config("[nope]\nseed = 7\n"), ConfigError);
  EXPECT_THROW(parse_config("[scenario]\nelements = 10\n"), ConfigError);
  EXPECT_THROW(parse_config("[run]\ntrials = 50\n"), ConfigError);
  EXPECT_THROW(parse_config("[scenario]\nantennas = many\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST(Config, FullScaleOverrides) {
  ExperimentConfig cfg;
  apply_full_scale(cfg);
  EXPECT_EQ(cfg.scenario.num_antennas, 100);
  EXPECT_EQ(cfg.scenario.snr_offset_db, 0.0);
  EXPECT_EQ(cfg.run.trials, 10000);
  EXPECT_NE(config_hash(cfg), config_hash(ExperimentConfig{}));
}

TEST(Config, ShippedFilesParse) {
  const ExperimentConfig desk = load_config(RISMIMO_SOURCE_DIR "/configs/default.ini");
  EXPECT_EQ(serialize_config(desk), serialize_config(ExperimentConfig{}));
  ExperimentConfig full;
  apply_full_scale(full);
  EXPECT_EQ(serialize_config(load_config(RISMIMO_SOURCE_DIR "/configs/full_scale.ini")),
            serialize_config(full));
}

TEST(Experiments, CsvCarriesHeaderAndRows) {
  ExperimentConfig cfg;
  cfg.run.trials = 200;
  cfg.sweep.elements = {4};
  cfg.sweep.pilot_powers = {0.1};
  const auto rows = nmse_experiment(cfg);
  ASSERT_EQ(rows.size(), 2u * cfg.scenario.num_users);
  std::ostringstream out;
  write_csv(out, to_table(rows), cfg, "nmse");
  const std::string csv = out.str();
  EXPECT_NE(csv.find("config_hash=" + config_hash(cfg)), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2 + static_cast<long>(rows.size()));
}

TEST(Experiments, DropSeedsAreDistinct) {
  ExperimentConfig cfg;
  EXPECT_NE(drop_seed(cfg, 0), drop_seed(cfg, 1));
  cfg.run.seed = 2;
  EXPECT_NE(drop_seed(cfg, 0), ExperimentConfig{}.run.seed);
}

}  // namespace
}  // namespace rismimo
