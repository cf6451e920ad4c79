// Copyright 2026 The Staircase-PIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spir/sim.hpp"

#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace spir {
namespace {

SimConfig FourServer(Strategy strategy, std::vector<LatencyModel> lat, std::size_t reps = 1, std::uint64_t seed = 3) {
  SimConfig cfg;
  cfg.id = "c";
  cfg.params = derive_params(4, 2, 1, 2, 5);
  cfg.latencies = std::move(lat);
  cfg.strategy = strategy;
  cfg.seed = seed;
  cfg.repetitions = reps;
  return cfg;
}

std::vector<LatencyModel> Fixed(std::vector<double> ms) {
  std::vector<LatencyModel> out;
  for (double d : ms) out.push_back(LatencyModel::deterministic(d));
  return out;
}

TEST(LatencyModelTest, Validation) {
  EXPECT_THROW(LatencyModel::deterministic(0), Error);
  EXPECT_THROW(LatencyModel::exponential(-1), Error);
  EXPECT_THROW(LatencyModel::unresponsive(1.5, LatencyModel::deterministic(1)), Error);
  SeededRng rng(1);
  EXPECT_EQ(LatencyModel::deterministic(2.5).sample_us(rng), 2500);
  EXPECT_FALSE(LatencyModel::unresponsive(1, LatencyModel::deterministic(1)).sample_us(rng).has_value());
  EXPECT_EQ(LatencyModel::unresponsive(0, LatencyModel::deterministic(1)).sample_us(rng), 1000);
}

TEST(SimulationTest, WaitForTakesOrderStatistic) {
  const auto runs = run_simulation(FourServer(Strategy::wait_for(3), Fixed({1, 2, 3, 4})));
  ASSERT_EQ(runs.size(), 1u);
  const auto& m = runs[0];
  EXPECT_TRUE(m.success) << m.failure;
  EXPECT_EQ(m.realized_mu, 3u);
  EXPECT_DOUBLE_EQ(m.wait_ms, 3.0);
  EXPECT_EQ(m.symbols, 9u);
  EXPECT_EQ(to_string(m.rate), "2/3");
  EXPECT_EQ(m.responders, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(SimulationTest, TiesBreakByServerId) {
  const auto runs = run_simulation(FourServer(Strategy::wait_for(2), Fixed({5, 5, 5, 5})));
  EXPECT_EQ(runs[0].responders, (std::vector<std::size_t>{0, 1}));
}

TEST(SimulationTest, DeadlineAdaptsToArrivals) {
  auto runs = run_simulation(FourServer(Strategy::deadline(3.5), Fixed({4, 1, 3, 2})));
  EXPECT_TRUE(runs[0].success);
  EXPECT_EQ(runs[0].realized_mu, 3u);
  EXPECT_DOUBLE_EQ(runs[0].wait_ms, 3.5);
  EXPECT_EQ(to_string(runs[0].rate), "2/3");

  runs = run_simulation(FourServer(Strategy::deadline(10), Fixed({4, 1, 3, 2})));
  EXPECT_EQ(runs[0].realized_mu, 4u);
  EXPECT_DOUBLE_EQ(runs[0].wait_ms, 4.0);
  EXPECT_EQ(to_string(runs[0].rate), "3/4");
}

TEST(SimulationTest, DeadlineBelowKFails) {
  const auto runs = run_simulation(FourServer(Strategy::deadline(1.5), Fixed({4, 1, 3, 2})));
  EXPECT_FALSE(runs[0].success);
  EXPECT_EQ(runs[0].realized_mu, 1u);
  EXPECT_NE(runs[0].failure.find("InsufficientResponders"), std::string::npos);
}

TEST(SimulationTest, AllUnresponsiveIsRecordedNotThrown) {
  const auto dead = LatencyModel::unresponsive(1, LatencyModel::deterministic(1));
  for (auto strategy : {Strategy::deadline(100), Strategy::wait_for(2)}) {
    const auto runs = run_simulation(FourServer(strategy, {dead}, 3));
    ASSERT_EQ(runs.size(), 3u);
    for (const auto& m : runs) {
      EXPECT_FALSE(m.success);
      EXPECT_EQ(m.realized_mu, 0u);
    }
  }
}

TEST(SimulationTest, WaitForFallsBackWhenServersNeverAnswer) {
  const auto dead = LatencyModel::unresponsive(1, LatencyModel::deterministic(1));
  auto lat = Fixed({1, 2, 3});
  lat.push_back(dead);
  const auto runs = run_simulation(FourServer(Strategy::wait_for(4), lat));
  EXPECT_TRUE(runs[0].success);
  EXPECT_EQ(runs[0].realized_mu, 3u);
  EXPECT_EQ(to_string(runs[0].rate), "2/3");
}

TEST(SimulationTest, RejectsBadConfig) {
  EXPECT_THROW(run_simulation(FourServer(Strategy::wait_for(1), Fixed({1}))), Error);
  EXPECT_THROW(run_simulation(FourServer(Strategy::wait_for(5), Fixed({1}))), Error);
  EXPECT_THROW(run_simulation(FourServer(Strategy::wait_for(2), Fixed({1, 2}))), Error);
  EXPECT_THROW(Strategy::deadline(0), Error);
}

TEST(SimulationTest, ExponentialTradeoff) {
  double previous = -1;
  for (std::size_t mu = 2; mu <= 4; ++mu) {
    const auto runs = run_simulation(FourServer(Strategy::wait_for(mu), {LatencyModel::exponential(10)}, 300, 11));
    double wait = 0;
    for (const auto& m : runs) {
      ASSERT_TRUE(m.success) << m.failure;
      EXPECT_EQ(m.rate, Rational(static_cast<int>(mu) - 1, static_cast<int>(mu)));
      EXPECT_EQ(m.rate, m.capacity);
      EXPECT_EQ(m.symbols, mu * (6 * 2 / (mu - 1)) / 2);
      wait += m.wait_ms;
    }
    wait /= static_cast<double>(runs.size());
    EXPECT_GT(wait, previous);
    previous = wait;
  }
}

TEST(SimulationTest, DeterministicUnderSeed) {
  const auto cfg = FourServer(Strategy::wait_for(3), {LatencyModel::exponential(10)}, 20, 42);
  const auto a = run_simulation(cfg);
  const auto b = run_simulation(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].responders, b[i].responders);
    EXPECT_EQ(a[i].wait_ms, b[i].wait_ms);
  }
}

TEST(SweepTest, EmptyGivesHeaderOnly) {
  const auto rows = sweep({});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], "config_id,mu_target,realized_mu,wait_ms,symbols,rate_num,rate_den,success");
}

TEST(SweepTest, OneRowPerConfig) {
  std::vector<SimConfig> configs;
  for (std::size_t mu = 2; mu <= 4; ++mu) {
    auto cfg = FourServer(Strategy::wait_for(mu), {LatencyModel::exponential(10)}, 50, 5);
    cfg.id = "mu" + std::to_string(mu);
    configs.push_back(cfg);
  }
  const auto rows = sweep(configs);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].rfind("mu2,2,2,", 0), 0u);
  EXPECT_NE(rows[1].find(",1,2,1"), std::string::npos);
  EXPECT_NE(rows[3].find(",3,4,1"), std::string::npos);
  EXPECT_EQ(sweep(configs), rows);
}

}  // namespace
}  // namespace spir
