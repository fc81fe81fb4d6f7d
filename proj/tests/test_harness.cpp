// Copyright 2026 The dogiu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "dogiu/harness/acceptance.hpp"
#include "dogiu/harness/config.hpp"
#include "dogiu/harness/simulator.hpp"
#include "dogiu/harness/stats.hpp"
#include "dogiu/harness/tabular.hpp"

namespace dogiu {
namespace {

// 2x2 cameras over a 50x50 workspace: small enough for exact comparisons.
ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.grid_rows = 2;
  c.grid_cols = 2;
  c.workspace_width = 50.0;
  c.workspace_height = 50.0;
  c.targets = 20;
  c.clusters = 2;
  c.horizon = 120;
  c.dbar = 3;
  c.runs = 3;
  c.pilot_steps = 50;
  return c;
}

std::string StatsText(const AggregateStats& stats) {
  std::ostringstream out;
  WriteStatsCsv(out, stats);
  return out.str();
}

TEST(ConfigTest, DefaultsAreValid) {
  const ExperimentConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.agent_count(), 16);
  EXPECT_EQ(c.horizon, 2000);
  EXPECT_EQ(c.runs, 20);
  EXPECT_EQ(c.smoothing_window, 50);
  EXPECT_EQ(c.lr_scale, 14.0);
}

TEST(ConfigTest, RoundTripIsLossless) {
  ExperimentConfig c = SmallConfig();
  c.rho = 0.1 + 0.2;  // not exactly representable in short decimal
  c.algorithm = Algorithm::kDog;
  c.graph = "edges";
  c.graph_edges = "0>1 1>0 2>3";
  c.seed = 12345678901ULL;
  c.skew_delivery = true;
  std::ostringstream out;
  WriteConfig(out, c);
  std::istringstream in(out.str());
  EXPECT_EQ(ParseConfig(in), c);
}

TEST(ConfigTest, UnknownKeyIsAnError) {
  std::istringstream in("horizon = 10\nhorizn = 5\n");
  try {
    ParseConfig(in);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("unknown key 'horizn'"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ConfigTest, DuplicateMalformedAndInvalid) {
  std::istringstream dup("horizon = 10\nhorizon = 5\n");
  EXPECT_THROW(ParseConfig(dup), std::invalid_argument);
  std::istringstream no_eq("horizon 10\n");
  EXPECT_THROW(ParseConfig(no_eq), std::invalid_argument);
  std::istringstream bad_int("horizon = 10x\n");
  EXPECT_THROW(ParseConfig(bad_int), std::invalid_argument);
  std::istringstream bad_rho("rho = 1.5\n");
  try {
    ParseConfig(bad_rho);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_EQ(std::string(e.what()).rfind("rho:", 0), 0u) << e.what();
  }
}

TEST(ConfigTest, CommentsAndBlankLines) {
  std::istringstream in("# comment\n\n  dbar = 7   # trailing\nalgorithm = dog\n");
  const auto c = ParseConfig(in);
  EXPECT_EQ(c.dbar, 7);
  EXPECT_EQ(c.algorithm, Algorithm::kDog);
}

TEST(ConfigTest, AlgorithmAndEdgeParsing) {
  EXPECT_EQ(ParseAlgorithm("dog-iu"), Algorithm::kDogIu);
  EXPECT_EQ(ParseAlgorithm("dog"), Algorithm::kDog);
  EXPECT_THROW(ParseAlgorithm("exp3"), std::invalid_argument);
  ExperimentConfig c;
  c.graph_edges = "0>1  3>2";
  EXPECT_EQ(c.Edges(), (std::vector<std::pair<int, int>>{{0, 1}, {3, 2}}));
  c.graph_edges = "0-1";
  EXPECT_THROW(c.Edges(), std::invalid_argument);
}

TEST(ConfigTest, ShippedConfigMatchesDefaults) {
  EXPECT_EQ(LoadConfig(std::string(DOGIU_CONFIG_DIR) + "/monitoring.cfg"), ExperimentConfig{});
  EXPECT_THROW(LoadConfig(std::string(DOGIU_CONFIG_DIR) + "/missing.cfg"), std::runtime_error);
}

TEST(RunSingleTest, SingleRound) {
  auto c = SmallConfig();
  c.horizon = 1;
  c.delay_kind = "constant";
  RunOptions options;
  options.record_trace = true;
  const auto r = RunSingle(c, 5, options);
  ASSERT_EQ(r.coverage.size(), 1u);
  ASSERT_EQ(r.traces.size(), 4u);
  for (const auto& trace : r.traces) {
    ASSERT_EQ(trace.size(), 1u);
    EXPECT_EQ(trace[0].batches_applied, 0);
  }
}

TEST(RunSingleTest, ZeroDelayAlgorithmsCoincide) {
  auto c = SmallConfig();
  c.dbar = 0;
  RunOptions options;
  options.record_weights = true;
  const auto iu = RunSingle(c, 9, options);
  c.algorithm = Algorithm::kDog;
  const auto dog = RunSingle(c, 9, options);
  EXPECT_EQ(iu.actions, dog.actions);
  EXPECT_EQ(iu.weights, dog.weights);
  EXPECT_EQ(iu.coverage, dog.coverage);
}

TEST(RunSingleTest, CoverageWithinBoundsAndLength) {
  for (double rho : {0.0, 0.3}) {
    auto c = SmallConfig();
    c.rho = rho;
    const auto r = RunSingle(c, 2);
    ASSERT_EQ(r.coverage.size(), static_cast<std::size_t>(c.horizon));
    for (int v : r.coverage) {
      EXPECT_GE(v, 0);
      EXPECT_LE(v, c.targets);
    }
  }
}

TEST(RunSingleTest, SkewedDeliveryStaysWithinStaleness) {
  auto c = SmallConfig();
  c.rho = 0.3;
  c.skew_delivery = true;
  EXPECT_NO_THROW(RunSingle(c, 4));
}

TEST(RunSingleTest, InvalidConfigRejected) {
  auto c = SmallConfig();
  c.horizon = 0;
  EXPECT_THROW(RunSingle(c, 1), std::invalid_argument);
}

TEST(RunSingleTest, TraceInstrumentationOnlyForIntermediateUpdates) {
  auto c = SmallConfig();
  c.horizon = 30;
  RunOptions options;
  options.record_trace = true;
  options.instrument_errors = true;
  const auto iu = RunSingle(c, 3, options);
  for (const auto& row : iu.traces[0]) {
    ASSERT_TRUE(row.max_error.has_value());
    EXPECT_GE(*row.max_error, 0.0);
    EXPECT_FALSE(std::isnan(row.z0));
  }
  c.algorithm = Algorithm::kDog;
  const auto dog = RunSingle(c, 3, options);
  for (const auto& row : dog.traces[0]) EXPECT_FALSE(row.max_error.has_value());
  std::ostringstream out;
  WriteTraceCsv(out, std::span<const TraceRow>(dog.traces[0]).first(1));
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "round,chosen_action,p_chosen,Z0,batches_applied,M_t_if_instrumented");
}

TEST(PropertyTest, DeterministicBytes) {
  const auto c = SmallConfig();
  const auto a = RunMonteCarlo(c);
  const auto b = RunMonteCarlo(c);
  EXPECT_EQ(StatsText(a.stats), StatsText(b.stats));
  for (std::size_t k = 0; k < a.runs.size(); ++k) {
    EXPECT_EQ(a.runs[k].actions, b.runs[k].actions);
    EXPECT_EQ(a.runs[k].seed, c.seed + k);
  }
}

TEST(PropertyTest, StreamSeparationAcrossAlgorithms) {
  auto c = SmallConfig();
  c.dbar = 10;
  RunOptions options;
  options.record_messages = true;
  const auto iu = RunSingle(c, 6, options);
  c.algorithm = Algorithm::kDog;
  const auto dog = RunSingle(c, 6, options);
  ASSERT_EQ(iu.messages.size(), dog.messages.size());
  for (std::size_t k = 0; k < iu.messages.size(); ++k) {
    const auto& x = iu.messages[k];
    const auto& y = dog.messages[k];
    ASSERT_EQ(std::tie(x.sender, x.recipient, x.round, x.deliver_at),
              std::tie(y.sender, y.recipient, y.round, y.deliver_at));
  }
  EXPECT_EQ(iu.normalization_cap, dog.normalization_cap);
  EXPECT_NE(iu.actions, dog.actions);
}

TEST(PropertyTest, EnvironmentIndependentOfLearnerSeed) {
  const auto c = SmallConfig();
  const auto a = MakeWorld(c, 8);
  const auto b = MakeWorld(c, 8);
  ASSERT_EQ(a.targets.positions.size(), b.targets.positions.size());
  for (std::size_t k = 0; k < a.targets.positions.size(); ++k) {
    EXPECT_EQ(a.targets.positions[k].x, b.targets.positions[k].x);
  }
  EXPECT_EQ(a.cap, b.cap);
}

TEST(AggregateTest, HandComputedInterval) {
  std::vector<RunResult> runs(2);
  runs[0].coverage = {1, 3};
  runs[1].coverage = {3, 5};
  const auto s = Aggregate(runs, 50);
  EXPECT_EQ(s.mean, (std::vector<double>{2.0, 4.0}));
  // Sample sd sqrt(2) over n = 2: half width 1.96 * sqrt(2) / sqrt(2).
  EXPECT_NEAR(s.ci_half_width(0), 1.96, 1e-12);
  EXPECT_NEAR(s.ci_low[1], 4.0 - 1.96, 1e-12);
  EXPECT_EQ(s.running_avg, (std::vector<double>{2.0, 3.0}));
}

TEST(AggregateTest, SingleRunHasZeroInterval) {
  auto c = SmallConfig();
  c.runs = 1;
  const auto mc = RunMonteCarlo(c);
  const auto single = RunSingle(c, c.seed);
  ASSERT_EQ(mc.stats.rounds(), single.coverage.size());
  for (std::size_t t = 0; t < mc.stats.rounds(); ++t) {
    EXPECT_EQ(mc.stats.mean[t], single.coverage[t]);
    EXPECT_EQ(mc.stats.ci_half_width(t), 0.0);
  }
}

TEST(AggregateTest, RaggedRunsRejected) {
  std::vector<RunResult> runs(2);
  runs[0].coverage = {1};
  runs[1].coverage = {1, 2};
  EXPECT_THROW(Aggregate(runs, 5), std::invalid_argument);
}

TEST(RunningAverageTest, TrailingWindow) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  EXPECT_EQ(RunningAverage(x, 2), (std::vector<double>{1.0, 1.5, 2.5, 3.5, 4.5}));
  EXPECT_EQ(RunningAverage(x, 10), (std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0}));
  EXPECT_THROW(RunningAverage(x, 0), std::invalid_argument);
}

TEST(TailMeanTest, AveragesLastRounds) {
  AggregateStats s;
  s.running_avg = {1.0, 2.0, 4.0, 6.0};
  EXPECT_EQ(TailMean(s, 2), 5.0);
  EXPECT_EQ(TailMean(s, 100), 3.25);
  EXPECT_EQ(TailMean(AggregateStats{}, 3), 0.0);
}

TEST(EmitCsvTest, EmptyStatsHeaderOnly) {
  EXPECT_EQ(StatsText(AggregateStats{}), "t,mean,ci_low,ci_high,running_avg\n");
}

TEST(EmitCsvTest, ThreeRoundsFourLinesAndExactReparse) {
  AggregateStats s;
  s.mean = {0.1, 1.0 / 3.0, 2.5};
  s.ci_low = {0.05, 0.2, 2.0};
  s.ci_high = {0.15, 0.4666666666666667, 3.0};
  s.running_avg = {0.1, (0.1 + 1.0 / 3.0) / 2.0, std::nextafter(1.0, 2.0)};
  const auto path = std::filesystem::temp_directory_path() / "dogiu_emit_test.csv";
  EmitCsv(s, path);
  std::ifstream in(path, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream reread(text);
  EXPECT_EQ(ReadStatsCsv(reread), s);
  std::filesystem::remove(path);
}

TEST(EmitCsvTest, IoFailureNamesPath) {
  try {
    EmitCsv(AggregateStats{}, "/nonexistent-dir/out.csv");
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.csv"), std::string::npos);
  }
}

// Frozen mean curve of a small seeded configuration. Set DOGIU_WRITE_GOLDEN=1
// to regenerate after an intentional behavior change.
TEST(GoldenTest, SmallConfigMeanCurve) {
  auto c = SmallConfig();
  c.horizon = 200;
  c.runs = 5;
  const auto stats = RunMonteCarlo(c).stats;
  const std::string path = std::string(DOGIU_TEST_DATA) + "/golden_small_dogiu.csv";
  if (std::getenv("DOGIU_WRITE_GOLDEN") != nullptr) EmitCsv(stats, path);
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing golden file " << path;
  EXPECT_EQ(ReadStatsCsv(in), stats);
}

TEST(TabularGameTest, DeterministicAndWithinOptimum) {
  TabularGame game{acceptance::ApproximationInstance(), {3, 3, 3}, CommGraph::Complete(3)};
  game.horizon = 300;
  game.delays = DelayModel::Uniform(2);
  const auto a = PlayTabularGame(game, 1);
  const auto b = PlayTabularGame(game, 1);
  EXPECT_EQ(a.actions, b.actions);
  const double best = BruteForceOptimum(game.f, game.action_counts).value;
  ASSERT_EQ(a.value.size(), 300u);
  for (double v : a.value) EXPECT_LE(v, best + 1e-12);
}

TEST(TabularGameTest, CoinZeroOnCompleteGraph) {
  TabularGame game{acceptance::ApproximationInstance(), {3, 3, 3}, CommGraph::Complete(3)};
  game.horizon = 50;
  game.measure_coin = true;
  for (double c : PlayTabularGame(game, 2).coin_sum) EXPECT_EQ(c, 0.0);
}

TEST(ScriptedBanditTest, ProfileIndexAndRegretDecay) {
  const int counts[] = {2, 3};
  EXPECT_EQ(ProfileIndex({{1, 1}, {2, 2}}, counts), 1 * 3 + 2);
  auto bandit = acceptance::RegretInstance(400);
  const double short_rate = PlayScriptedBandit(bandit, 1).regret / 400.0;
  bandit.horizon = 6400;
  const double long_rate = PlayScriptedBandit(bandit, 1).regret / 6400.0;
  EXPECT_LT(long_rate, short_rate);
}

TEST(AcceptanceTest, ReportFormatAndExitSemantics) {
  std::ostringstream out;
  AcceptanceOptions options;
  options.only = {4, 5};
  const auto results = RunAcceptance(options, out);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_TRUE(AllPass(results));
  const std::string text = out.str();
  EXPECT_NE(text.find("PASS [4] "), std::string::npos);
  EXPECT_NE(text.find("PASS [5] "), std::string::npos);
  EXPECT_NE(text.find(" | threshold "), std::string::npos);
  EXPECT_NE(text.find("ALL PASS: 2/2 criteria"), std::string::npos);
}

TEST(AcceptanceTest, PrintCriterionLine) {
  std::ostringstream out;
  PrintCriterion(out, {7, "demo", false, "0.5", "< 0.25"});
  EXPECT_EQ(out.str(), "FAIL [7] demo: 0.5 | threshold < 0.25 | 0 s\n");
}

}  // namespace
}  // namespace dogiu
