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
#include <map>
#include <numeric>
#include <vector>

#include "dogiu/bandit.hpp"
#include "dogiu/rng.hpp"

namespace dogiu {
namespace {

RewardModel Constant(double z) {
  return [z](int, int, const std::map<int, int>&) { return z; };
}

// Reference: exp-weights distribution from an explicit list of increments.
std::vector<double> DistributionFrom(const std::vector<std::vector<double>>& increments,
                                     int k) {
  std::vector<long double> logw(static_cast<std::size_t>(k), 0.0L);
  for (const auto& d : increments) {
    for (int a = 0; a < k; ++a) logw[static_cast<std::size_t>(a)] += d[static_cast<std::size_t>(a)];
  }
  long double total = 0.0L;
  for (auto v : logw) total += std::exp(v);
  std::vector<double> p;
  for (auto v : logw) p.push_back(static_cast<double>(std::exp(v) / total));
  return p;
}

std::vector<double> Estimates(int k, int chosen, double p, double x, double eta) {
  std::vector<double> d;
  for (int a = 0; a < k; ++a) d.push_back(eta * (a == chosen ? 1.0 - (1.0 - x) / p : 1.0));
  return d;
}

void ExpectSameDistribution(const std::vector<double>& got, const std::vector<double>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t a = 0; a < got.size(); ++a) EXPECT_NEAR(got[a], want[a], 1e-12) << a;
}

TEST(LearningRateTest, ClosedForm) {
  const long double oracle = std::sqrt(std::log(8.0L) / (18.0L * 2000.0L));
  EXPECT_NEAR(LearningRate(8, 10, 2000, 1.0), static_cast<double>(oracle), 1e-15);
  EXPECT_NEAR(LearningRate(8, 10, 2000, 1.0), 0.0076, 5e-5);
  EXPECT_NEAR(LearningRate(8, 10, 2000, 14.0), 0.1064, 5e-5);
  EXPECT_EQ(LearningRate(8, 10, 2000, 2.0), 2.0 * LearningRate(8, 10, 2000, 1.0));
}

TEST(LearningRateTest, Rejections) {
  EXPECT_THROW(LearningRate(1, 0, 10, 1.0), std::invalid_argument);
  EXPECT_THROW(LearningRate(4, -1, 10, 1.0), std::invalid_argument);
  EXPECT_THROW(LearningRate(4, 0, 0, 1.0), std::invalid_argument);
  EXPECT_THROW(LearningRate(4, 0, 10, 0.0), std::invalid_argument);
}

TEST(LearningRateTest, TunedForm) {
  EXPECT_NEAR(TunedLearningRate(8, 2000, 4.0), std::sqrt(std::log(8.0) / (8.0 * 2000.0 * 2.0)),
              1e-15);
}

TEST(SampleTest, UniformWeightsGiveQuarter) {
  LearnerState s(4, 0.1, {}, 0);
  for (double p : s.Distribution()) EXPECT_EQ(p, 0.25);
  Rng rng = Rng::Stream(1, 0);
  EXPECT_EQ(s.Sample(rng).second, 0.25);
}

TEST(SampleTest, SaturatedWeightDominates) {
  LearnerState s(4, 0.1, {}, 0);
  s.ApplyIncrements(std::vector<double>{0.0, 20.0, 0.0, 0.0});
  const auto p = s.Distribution();
  EXPECT_GT(p[1], 0.999);
  Rng rng = Rng::Stream(2, 0);
  int hits = 0;
  for (int k = 0; k < 1000; ++k) hits += s.Sample(rng).first == 1 ? 1 : 0;
  EXPECT_GE(hits, 995);
}

TEST(SampleTest, DeterministicForFixedSeed) {
  LearnerState s(5, 0.1, {}, 0);
  s.ApplyIncrements(std::vector<double>{0.3, -0.2, 0.1, 0.0, 0.5});
  Rng a = Rng::Stream(7, 3);
  Rng b = Rng::Stream(7, 3);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(s.Sample(a), s.Sample(b));
}

TEST(EstimatorTest, Examples) {
  EXPECT_EQ(ImportanceWeightedEstimate(1, 0, 0.3, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(ImportanceWeightedEstimate(0, 0, 1.0, 0.6), 0.6);
  EXPECT_EQ(ImportanceWeightedEstimate(2, 2, 0.25, 0.0), -3.0);
  EXPECT_THROW(ImportanceWeightedEstimate(0, 0, 0.0, 0.5), std::invalid_argument);
}

TEST(InitialUpdateTest, FullRewardShiftsUniformly) {
  LearnerState s(3, 0.2, {}, 0);
  s.OpenRound(1, 1, 0.4);
  const auto d = s.InitialUpdate(1, 1.0);
  for (double v : d) EXPECT_DOUBLE_EQ(v, 0.2);
  for (double p : s.Distribution()) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
}

TEST(InitialUpdateTest, ZeroRewardHalfProbability) {
  LearnerState s(3, 0.2, {}, 0);
  s.OpenRound(1, 0, 0.5);
  const auto d = s.InitialUpdate(1, 0.0);
  EXPECT_DOUBLE_EQ(d[0], -0.2);
  EXPECT_DOUBLE_EQ(d[1], 0.2);
  EXPECT_DOUBLE_EQ(d[2], 0.2);
}

TEST(InitialUpdateTest, ZeroLearningRateAndMissingRound) {
  LearnerState s(3, 0.0, {}, 0);
  s.OpenRound(1, 0, 0.5);
  for (double v : s.InitialUpdate(1, 0.3)) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(s.InitialUpdate(2, 0.3), std::out_of_range);
}

TEST(CorrectionUpdateTest, Examples) {
  LearnerState s(3, 0.1, {4}, 2);
  s.OpenRound(1, 2, 0.5);
  for (double v : s.CorrectionUpdate(1, 0.4, 0.4)) EXPECT_EQ(v, 0.0);
  const auto d = s.CorrectionUpdate(1, 0.7, 0.2);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 0.0);
  EXPECT_NEAR(d[2], 0.1, 1e-15);
  EXPECT_THROW(s.CorrectionUpdate(9, 0.1, 0.2), std::out_of_range);
}

TEST(IngestBatchTest, EmptyArrivalsLeaveStateUnchanged) {
  LearnerState s(3, 0.1, {1}, 2);
  s.Step(1, 0, 0.5, {}, Constant(0.4));
  const std::vector<double> before(s.log_weights().begin(), s.log_weights().end());
  s.IngestBatch(1, {}, Constant(0.9));
  EXPECT_EQ(std::vector<double>(s.log_weights().begin(), s.log_weights().end()), before);
  EXPECT_EQ(s.pending().at(1).batches_seen, 0);
}

TEST(IngestBatchTest, FinalBatchUsesTruthAndRetires) {
  // Reward 0.9 when neighbor 1 plays action 2, else 0.3.
  const RewardModel model = [](int, int, const std::map<int, int>& n) {
    return n.at(1) == 2 ? 0.9 : 0.3;
  };
  LearnerState s(3, 0.1, {1}, 2);
  s.Step(1, 0, 0.5, {}, model);
  EXPECT_DOUBLE_EQ(s.pending().at(1).estimate, 0.3);
  const NeighborArrival batch[] = {{1, 2}};
  s.IngestBatch(1, batch, model);
  EXPECT_TRUE(s.pending().empty());
  ExpectSameDistribution(s.Distribution(), DistributionFrom({Estimates(3, 0, 0.5, 0.9, 0.1)}, 3));
}

TEST(IngestBatchTest, DuplicateArrivalRejected) {
  LearnerState s(2, 0.1, {1, 2}, 3);
  s.Step(1, 0, 0.5, {}, Constant(0.5));
  const NeighborArrival batch[] = {{1, 0}};
  s.IngestBatch(1, batch, Constant(0.5));
  EXPECT_THROW(s.IngestBatch(1, batch, Constant(0.5)), std::invalid_argument);
}

TEST(IngestBatchTest, DeferredRuleNeedsNoInitialUpdate) {
  LearnerState s(2, 0.1, {1}, 3, UpdateRule::kIntermediate);
  s.OpenRound(1, 0, 0.5);
  const NeighborArrival batch[] = {{1, 0}};
  EXPECT_THROW(s.IngestBatch(1, batch, Constant(0.5)), std::logic_error);
}

TEST(StepTest, TwoPastRoundsInOneTickMatchReference) {
  // Reward depends on the neighbor's action: 0.2 + 0.2 * action.
  const RewardModel model = [](int, int, const std::map<int, int>& n) {
    return 0.2 + 0.2 * n.at(1);
  };
  const double eta = 0.15;
  LearnerState s(3, eta, {1}, 3);
  s.Step(1, 0, 0.4, {}, model);  // estimate with default action 0 -> 0.2
  s.Step(2, 1, 0.3, {}, model);
  Arrivals arrivals;
  arrivals[1] = {{1, 2}};  // truth 0.6
  arrivals[2] = {{1, 3}};  // truth 0.8
  // Round 3: last known neighbor action is now 3 (from round 2) -> 0.8.
  const auto summary = s.Step(3, 2, 0.5, arrivals, model);
  EXPECT_EQ(summary.batches_applied, 2);
  EXPECT_DOUBLE_EQ(summary.initial_estimate, 0.8);
  EXPECT_EQ(summary.rounds_retired, 2);
  const auto want = DistributionFrom(
      {Estimates(3, 0, 0.4, 0.6, eta), Estimates(3, 1, 0.3, 0.8, eta),
       Estimates(3, 2, 0.5, 0.8, eta)},
      3);
  ExpectSameDistribution(s.Distribution(), want);
}

TEST(StepTest, OutOfOrderArrivalsOnOneLink) {
  LearnerState s(2, 0.1, {1}, 4);
  s.Step(1, 0, 0.5, {}, Constant(0.5));
  s.Step(2, 1, 0.5, {}, Constant(0.5));
  Arrivals late;
  late[2] = {{1, 0}};
  s.Step(3, 0, 0.5, late, Constant(0.5));
  Arrivals early;
  early[1] = {{1, 1}};
  early[3] = {{1, 0}};
  EXPECT_NO_THROW(s.Step(4, 0, 0.5, early, Constant(0.5)));
  EXPECT_EQ(s.pending().size(), 1u);  // only round 4 open
  EXPECT_EQ(s.LastKnownAction(1), 0);  // round 3 is the newest known
}

TEST(StepTest, UnresolvedPastDelayBoundThrows) {
  LearnerState s(2, 0.1, {1}, 1);
  s.Step(1, 0, 0.5, {}, Constant(0.5));
  s.Step(2, 0, 0.5, {}, Constant(0.5));
  EXPECT_THROW(s.Step(3, 0, 0.5, {}, Constant(0.5)), std::logic_error);
}

TEST(DogTest, ConstantDelayDefersToTickPlusThree) {
  const double eta = 0.2;
  LearnerState s(2, eta, {1}, 3, UpdateRule::kDeferred);
  std::vector<std::vector<double>> applied;
  for (int t = 1; t <= 6; ++t) {
    Arrivals arrivals;
    if (t - 3 >= 1) arrivals[t - 3] = {{1, 0}};
    s.Step(t, 0, 0.5, arrivals, Constant(0.25));
    if (t - 3 >= 1) applied.push_back(Estimates(2, 0, 0.5, 0.25, eta));
    ExpectSameDistribution(s.Distribution(), DistributionFrom(applied, 2));
    if (t <= 3) {
      for (double w : s.log_weights()) EXPECT_EQ(w, 0.0);
    }
  }
}

TEST(DogTest, ScriptedTraceMatchesHandSimulation) {
  // Round s is played with (action, prob) = plays[s] and its neighbor message
  // arrives after delays[s]; DOG applies round s's single update at s + d_s.
  const int plays[] = {0, 1, 0, 1, 1, 0};
  const double probs[] = {0, 0.5, 0.4, 0.6, 0.3, 0.5};
  const int delays[] = {0, 2, 0, 3, 1, 0};
  const double truth[] = {0, 0.9, 0.1, 0.5, 0.7, 0.3};
  const RewardModel model = [&truth](int round, int, const std::map<int, int>&) {
    return truth[round];
  };
  const double eta = 0.3;
  LearnerState dog(2, eta, {1}, 3, UpdateRule::kDeferred);
  // Hand schedule: round 1 at tick 3, round 2 at 2, round 3 at 6, round 4 at 5, round 5 at 5.
  const std::map<int, std::vector<int>> resolves = {{2, {2}}, {3, {1}}, {5, {4, 5}}, {6, {3}}};
  std::vector<std::vector<double>> applied;
  for (int t = 1; t <= 6; ++t) {
    Arrivals arrivals;
    for (int s = 1; s <= 5; ++s) {
      if (s + delays[s] == t) arrivals[s] = {{1, 0}};
    }
    const int own = t <= 5 ? plays[t] : 0;
    const double p = t <= 5 ? probs[t] : 0.5;
    dog.Step(t, own, p, arrivals, model);
    if (resolves.contains(t)) {
      for (int s : resolves.at(t)) applied.push_back(Estimates(2, plays[s], probs[s], truth[s], eta));
    }
    ExpectSameDistribution(dog.Distribution(), DistributionFrom(applied, 2));
  }
}

TEST(CumulativeErrorTest, ExactEstimatesGiveZero) {
  LearnerState s(3, 0.1, {1}, 2);
  s.Step(1, 1, 0.5, {}, Constant(0.4));
  const auto e = s.CumulativeErrorAgainst({{1, 0.4}});
  EXPECT_EQ(e.max_abs, 0.0);
}

TEST(CumulativeErrorTest, OnlyChosenActionAccumulates) {
  LearnerState s(3, 0.1, {1}, 2);
  s.Step(1, 0, 0.5, {}, Constant(0.3));
  const auto e = s.CumulativeErrorAgainst({{1, 0.8}});
  // rhat(0.3) - rhat(0.8) at the chosen action = (0.3 - 0.8) / 0.5.
  EXPECT_DOUBLE_EQ(e.per_action[0], -1.0);
  EXPECT_EQ(e.per_action[1], 0.0);
  EXPECT_EQ(e.per_action[2], 0.0);
  EXPECT_DOUBLE_EQ(e.max_abs, 1.0);
}

TEST(CumulativeErrorTest, MissingTruthRejected) {
  LearnerState s(2, 0.1, {1}, 2);
  s.Step(1, 0, 0.5, {}, Constant(0.3));
  EXPECT_THROW(s.CumulativeErrorAgainst({}), std::out_of_range);
}

TEST(CumulativeErrorTest, NeverExceedsRecordedCeiling) {
  Rng rng = Rng::Stream(5, 0);
  LearnerState s(4, 0.2, {1, 2}, 4);
  std::map<int, double> truth;
  const RewardModel model = [](int round, int own, const std::map<int, int>& n) {
    return std::fmod(0.1 * round + 0.2 * own + 0.05 * (n.at(1) + n.at(2)), 1.0);
  };
  std::map<int, std::vector<NeighborArrival>> scheduled[40];
  std::map<int, std::map<int, int>> actual;
  for (int t = 1; t <= 30; ++t) {
    const auto [a, p] = s.Sample(rng);
    for (int j : {1, 2}) {
      const int act = static_cast<int>(rng.UniformInt(4));
      actual[t][j] = act;
      const int at = t + static_cast<int>(rng.UniformInt(5));
      scheduled[at][t].push_back({j, act});
    }
    truth[t] = model(t, a, actual[t]);
    Arrivals arrivals(scheduled[t].begin(), scheduled[t].end());
    s.Step(t, a, p, arrivals, model);
    const auto e = s.CumulativeErrorAgainst(truth);
    EXPECT_LE(e.max_abs, s.CumulativeErrorCeiling() + 1e-12);
    double total = 0.0;
    for (double q : s.Distribution()) {
      EXPECT_GT(q, 0.0);
      total += q;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(StaticRegretTest, Examples) {
  const std::vector<std::vector<double>> table = {{1.0, 0.0}, {0.5, 0.7}, {0.2, 0.9}};
  EXPECT_EQ(StaticRegret(std::vector<int>{0, 0, 0}, table), 0.0);
  const std::vector<std::vector<double>> flat = {{0.4, 0.4}, {0.4, 0.4}};
  EXPECT_EQ(StaticRegret(std::vector<int>{0, 1}, flat), 0.0);
  // Best fixed: action 0 with 1.7 (action 1 has 1.6); realized 1.9.
  EXPECT_NEAR(StaticRegret(std::vector<int>{0, 1, 0}, table), 1.7 - 1.9, 1e-15);
  EXPECT_THROW(StaticRegret(std::vector<int>{0}, table), std::invalid_argument);
}

TEST(PropertyTest, EstimatorUnbiasedByExhaustiveExpectation) {
  Rng rng = Rng::Stream(21, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.UniformInt(10));
    std::vector<double> p(static_cast<std::size_t>(k));
    double total = 0.0;
    for (double& v : p) total += (v = rng.Uniform(0.01, 1.0));
    for (double& v : p) v /= total;
    std::vector<double> r(static_cast<std::size_t>(k));
    for (double& v : r) v = rng.Uniform();
    for (int a = 0; a < k; ++a) {
      double e = 0.0;
      for (int c = 0; c < k; ++c) {
        e += p[static_cast<std::size_t>(c)] *
             ImportanceWeightedEstimate(a, c, p[static_cast<std::size_t>(c)],
                                        r[static_cast<std::size_t>(c)]);
      }
      EXPECT_NEAR(e, r[static_cast<std::size_t>(a)], 1e-12);
    }
  }
}

TEST(PropertyTest, InitialPlusCorrectionsTelescopes) {
  Rng rng = Rng::Stream(22, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.UniformInt(6));
    const int chosen = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(k)));
    const double p = rng.Uniform(0.05, 1.0);
    const double eta = rng.Uniform(0.01, 0.5);
    const int stages = 1 + static_cast<int>(rng.UniformInt(6));
    std::vector<double> z;
    for (int j = 0; j <= stages; ++j) z.push_back(rng.Uniform());
    LearnerState staged(k, eta, {1}, 1);
    staged.OpenRound(1, chosen, p);
    staged.InitialUpdate(1, z[0]);
    for (int j = 1; j <= stages; ++j) {
      staged.ApplyIncrements(staged.CorrectionUpdate(1, z[static_cast<std::size_t>(j)],
                                                     z[static_cast<std::size_t>(j - 1)]));
    }
    LearnerState once(k, eta, {1}, 1);
    once.OpenRound(1, chosen, p);
    once.InitialUpdate(1, z.back());
    for (int a = 0; a < k; ++a) {
      EXPECT_NEAR(staged.log_weights()[static_cast<std::size_t>(a)],
                  once.log_weights()[static_cast<std::size_t>(a)], 1e-12);
    }
  }
}

TEST(PropertyTest, SoftmaxIsHalfLipschitzInL1) {
  Rng rng = Rng::Stream(23, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = 1 + static_cast<int>(rng.UniformInt(16));
    std::vector<double> x(static_cast<std::size_t>(k)), y(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
      x[static_cast<std::size_t>(a)] = rng.Uniform(-8.0, 8.0);
      y[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] + rng.Uniform(-1.0, 1.0);
    }
    const auto sx = Softmax(x), sy = Softmax(y);
    double lhs = 0.0, rhs = 0.0;
    for (int a = 0; a < k; ++a) {
      lhs += std::abs(sx[static_cast<std::size_t>(a)] - sy[static_cast<std::size_t>(a)]);
      rhs += std::abs(x[static_cast<std::size_t>(a)] - y[static_cast<std::size_t>(a)]);
    }
    ASSERT_LE(lhs, 0.5 * rhs) << "trial " << trial;
  }
}

TEST(PropertyTest, ZeroDelayRulesCoincide) {
  Rng rng = Rng::Stream(24, 0);
  const RewardModel model = [](int round, int own, const std::map<int, int>& n) {
    return std::fmod(0.13 * round + 0.3 * own + 0.1 * n.at(1), 1.0);
  };
  LearnerState iu(3, 0.2, {1}, 0, UpdateRule::kIntermediate);
  LearnerState dog(3, 0.2, {1}, 0, UpdateRule::kDeferred);
  Rng ra = Rng::Stream(25, 0), rb = Rng::Stream(25, 0);
  for (int t = 1; t <= 200; ++t) {
    Arrivals arrivals;
    arrivals[t] = {{1, static_cast<int>(rng.UniformInt(3))}};
    const auto [a1, p1] = iu.Sample(ra);
    const auto [a2, p2] = dog.Sample(rb);
    ASSERT_EQ(a1, a2);
    iu.Step(t, a1, p1, arrivals, model);
    dog.Step(t, a2, p2, arrivals, model);
    ASSERT_EQ(std::vector<double>(iu.log_weights().begin(), iu.log_weights().end()),
              std::vector<double>(dog.log_weights().begin(), dog.log_weights().end()));
  }
}

}  // namespace
}  // namespace dogiu
