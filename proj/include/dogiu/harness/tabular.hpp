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


#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dogiu/bandit.hpp"
#include "dogiu/network.hpp"
#include "dogiu/rng.hpp"
#include "dogiu/submodular.hpp"

namespace dogiu {

// A stationary game over an explicit set function. Agent i's bandit reward is
// its marginal gain over its in-neighbors' actions, divided by f's upper bound.
struct TabularGame {
  SetFunction f;
  std::vector<int> action_counts;
  CommGraph graph;
  DelayModel delays = DelayModel::Constant(0);
  int horizon = 1000;
  double lr_scale = 1.0;
  UpdateRule rule = UpdateRule::kIntermediate;
  int default_action = 0;
  bool measure_coin = false;
};

struct TabularRun {
  std::vector<double> value;     // f(A_t)
  std::vector<double> coin_sum;  // sum_i coin_i(A_t), when measured
  std::vector<std::vector<int>> actions;
};

inline TabularRun PlayTabularGame(const TabularGame& game, std::uint64_t seed) {
  const int n = static_cast<int>(game.action_counts.size());
  if (n != game.graph.agent_count()) {
    throw std::invalid_argument("tabular game: graph and action counts disagree");
  }
  MessageBus bus(game.graph, game.delays);
  Rng delay_rng = Rng::Stream(seed, streams::kDelays);
  std::vector<LearnerState> learners;
  std::vector<Rng> rngs;
  for (int i = 0; i < n; ++i) {
    const auto in = game.graph.in_neighbors(i);
    int bound = 0;
    for (int j : in) bound = std::max(bound, game.delays.BoundFor({j, i}));
    const int k = game.action_counts[static_cast<std::size_t>(i)];
    learners.emplace_back(k, LearningRate(k, bound, game.horizon, game.lr_scale),
                          std::vector<int>(in.begin(), in.end()), bound, game.rule,
                          game.default_action);
    rngs.push_back(Rng::Stream(seed, streams::kLearner, static_cast<std::uint32_t>(i)));
  }

  TabularRun run;
  const double scale = game.f.upper_bound();
  static const Arrivals kNone;
  for (int t = 1; t <= game.horizon; ++t) {
    std::vector<int> actions(static_cast<std::size_t>(n));
    std::vector<double> probs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      auto [a, p] = learners[static_cast<std::size_t>(i)].Sample(rngs[static_cast<std::size_t>(i)]);
      actions[static_cast<std::size_t>(i)] = a;
      probs[static_cast<std::size_t>(i)] = p;
    }
    for (int i = 0; i < n; ++i) bus.Broadcast(i, t, actions[static_cast<std::size_t>(i)], delay_rng);
    auto deliveries = bus.Deliver(t);
    for (int i = 0; i < n; ++i) {
      auto it = deliveries.find(i);
      const auto model = [&game, i, scale](int, int own, const std::map<int, int>& others) {
        Assignment base;
        for (const auto& [j, a] : others) base.Insert({j, a});
        return MarginalGain(game.f, {i, own}, base) / scale;
      };
      learners[static_cast<std::size_t>(i)].Step(t, actions[static_cast<std::size_t>(i)],
                                                 probs[static_cast<std::size_t>(i)],
                                                 it == deliveries.end() ? kNone : it->second,
                                                 model);
    }
    const Assignment joint = Assignment::FromActions(actions);
    run.value.push_back(game.f(joint));
    if (game.measure_coin) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += Coin(game.f, i, joint, game.graph.in_neighbors(i));
      run.coin_sum.push_back(total);
    }
    run.actions.push_back(std::move(actions));
  }
  return run;
}

// One learner facing scripted neighbors on a fixed reward table
// reward[own][profile], where profile indexes the neighbors' joint action.
struct ScriptedBandit {
  std::vector<std::vector<double>> reward;
  std::vector<int> neighbor_action_counts;
  int delay_bound = 0;
  int horizon = 1000;
  double lr_scale = 1.0;
  UpdateRule rule = UpdateRule::kIntermediate;
};

struct ScriptedRun {
  double regret = 0.0;
  double realized = 0.0;
};

inline int ProfileIndex(const std::map<int, int>& actions, std::span<const int> counts) {
  int index = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    index = index * counts[j] + actions.at(static_cast<int>(j) + 1);
  }
  return index;
}

// The learner is agent 0 and the scripted neighbors are agents 1..m, each
// playing uniformly at random; their messages reach agent 0 after
// Unif{0..delay_bound} ticks.
inline ScriptedRun PlayScriptedBandit(const ScriptedBandit& bandit, std::uint64_t seed) {
  const int k = static_cast<int>(bandit.reward.size());
  const int m = static_cast<int>(bandit.neighbor_action_counts.size());
  std::vector<std::pair<int, int>> edges;
  for (int j = 1; j <= m; ++j) edges.push_back({j, 0});
  MessageBus bus(CommGraph::FromEdges(m + 1, edges), DelayModel::Uniform(bandit.delay_bound));
  Rng delay_rng = Rng::Stream(seed, streams::kDelays);
  Rng script_rng = Rng::Stream(seed, streams::kTargets);
  Rng learner_rng = Rng::Stream(seed, streams::kLearner);
  std::vector<int> neighbors;
  for (int j = 1; j <= m; ++j) neighbors.push_back(j);
  LearnerState learner(k, LearningRate(k, bandit.delay_bound, bandit.horizon, bandit.lr_scale),
                       neighbors, bandit.delay_bound, bandit.rule);

  const auto model = [&bandit](int, int own, const std::map<int, int>& others) {
    return bandit.reward[static_cast<std::size_t>(own)]
                      [static_cast<std::size_t>(ProfileIndex(others, bandit.neighbor_action_counts))];
  };
  std::vector<int> plays;
  std::vector<std::vector<double>> table;
  static const Arrivals kNone;
  for (int t = 1; t <= bandit.horizon; ++t) {
    auto [a, p] = learner.Sample(learner_rng);
    std::map<int, int> profile;
    for (int j = 1; j <= m; ++j) {
      const int b = static_cast<int>(script_rng.UniformInt(
          static_cast<std::uint64_t>(bandit.neighbor_action_counts[static_cast<std::size_t>(j - 1)])));
      profile[j] = b;
      bus.Broadcast(j, t, b, delay_rng);
    }
    auto deliveries = bus.Deliver(t);
    auto it = deliveries.find(0);
    learner.Step(t, a, p, it == deliveries.end() ? kNone : it->second, model);
    const int index = ProfileIndex(profile, bandit.neighbor_action_counts);
    std::vector<double> row(static_cast<std::size_t>(k));
    for (int b = 0; b < k; ++b) {
      row[static_cast<std::size_t>(b)] =
          bandit.reward[static_cast<std::size_t>(b)][static_cast<std::size_t>(index)];
    }
    plays.push_back(a);
    table.push_back(std::move(row));
  }
  ScriptedRun run;
  run.regret = StaticRegret(plays, table);
  for (std::size_t t = 0; t < plays.size(); ++t) {
    run.realized += table[t][static_cast<std::size_t>(plays[t])];
  }
  return run;
}

}  // namespace dogiu
