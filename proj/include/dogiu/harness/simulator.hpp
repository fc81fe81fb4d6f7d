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

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dogiu/asynchrony.hpp"
#include "dogiu/bandit.hpp"
#include "dogiu/envs.hpp"
#include "dogiu/harness/config.hpp"
#include "dogiu/network.hpp"
#include "dogiu/rng.hpp"

namespace dogiu {

struct TraceRow {
  int round = 0;
  int chosen_action = 0;
  double p_chosen = 0.0;
  double z0 = 0.0;
  int batches_applied = 0;
  std::optional<double> max_error;  // M_t, when instrumented
};

struct RunOptions {
  bool record_trace = false;         // per-agent TraceRow per round
  bool instrument_errors = false;    // fill TraceRow::max_error
  bool record_messages = false;      // every broadcast message
  bool record_weights = false;       // log-weights after every tick
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<int> coverage;  // per round, raw target count
  double normalization_cap = 1.0;
  int clamped_rewards = 0;
  std::vector<std::vector<int>> actions;                    // [round][agent]
  std::vector<std::vector<TraceRow>> traces;                // [agent][round]
  std::vector<InFlightMessage> messages;
  std::vector<std::vector<std::vector<double>>> weights;    // [round][agent][action]
};

namespace detail {

inline DelayModel MakeDelayModel(const ExperimentConfig& config) {
  if (config.delay_kind == "constant") return DelayModel::Constant(config.dbar);
  if (config.delay_kind == "uniform") return DelayModel::Uniform(config.dbar);
  std::ifstream in(config.delay_trace);
  if (!in) throw std::runtime_error("cannot open delay trace '" + config.delay_trace + "'");
  return ParseDelayTrace(in);
}

inline CommGraph MakeGraph(const ExperimentConfig& config) {
  if (config.graph == "grid4") return CommGraph::Grid4(config.grid_rows, config.grid_cols);
  const auto edges = config.Edges();
  return CommGraph::FromEdges(config.agent_count(), edges);
}

}  // namespace detail

// Builds the world of one seed: cameras, initial targets, normalization cap.
inline CoverageWorld MakeWorld(const ExperimentConfig& config, std::uint64_t seed) {
  CoverageWorld world;
  world.cameras = CameraConfig::Grid(config.grid_rows, config.grid_cols,
                                     config.workspace_width, config.workspace_height,
                                     config.headings, config.fov_half_angle(),
                                     config.sensing_range);
  world.cameras.Validate(config.workspace_width, config.workspace_height);
  Rng scene = Rng::Stream(seed, streams::kScene);
  world.targets = TargetSystem::Clustered(
      config.targets, config.clusters, config.target_speed, config.resample_period,
      config.noise_sigma, config.workspace_width, config.workspace_height,
      config.cluster_spread, scene);
  if (config.normalization_cap > 0.0) {
    world.cap = config.normalization_cap;
  } else {
    Rng pilot = Rng::Stream(seed, streams::kPilot);
    world.cap = PilotNormalizationCap(world.cameras, world.targets, config.pilot_steps, pilot,
                                      config.pilot_quantile);
  }
  return world;
}

// One seeded run of the monitoring task. Environment randomness (targets,
// delays, clocks) and learner randomness come from disjoint substreams, so
// swapping the algorithm never changes the world.
class Simulation {
 public:
  Simulation(const ExperimentConfig& config, std::uint64_t seed, RunOptions options = {})
      : config_(config),
        seed_(seed),
        options_(options),
        world_(MakeWorld(config, seed)),
        sectors_(world_.cameras),
        bus_(detail::MakeGraph(config), detail::MakeDelayModel(config),
             config.skew_delivery ? 1 : 0),
        clock_(config.rho, Mix64(seed ^ 0xc10c4ULL)),
        target_rng_(Rng::Stream(seed, streams::kTargets)),
        delay_rng_(Rng::Stream(seed, streams::kDelays)) {
    config_.Validate();
    const int n = config_.agent_count();
    const auto rule = config_.algorithm == Algorithm::kDogIu ? UpdateRule::kIntermediate
                                                             : UpdateRule::kDeferred;
    for (int i = 0; i < n; ++i) {
      const auto neighbors = bus_.graph().in_neighbors(i);
      int bound = 0;
      for (int j : neighbors) bound = std::max(bound, bus_.delays().BoundFor({j, i}));
      if (config_.skew_delivery && !neighbors.empty()) ++bound;
      const double eta =
          LearningRate(config_.headings, bound, config_.horizon, config_.lr_scale);
      learners_.emplace_back(config_.headings, eta,
                             std::vector<int>(neighbors.begin(), neighbors.end()), bound,
                             rule, config_.default_action);
      learner_rngs_.push_back(Rng::Stream(seed, streams::kLearner, static_cast<std::uint32_t>(i)));
    }
    frames_[0] = world_.targets.positions;
    result_.seed = seed;
    result_.normalization_cap = world_.cap;
    if (options_.record_trace) result_.traces.resize(static_cast<std::size_t>(n));
  }

  // sectors_ points into world_.
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const CoverageWorld& world() const { return world_; }
  const std::vector<LearnerState>& learners() const { return learners_; }

  RunResult Run() {
    for (int t = 1; t <= config_.horizon; ++t) Tick(t);
    return std::move(result_);
  }

  void Tick(int t) {
    const int n = config_.agent_count();
    AdvanceFrames(t);

    std::vector<int> actions(static_cast<std::size_t>(n));
    std::vector<double> probs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      auto [a, p] = learners_[static_cast<std::size_t>(i)].Sample(
          learner_rngs_[static_cast<std::size_t>(i)]);
      actions[static_cast<std::size_t>(i)] = a;
      probs[static_cast<std::size_t>(i)] = p;
    }
    history_[t] = actions;

    MessageBus::Lateness lateness;
    if (config_.skew_delivery && config_.rho > 0.0) {
      // Arrives physically at tau_sender(s) + d; the recipient picks it up at
      // tick s + d only if it has not executed that tick yet.
      lateness = [this](const InFlightMessage& m) {
        const double arrival = clock_.Offset(m.sender, m.round);
        const double pickup = clock_.Offset(m.recipient, m.deliver_at);
        return arrival > pickup ? 1 : 0;
      };
    }
    for (int i = 0; i < n; ++i) {
      auto sent = bus_.Broadcast(i, t, actions[static_cast<std::size_t>(i)], delay_rng_,
                                 lateness);
      if (options_.record_messages) {
        result_.messages.insert(result_.messages.end(), sent.begin(), sent.end());
      }
    }
    auto deliveries = bus_.Deliver(t);

    static const Arrivals kNone;
    for (int i = 0; i < n; ++i) {
      auto& learner = learners_[static_cast<std::size_t>(i)];
      auto it = deliveries.find(i);
      const Arrivals& arrivals = it == deliveries.end() ? kNone : it->second;
      const auto model = [this, i](int s, int own, const std::map<int, int>& others) {
        return AgentReward(i, s, own, others);
      };
      const auto summary = learner.Step(t, actions[static_cast<std::size_t>(i)],
                                        probs[static_cast<std::size_t>(i)], arrivals, model);
      if (options_.record_trace) {
        TraceRow row{t, actions[static_cast<std::size_t>(i)], probs[static_cast<std::size_t>(i)],
                     summary.initial_estimate, summary.batches_applied, std::nullopt};
        if (options_.instrument_errors && learner.rule() == UpdateRule::kIntermediate) {
          row.max_error = learner.CumulativeErrorAgainst(TruthFor(i)).max_abs;
        }
        result_.traces[static_cast<std::size_t>(i)].push_back(row);
      }
    }

    result_.coverage.push_back(GlobalCoverage(t, actions));
    result_.actions.push_back(actions);
    if (options_.record_weights) {
      std::vector<std::vector<double>> snapshot;
      for (const auto& learner : learners_) {
        snapshot.emplace_back(learner.log_weights().begin(), learner.log_weights().end());
      }
      result_.weights.push_back(std::move(snapshot));
    }
    Prune(t);
  }

  // Agent i's reward for round s: its marginal count over the given neighbor
  // headings, with targets placed at i's execution time for s.
  double AgentReward(int agent, int s, int own,
                     const std::map<int, int>& neighbor_actions) {
    const auto targets = TargetsAt(clock_.ExecutionTime(agent, s));
    std::vector<GroundElement> others;
    others.reserve(neighbor_actions.size());
    for (const auto& [j, a] : neighbor_actions) others.push_back({j, a});
    const double value = CountMarginal(sectors_, targets, {agent, own}, others) / world_.cap;
    if (value > 1.0) {
      ++result_.clamped_rewards;
      return 1.0;
    }
    return value;
  }

 private:
  void AdvanceFrames(int t) {
    // Frames t - 1, t and t + 1 cover every execution time of round t.
    while (frames_.rbegin()->first < t + 1) {
      const int next = frames_.rbegin()->first + 1;
      world_.targets.Step(next, target_rng_);
      frames_[next] = world_.targets.positions;
    }
  }

  std::vector<Vec2> TargetsAt(double tau) const {
    const int lo = static_cast<int>(std::floor(tau));
    const double w = tau - lo;
    const auto& a = frames_.at(lo);
    if (w == 0.0) return a;
    const auto& b = frames_.at(lo + 1);
    std::vector<Vec2> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * (1.0 - w) + b[k] * w;
    return out;
  }

  std::map<int, double> TruthFor(int agent) {
    std::map<int, double> truth;
    for (const auto& [s, round] : learners_[static_cast<std::size_t>(agent)].pending()) {
      std::map<int, int> others;
      const auto& acted = history_.at(s);
      for (int j : bus_.graph().in_neighbors(agent)) others[j] = acted[static_cast<std::size_t>(j)];
      const int before = result_.clamped_rewards;
      truth[s] = AgentReward(agent, s, round.chosen, others);
      result_.clamped_rewards = before;
    }
    return truth;
  }

  int GlobalCoverage(int t, std::span<const int> actions) {
    const int n = config_.agent_count();
    if (config_.rho == 0.0) {
      std::vector<GroundElement> sectors;
      for (int i = 0; i < n; ++i) sectors.push_back({i, actions[static_cast<std::size_t>(i)]});
      return CountCovered(world_.cameras, frames_.at(t), sectors);
    }
    std::vector<Deployment> entries;
    for (int i = 0; i < n; ++i) {
      entries.push_back({i, actions[static_cast<std::size_t>(i)], clock_.ExecutionTime(i, t)});
    }
    const TimeStampedReward coverage(
        [this](double tau, std::span<const Deployment> schedule) {
          std::vector<GroundElement> sectors;
          for (const auto& d : schedule) sectors.push_back({d.agent, d.action});
          return static_cast<double>(CountCovered(world_.cameras, TargetsAt(tau), sectors));
        },
        0.0, 0.0);
    return static_cast<int>(std::lround(AsyncGlobalReward(coverage, entries)));
  }

  void Prune(int t) {
    const int keep_from = t - bus_.staleness_limit() - 2;
    while (!frames_.empty() && frames_.begin()->first < keep_from) frames_.erase(frames_.begin());
    while (!history_.empty() && history_.begin()->first < keep_from) history_.erase(history_.begin());
  }

  ExperimentConfig config_;
  std::uint64_t seed_;
  RunOptions options_;
  CoverageWorld world_;
  SectorTest sectors_;
  MessageBus bus_;
  ClockModel clock_;
  Rng target_rng_;
  Rng delay_rng_;
  std::vector<LearnerState> learners_;
  std::vector<Rng> learner_rngs_;
  std::map<int, std::vector<Vec2>> frames_;
  std::map<int, std::vector<int>> history_;
  RunResult result_;
};

inline RunResult RunSingle(const ExperimentConfig& config, std::uint64_t seed,
                           RunOptions options = {}) {
  config.Validate();
  Simulation sim(config, seed, options);
  return sim.Run();
}

}  // namespace dogiu
