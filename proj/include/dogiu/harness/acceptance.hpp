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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dogiu/asynchrony.hpp"
#include "dogiu/bandit.hpp"
#include "dogiu/envs.hpp"
#include "dogiu/harness/config.hpp"
#include "dogiu/harness/simulator.hpp"
#include "dogiu/harness/stats.hpp"
#include "dogiu/harness/tabular.hpp"
#include "dogiu/network.hpp"
#include "dogiu/rng.hpp"
#include "dogiu/submodular.hpp"

namespace dogiu {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  std::string threshold;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::set<int> only;  // empty = every criterion
  int seeds = 20;
  // Multiplies the asynchrony gap bound before it is checked. Anything other
  // than 1 is a deliberate fault used to prove the suite can fail.
  double gamma_scale = 1.0;
};

namespace acceptance {

inline std::string Num(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

inline std::string Percent(double v) { return Num(100.0 * v) + "%"; }

struct PairedTails {
  double dog_iu = 0.0;
  double dog = 0.0;
  double relative() const { return (dog_iu - dog) / dog; }
};

// Monitoring task at the reference configuration. DOG-IU executes under clock
// skew 0.3 and DOG synchronously, on the same seeds.
inline PairedTails MonitoringTails(int dbar, int seeds) {
  ExperimentConfig config;
  config.dbar = dbar;
  config.runs = seeds;
  config.algorithm = Algorithm::kDogIu;
  config.rho = 0.3;
  const auto iu = RunMonteCarlo(config);
  config.algorithm = Algorithm::kDog;
  config.rho = 0.0;
  const auto dog = RunMonteCarlo(config);
  return {TailMean(iu.stats, 500), TailMean(dog.stats, 500)};
}

inline CriterionResult SmallDelayParity(const AcceptanceOptions& options) {
  const auto tails = MonitoringTails(1, options.seeds);
  CriterionResult r{1, "small-delay parity (dbar=1)", false, "", ""};
  r.pass = std::abs(tails.relative()) < 0.05;
  r.measured = "dog-iu " + Num(tails.dog_iu) + " vs dog " + Num(tails.dog) +
               ", |rel diff| " + Percent(std::abs(tails.relative()));
  r.threshold = "< 5%";
  return r;
}

inline CriterionResult LargeDelayAdvantage(const AcceptanceOptions& options) {
  const auto tails = MonitoringTails(20, options.seeds);
  CriterionResult r{2, "large-delay advantage (dbar=20)", false, "", ""};
  r.pass = tails.relative() >= 0.10;
  r.measured = "dog-iu " + Num(tails.dog_iu) + " vs dog " + Num(tails.dog) + ", rel gain " +
               Percent(tails.relative());
  r.threshold = ">= 10%";
  return r;
}

inline CriterionResult ZeroDelayIdentity(const AcceptanceOptions&) {
  ExperimentConfig config;
  config.grid_rows = 2;
  config.grid_cols = 2;
  config.workspace_width = 50.0;
  config.workspace_height = 50.0;
  config.targets = 20;
  config.clusters = 2;
  config.horizon = 200;
  config.dbar = 0;
  RunOptions options;
  options.record_weights = true;
  bool identical = true;
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    config.algorithm = Algorithm::kDogIu;
    const auto iu = RunSingle(config, seed, options);
    config.algorithm = Algorithm::kDog;
    const auto dog = RunSingle(config, seed, options);
    identical = identical && iu.actions == dog.actions && iu.weights == dog.weights &&
                iu.coverage == dog.coverage;
    ++compared;
  }
  CriterionResult r{3, "zero-delay algorithm identity", false, "", ""};
  r.pass = identical;
  r.measured = std::to_string(compared) + " seeds x 200 rounds, " +
               (identical ? "bit-identical" : "trajectories differ");
  r.threshold = "bit-identical weights and actions";
  return r;
}

inline CriterionResult Telescoping(const AcceptanceOptions&) {
  Rng rng = Rng::Stream(11, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int actions = 2 + static_cast<int>(rng.UniformInt(7));
    const int stages = 1 + static_cast<int>(rng.UniformInt(8));
    const int chosen = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(actions)));
    const double prob = rng.Uniform(0.05, 1.0);
    const double eta = rng.Uniform(0.001, 1.0);
    std::vector<double> z(static_cast<std::size_t>(stages) + 1);
    for (double& v : z) v = rng.Uniform();
    std::vector<int> neighbors(static_cast<std::size_t>(stages));
    std::iota(neighbors.begin(), neighbors.end(), 1);

    // Each arriving neighbor reports action 1; the estimate after k arrivals is z[k].
    const RewardModel model = [&z](int, int, const std::map<int, int>& known) {
      std::size_t arrived = 0;
      for (const auto& [j, a] : known) arrived += a == 1 ? 1 : 0;
      return z[arrived];
    };
    LearnerState staged(actions, eta, neighbors, stages);
    staged.OpenRound(1, chosen, prob);
    staged.InitialUpdate(1, z[0]);
    for (int k = 1; k <= stages; ++k) {
      const NeighborArrival batch[] = {{k, 1}};
      staged.IngestBatch(1, batch, model);
    }
    LearnerState oneshot(actions, eta, neighbors, stages);
    oneshot.OpenRound(1, chosen, prob);
    oneshot.InitialUpdate(1, z.back());
    for (int a = 0; a < actions; ++a) {
      worst = std::max(worst, std::abs(staged.log_weights()[static_cast<std::size_t>(a)] -
                                       oneshot.log_weights()[static_cast<std::size_t>(a)]));
    }
    if (!staged.pending().empty()) worst = std::max(worst, 1.0);
  }
  CriterionResult r{4, "telescoping correctness", false, "", ""};
  r.pass = worst <= 1e-12;
  r.measured = "max |staged - one-shot| = " + Num(worst) + " over 1000 sequences";
  r.threshold = "<= 1e-12";
  return r;
}

inline CriterionResult Unbiasedness(const AcceptanceOptions&) {
  Rng rng = Rng::Stream(12, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.UniformInt(15));
    std::vector<double> p(static_cast<std::size_t>(k));
    std::vector<double> reward(static_cast<std::size_t>(k));
    double total = 0.0;
    for (double& v : p) total += (v = rng.Uniform(0.01, 1.0));
    for (double& v : p) v /= total;
    for (double& v : reward) v = rng.Uniform();
    for (int a = 0; a < k; ++a) {
      double expectation = 0.0;
      for (int c = 0; c < k; ++c) {
        expectation += p[static_cast<std::size_t>(c)] *
                       ImportanceWeightedEstimate(a, c, p[static_cast<std::size_t>(c)],
                                                  reward[static_cast<std::size_t>(c)]);
      }
      worst = std::max(worst, std::abs(expectation - reward[static_cast<std::size_t>(a)]));
    }
  }
  CriterionResult r{5, "estimator unbiasedness", false, "", ""};
  r.pass = worst <= 1e-12;
  r.measured = "max |E[rhat] - r| = " + Num(worst) + " over 1000 (p, r) pairs";
  r.threshold = "<= 1e-12";
  return r;
}

inline CriterionResult SoftmaxLipschitz(const AcceptanceOptions&) {
  Rng rng = Rng::Stream(13, 0);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = 1 + static_cast<int>(rng.UniformInt(16));
    const double scale = trial % 2 == 0 ? 1.0 : 10.0;
    std::vector<double> x(static_cast<std::size_t>(k));
    std::vector<double> y(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
      x[static_cast<std::size_t>(a)] = rng.Uniform(-scale, scale);
      y[static_cast<std::size_t>(a)] = rng.Uniform(-scale, scale);
    }
    const auto sx = Softmax(x);
    const auto sy = Softmax(y);
    double lhs = 0.0;
    double rhs = 0.0;
    for (int a = 0; a < k; ++a) {
      lhs += std::abs(sx[static_cast<std::size_t>(a)] - sy[static_cast<std::size_t>(a)]);
      rhs += std::abs(x[static_cast<std::size_t>(a)] - y[static_cast<std::size_t>(a)]);
    }
    if (lhs > 0.5 * rhs) ++violations;
    if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
  }
  CriterionResult r{6, "softmax 1/2-Lipschitz", false, "", ""};
  r.pass = violations == 0;
  r.measured = std::to_string(violations) + " violations in 10000 pairs, max ratio " +
               Num(worst_ratio);
  r.threshold = "0 violations (ratio <= 0.5)";
  return r;
}

// Four actions whose rewards sit 0.2 apart for every neighbor action; the
// scripted neighbor only shifts all of them by 0.05.
inline ScriptedBandit RegretInstance(int horizon) {
  ScriptedBandit bandit;
  bandit.reward = {{0.8, 0.75}, {0.6, 0.55}, {0.4, 0.35}, {0.2, 0.15}};
  bandit.neighbor_action_counts = {2};
  bandit.delay_bound = 5;
  bandit.horizon = horizon;
  bandit.lr_scale = 1.0;
  return bandit;
}

inline CriterionResult RegretSublinearity(const AcceptanceOptions& options) {
  const int horizons[] = {500, 2000, 8000};
  std::vector<double> per_round;
  for (int horizon : horizons) {
    double total = 0.0;
    for (int seed = 1; seed <= options.seeds; ++seed) {
      total += PlayScriptedBandit(RegretInstance(horizon), static_cast<std::uint64_t>(seed)).regret;
    }
    per_round.push_back(total / options.seeds / horizon);
  }
  CriterionResult r{7, "regret sublinearity", false, "", ""};
  r.pass = per_round[0] > per_round[1] && per_round[1] > per_round[2] &&
           per_round[2] < 0.5 * per_round[0];
  r.measured = "Reg/T at 500,2000,8000 = " + Num(per_round[0]) + ", " + Num(per_round[1]) +
               ", " + Num(per_round[2]);
  r.threshold = "strictly decreasing, last < 50% of first";
  return r;
}

// 3 agents x 3 actions weighted coverage: shared items plus one private item
// per element, so the curvature stays below 1.
inline SetFunction ApproximationInstance() {
  std::map<GroundElement, std::vector<int>> covers;
  covers[{0, 0}] = {0, 1, 6};
  covers[{0, 1}] = {1, 2, 7};
  covers[{0, 2}] = {3, 8};
  covers[{1, 0}] = {1, 2, 9};
  covers[{1, 1}] = {2, 3, 4, 10};
  covers[{1, 2}] = {5, 11};
  covers[{2, 0}] = {0, 4, 12};
  covers[{2, 1}] = {4, 5, 13};
  covers[{2, 2}] = {1, 14};
  std::vector<double> weights = {0.16, 0.12, 0.08, 0.16, 0.12, 0.16};
  weights.resize(15, 0.02);
  return WeightedCoverage(std::move(covers), std::move(weights));
}

struct ApproximationMeasure {
  double fstar = 0.0;
  double kappa = 0.0;
  double value = 0.0;     // mean f(A_t) over the last quarter
  double coin_sum = 0.0;  // mean sum_i coin_i over the last quarter
};

inline ApproximationMeasure MeasureApproximation(const CommGraph& graph, int seeds) {
  const SetFunction f = ApproximationInstance();
  std::vector<GroundElement> ground;
  for (int i = 0; i < 3; ++i) {
    for (int a = 0; a < 3; ++a) ground.push_back({i, a});
  }
  ApproximationMeasure m;
  m.fstar = BruteForceOptimum(f, std::vector<int>{3, 3, 3}).value;
  m.kappa = Curvature(f, ground).kappa;
  TabularGame game{f, {3, 3, 3}, graph, DelayModel::Uniform(5), 20000, 14.0,
                   UpdateRule::kIntermediate, 0, true};
  const std::size_t from = static_cast<std::size_t>(game.horizon) * 3 / 4;
  double value = 0.0;
  double coin = 0.0;
  std::size_t samples = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto run = PlayTabularGame(game, static_cast<std::uint64_t>(seed));
    for (std::size_t t = from; t < run.value.size(); ++t) {
      value += run.value[t];
      coin += run.coin_sum[t];
      ++samples;
    }
  }
  m.value = value / static_cast<double>(samples);
  m.coin_sum = coin / static_cast<double>(samples);
  return m;
}

inline CriterionResult ApproximationBound(const AcceptanceOptions& options) {
  const auto m = MeasureApproximation(CommGraph::Complete(3), options.seeds);
  const double threshold = m.fstar / (1.0 + m.kappa) - 0.05 * m.fstar;
  CriterionResult r{8, "approximation bound (complete graph)", false, "", ""};
  r.pass = m.value >= threshold;
  r.measured = "mean f = " + Num(m.value) + " (f* = " + Num(m.fstar) + ", kappa = " +
               Num(m.kappa) + ")";
  r.threshold = ">= " + Num(threshold);
  return r;
}

inline CommGraph LineGraph3() {
  const std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  return CommGraph::FromEdges(3, edges);
}

inline CriterionResult CoinBound(const AcceptanceOptions& options) {
  const auto m = MeasureApproximation(LineGraph3(), options.seeds);
  const double threshold = m.fstar / (1.0 + m.kappa) -
                           m.kappa / (1.0 + m.kappa) * m.coin_sum - 0.05 * m.fstar;
  CriterionResult r{9, "coin bound (line graph 0-1-2)", false, "", ""};
  r.pass = m.value >= threshold;
  r.measured = "mean f = " + Num(m.value) + " (mean sum coin = " + Num(m.coin_sum) + ")";
  r.threshold = ">= " + Num(threshold);
  return r;
}

// A random smoothed-reward scene over `cameras` cameras; trajectory frames
// 0..frames-1.
inline SmoothScene RandomSmoothScene(int cameras, int targets, int frames, Rng& rng) {
  const int cols = cameras <= 2 ? cameras : (cameras + 1) / 2;
  const int rows = (cameras + cols - 1) / cols;
  const double width = 25.0 * cols;
  const double height = 25.0 * rows;
  SmoothScene scene;
  scene.cameras = CameraConfig::Grid(rows, cols, width, height, 8, std::numbers::pi / 6.0, 20.0);
  scene.cameras.positions.resize(static_cast<std::size_t>(cameras));
  TargetSystem system = TargetSystem::Clustered(targets, std::max(1, targets / 10), 1.0, 30,
                                                0.005, width, height, 3.0, rng);
  scene.trajectory.frames.push_back(system.positions);
  for (int t = 1; t < frames; ++t) {
    system.Step(t, rng);
    scene.trajectory.frames.push_back(system.positions);
  }
  for (int j = 0; j < cameras; ++j) {
    scene.previous_headings.push_back(static_cast<int>(rng.UniformInt(8)));
  }
  scene.cap = std::max(1, targets / 4);
  return scene;
}

inline CriterionResult SynchronousReduction(const AcceptanceOptions&) {
  Rng rng = Rng::Stream(14, 0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.UniformInt(8));
    const auto scene = RandomSmoothScene(n, 10 + static_cast<int>(rng.UniformInt(30)), 4, rng);
    const auto reward = SmoothedTimeStampedReward(scene, rng.Uniform(0.2, 5.0));
    const double tau = rng.Uniform(0.5, 2.5);
    std::vector<Deployment> entries;
    for (int j = 0; j < n; ++j) entries.push_back({j, static_cast<int>(rng.UniformInt(8)), tau});
    std::reverse(entries.begin(), entries.end());
    const double async_value = AsyncGlobalReward(reward, entries);
    SortSchedule(entries);
    if (async_value != reward(tau, entries)) ++mismatches;
  }
  CriterionResult r{10, "synchronous reduction", false, "", ""};
  r.pass = mismatches == 0;
  r.measured = std::to_string(mismatches) + " mismatches in 1000 instances";
  r.threshold = "exact equality";
  return r;
}

inline CriterionResult AsynchronyGap(const AcceptanceOptions& options) {
  Rng rng = Rng::Stream(15, 0);
  int violations = 0;
  int checked = 0;
  int audit_failures = 0;
  double worst_ratio = 0.0;
  for (int n : {2, 4, 8}) {
    for (double rho : {0.1, 0.3}) {
      const auto scene = RandomSmoothScene(n, 40, 12, rng);
      const auto reward = SmoothedTimeStampedReward(scene, 1.0);
      auto random_schedule = [&](double center, double spread) {
        std::vector<Deployment> entries;
        for (int j = 0; j < n; ++j) {
          entries.push_back({j, static_cast<int>(rng.UniformInt(8)),
                             center + rng.Uniform(-spread / 2.0, spread / 2.0)});
        }
        return entries;
      };
      std::vector<LipschitzProbe> probes;
      for (int k = 0; k < 1000; ++k) {
        const double center = rng.Uniform(1.0, 10.0);
        probes.push_back({center + rng.Uniform(-0.5, 0.5), random_schedule(center, 1.0)});
      }
      const auto audit = AuditLipschitz(reward, probes);
      if (!audit.consistent) ++audit_failures;
      for (int k = 0; k < 1000; ++k) {
        const auto entries = random_schedule(rng.Uniform(1.0, 10.0), rho);
        const auto report = VerifyGap(reward, entries, rho, audit);
        ++checked;
        const double bound = report.bound * options.gamma_scale;
        if (report.skipped || report.measured_gap > bound) ++violations;
        if (report.bound > 0.0) worst_ratio = std::max(worst_ratio, report.measured_gap / bound);
      }
    }
  }
  CriterionResult r{11, "asynchrony gap bound", false, "", ""};
  r.pass = violations == 0 && audit_failures == 0;
  r.measured = std::to_string(violations) + " violations in " + std::to_string(checked) +
               " schedules, " + std::to_string(audit_failures) +
               " failed Lipschitz audits, max gap/bound " + Num(worst_ratio);
  r.threshold = "0 violations";
  if (options.gamma_scale != 1.0) r.threshold += " (bound scaled by " + Num(options.gamma_scale) + ")";
  return r;
}

// f(empty)=0, a=3, b=3, c=2, ab=5, ac=4, bc=5, abc=6, i.e. a={1,2,6},
// b={2,3,5}, c={1,4} as unit-weight item sets.
inline ValueTable EightSubsetFixture() {
  ValueTable table;
  const GroundElement a{0, 0}, b{1, 0}, c{2, 0};
  table.ground = {a, b, c};
  table.values[{}] = 0.0;
  table.values[{a}] = 3.0;
  table.values[{b}] = 3.0;
  table.values[{c}] = 2.0;
  table.values[{a, b}] = 5.0;
  table.values[{a, c}] = 4.0;
  table.values[{b, c}] = 5.0;
  table.values[{a, b, c}] = 6.0;
  return table;
}

inline CriterionResult StructuralOracles(const AcceptanceOptions&) {
  ExperimentConfig config;
  const CoverageWorld world = MakeWorld(config, 1);
  const SetFunction f = CoverageSetFunction(world);
  // Cameras 0, 1 and 4 share a corner. Each exhaustive pass takes one half of
  // every camera's headings (12 elements); the 8 passes cover all half choices.
  const int cameras[] = {0, 1, 4};
  bool structural = true;
  int passes = 0;
  for (int pick = 0; pick < 8; ++pick) {
    std::vector<GroundElement> ground;
    for (int k = 0; k < 3; ++k) {
      const int first = (pick >> k & 1) ? 4 : 0;
      for (int h = first; h < first + 4; ++h) ground.push_back({cameras[k], h});
    }
    structural = structural && CheckMonotoneSubmodular(f, ground).holds &&
                 CheckSecondOrderSubmodular(f, ground).holds;
    ++passes;
  }

  const SetFunction fixture = TabularInstance(EightSubsetFixture());
  const std::vector<GroundElement> ground = EightSubsetFixture().ground;
  const double kappa = Curvature(fixture, ground).kappa;
  const Assignment joint = Assignment::FromActions(std::vector<int>{0, 0, 0});
  const CommGraph line = LineGraph3();
  const double coins[] = {Coin(fixture, 0, joint, line.in_neighbors(0)),
                          Coin(fixture, 1, joint, line.in_neighbors(1)),
                          Coin(fixture, 2, joint, line.in_neighbors(2))};
  const bool fixture_ok = std::abs(kappa - 2.0 / 3.0) <= 1e-12 && coins[0] == 1.0 &&
                          coins[1] == 0.0 && coins[2] == 1.0;

  CriterionResult r{12, "structural oracles", false, "", ""};
  r.pass = structural && fixture_ok;
  r.measured = std::to_string(passes) + " exhaustive passes " +
               (structural ? "hold" : "FAIL") + "; fixture kappa = " + Num(kappa) +
               ", coin = (" + Num(coins[0]) + ", " + Num(coins[1]) + ", " + Num(coins[2]) + ")";
  r.threshold = "all checks hold; kappa = 2/3, coin = (1, 0, 1)";
  return r;
}

inline CriterionResult DelayStatistics(const AcceptanceOptions&) {
  const auto model = DelayModel::Uniform(10);
  Rng rng = Rng::Stream(16, streams::kDelays);
  double total = 0.0;
  for (int k = 0; k < 100000; ++k) total += model.Sample({0, 1}, k, rng);
  const double mean = total / 100000.0;

  ExperimentConfig config;
  config.dbar = 10;
  RunOptions options;
  options.record_messages = true;
  std::size_t stale = 0;
  std::size_t messages = 0;
  std::string error;
  try {
    const auto run = RunSingle(config, 1, options);
    for (const auto& m : run.messages) {
      ++messages;
      if (m.deliver_at < m.round || m.deliver_at - m.round > config.dbar) ++stale;
    }
  } catch (const std::exception& e) {
    error = e.what();
  }
  CriterionResult r{13, "delay-model statistics", false, "", ""};
  r.pass = std::abs(mean - 5.0) <= 0.1 && stale == 0 && error.empty() && messages > 0;
  r.measured = "mean delay " + Num(mean) + "; " + std::to_string(stale) + " stale of " +
               std::to_string(messages) + " messages" + (error.empty() ? "" : "; " + error);
  r.threshold = "|mean - 5| <= 0.1, 0 stale";
  return r;
}

}  // namespace acceptance

using CriterionFn = std::function<CriterionResult(const AcceptanceOptions&)>;

inline const std::vector<std::pair<int, CriterionFn>>& AcceptanceCriteria() {
  static const std::vector<std::pair<int, CriterionFn>> all = {
      {1, acceptance::SmallDelayParity},    {2, acceptance::LargeDelayAdvantage},
      {3, acceptance::ZeroDelayIdentity},   {4, acceptance::Telescoping},
      {5, acceptance::Unbiasedness},        {6, acceptance::SoftmaxLipschitz},
      {7, acceptance::RegretSublinearity},  {8, acceptance::ApproximationBound},
      {9, acceptance::CoinBound},           {10, acceptance::SynchronousReduction},
      {11, acceptance::AsynchronyGap},      {12, acceptance::StructuralOracles},
      {13, acceptance::DelayStatistics},
  };
  return all;
}

inline void PrintCriterion(std::ostream& out, const CriterionResult& r) {
  out << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.measured
      << " | threshold " << r.threshold << " | " << acceptance::Num(r.seconds) << " s"
      << std::endl;
}

// Runs the selected criteria in order, printing one line each. A criterion
// that throws is reported as a failure carrying the exception text.
inline std::vector<CriterionResult> RunAcceptance(const AcceptanceOptions& options,
                                                  std::ostream& out) {
  std::vector<CriterionResult> results;
  for (const auto& [id, fn] : AcceptanceCriteria()) {
    if (!options.only.empty() && !options.only.contains(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = fn(options);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), "-"};
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    PrintCriterion(out, r);
    results.push_back(std::move(r));
  }
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  out << (failed == 0 ? "ALL PASS" : "FAILED") << ": " << results.size() - failed << "/"
      << results.size() << " criteria" << std::endl;
  return results;
}

inline bool AllPass(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.pass; });
}

}  // namespace dogiu
