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
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dogiu/rng.hpp"

namespace dogiu {

inline std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - top);
    total += out[k];
  }
  for (double& p : out) p /= total;
  return out;
}

// c * sqrt(ln|V| / ((|V| + dbar) T)); the rate both learners use.
inline double LearningRate(int action_count, int delay_bound, int horizon,
                           double scale = 1.0) {
  if (action_count < 2) {
    throw std::invalid_argument("learning rate needs at least two actions");
  }
  if (delay_bound < 0 || horizon < 1 || !(scale > 0.0)) {
    throw std::invalid_argument(
        "learning rate needs delay bound >= 0, horizon >= 1, scale > 0");
  }
  const double k = action_count;
  return scale * std::sqrt(std::log(k) / ((k + delay_bound) * horizon));
}

// sqrt(ln|V| / (|V| T (1 + Mbar/4))). Needs the average maximum cumulative
// error, which is only known after the fact, so this is for instrumentation.
inline double TunedLearningRate(int action_count, int horizon,
                                double mean_max_error) {
  if (action_count < 2 || horizon < 1 || mean_max_error < 0.0) {
    throw std::invalid_argument("tuned learning rate: invalid arguments");
  }
  const double k = action_count;
  return std::sqrt(std::log(k) / (k * horizon * (1.0 + mean_max_error / 4.0)));
}

// 1 - 1(action == chosen) (1 - x) / p
inline double ImportanceWeightedEstimate(int action, int chosen, double prob,
                                         double x) {
  if (!(prob > 0.0) || prob > 1.0) {
    throw std::invalid_argument("importance weight needs p in (0, 1]");
  }
  if (action != chosen) return 1.0;
  return 1.0 - (1.0 - x) / prob;
}

struct NeighborArrival {
  int sender = 0;
  int action = 0;
};

// Arrivals of one tick grouped by origin round.
using Arrivals = std::map<int, std::vector<NeighborArrival>>;

// Reward of playing own_action in `round` given (actual or estimated) neighbor
// actions. Expected in [0, 1]; the learner clamps.
using RewardModel = std::function<double(
    int round, int own_action, const std::map<int, int>& neighbor_actions)>;

struct PendingRound {
  int round = 0;
  int chosen = 0;
  double prob = 1.0;
  std::vector<int> received;  // sorted
  std::vector<int> missing;   // sorted
  std::map<int, int> known_actions;
  // Last estimate folded into the weights; NaN while nothing has been applied.
  double estimate = std::numeric_limits<double>::quiet_NaN();
  int batches_seen = 0;

  bool complete() const { return missing.empty(); }
};

enum class UpdateRule {
  kIntermediate,  // DOG-IU: update on every batch, correct later
  kDeferred,      // DOG: one update when the round's last action arrives
};

struct TickSummary {
  double initial_estimate = std::numeric_limits<double>::quiet_NaN();
  int batches_applied = 0;
  int rounds_retired = 0;
};

struct CumulativeError {
  std::vector<double> per_action;
  double max_abs = 0.0;
};

// One agent's learner: log-domain exponential weights over its actions plus
// the ledger of rounds whose neighbor actions are still in flight.
class LearnerState {
 public:
  LearnerState(int action_count, double learning_rate, std::vector<int> neighbors,
               int delay_bound, UpdateRule rule = UpdateRule::kIntermediate,
               int default_action = 0)
      : log_weights_(static_cast<std::size_t>(action_count), 0.0),
        learning_rate_(learning_rate),
        neighbors_(std::move(neighbors)),
        delay_bound_(delay_bound),
        rule_(rule),
        default_action_(default_action) {
    if (action_count < 1) throw std::invalid_argument("learner needs actions");
    if (!(learning_rate_ >= 0.0) || !std::isfinite(learning_rate_)) {
      throw std::invalid_argument("learning rate must be finite and >= 0");
    }
    if (delay_bound_ < 0) throw std::invalid_argument("delay bound must be >= 0");
    std::sort(neighbors_.begin(), neighbors_.end());
    if (std::adjacent_find(neighbors_.begin(), neighbors_.end()) !=
        neighbors_.end()) {
      throw std::invalid_argument("duplicate neighbor");
    }
  }

  int action_count() const { return static_cast<int>(log_weights_.size()); }
  double learning_rate() const { return learning_rate_; }
  int delay_bound() const { return delay_bound_; }
  UpdateRule rule() const { return rule_; }
  std::span<const int> neighbors() const { return neighbors_; }
  std::span<const double> log_weights() const { return log_weights_; }
  const std::map<int, PendingRound>& pending() const { return pending_; }

  std::vector<double> Distribution() const { return Softmax(log_weights_); }

  // Draw from softmax(log_weights); returns the action and its exact mass.
  std::pair<int, double> Sample(Rng& rng) const {
    const auto p = Distribution();
    const double u = rng.Uniform();
    double cumulative = 0.0;
    int last_positive = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] <= 0.0) continue;
      last_positive = static_cast<int>(k);
      cumulative += p[k];
      if (u < cumulative) return {static_cast<int>(k), p[k]};
    }
    return {last_positive, p[static_cast<std::size_t>(last_positive)]};
  }

  // Registers round t as unresolved with every neighbor missing.
  PendingRound& OpenRound(int t, int action, double prob) {
    if (action < 0 || action >= action_count()) {
      throw std::out_of_range("action " + std::to_string(action) + " out of range");
    }
    if (!(prob > 0.0) || prob > 1.0) {
      throw std::invalid_argument("sampling probability must be in (0, 1]");
    }
    PendingRound round;
    round.round = t;
    round.chosen = action;
    round.prob = prob;
    round.missing = neighbors_;
    auto [it, inserted] = pending_.emplace(t, std::move(round));
    if (!inserted) {
      throw std::invalid_argument("round " + std::to_string(t) + " already open");
    }
    return it->second;
  }

  // eta * rhat_a(Z0) for every a, applied to the weights.
  std::vector<double> InitialUpdate(int t, double z0) {
    PendingRound& round = Pending(t);
    z0 = Clamp01(z0);
    auto delta = InitialIncrements(round, z0);
    round.estimate = z0;
    Apply(delta);
    return delta;
  }

  // eta * [rhat_a(Z_new) - rhat_a(Z_prev)]; nonzero only at the chosen action.
  std::vector<double> CorrectionUpdate(int s, double z_new, double z_prev) const {
    auto it = pending_.find(s);
    if (it == pending_.end()) {
      throw std::out_of_range("no unresolved round " + std::to_string(s));
    }
    return CorrectionIncrements(it->second, Clamp01(z_new), Clamp01(z_prev));
  }

  // Folds one batch of round-s neighbor actions into the learner and applies
  // the resulting increment immediately.
  void IngestBatch(int s, std::span<const NeighborArrival> arrivals,
                   const RewardModel& model) {
    if (arrivals.empty()) {
      Pending(s);
      return;
    }
    std::vector<double> delta(log_weights_.size(), 0.0);
    Remember(s, arrivals);
    Absorb(s, arrivals, model, delta);
    Apply(delta);
    RetireComplete();
  }

  // One tick: own round t was played with (action, prob); `arrivals` holds
  // every neighbor message delivered this tick. All increments of the tick
  // are summed and applied once; past rounds are processed in ascending order
  // and the new round's initial estimate already includes same-tick arrivals.
  TickSummary Step(int t, int action, double prob, const Arrivals& arrivals,
                   const RewardModel& model) {
    TickSummary summary;
    for (const auto& [s, batch] : arrivals) Remember(s, batch);

    PendingRound& current = OpenRound(t, action, prob);
    std::vector<double> delta(log_weights_.size(), 0.0);
    for (const auto& [s, batch] : arrivals) {
      if (batch.empty()) continue;
      if (s > t) {
        throw std::invalid_argument("arrival from future round " + std::to_string(s));
      }
      if (s == t) {
        MoveArrivals(current, batch);
        continue;
      }
      Absorb(s, batch, model, delta);
      ++summary.batches_applied;
    }

    if (rule_ == UpdateRule::kIntermediate) {
      const double z0 = Clamp01(model(t, action, EstimatedActions(current)));
      const auto initial = InitialIncrements(current, z0);
      for (std::size_t a = 0; a < delta.size(); ++a) delta[a] += initial[a];
      current.estimate = z0;
      summary.initial_estimate = z0;
    } else if (current.complete()) {
      const double z = Clamp01(model(t, action, current.known_actions));
      const auto full = InitialIncrements(current, z);
      for (std::size_t a = 0; a < delta.size(); ++a) delta[a] += full[a];
      current.estimate = z;
    }
    if (arrivals.contains(t) && !arrivals.at(t).empty()) ++summary.batches_applied;

    Apply(delta);
    summary.rounds_retired = RetireComplete();
    for (const auto& [s, round] : pending_) {
      if (s < t - delay_bound_) {
        throw std::logic_error("round " + std::to_string(s) +
                               " still unresolved past the delay bound at tick " +
                               std::to_string(t));
      }
    }
    return summary;
  }

  // eps_a = sum over unresolved rounds of rhat_a(Z_s) - rhat_a(truth_s).
  // Resolved rounds contribute zero because their estimate is the truth.
  CumulativeError CumulativeErrorAgainst(const std::map<int, double>& truth) const {
    if (rule_ != UpdateRule::kIntermediate) {
      throw std::logic_error("cumulative error is defined for intermediate updates");
    }
    CumulativeError out;
    out.per_action.assign(log_weights_.size(), 0.0);
    for (const auto& [s, round] : pending_) {
      auto it = truth.find(s);
      if (it == truth.end()) {
        throw std::out_of_range("no true reward recorded for round " +
                                std::to_string(s));
      }
      if (std::isnan(round.estimate)) continue;
      for (int a = 0; a < action_count(); ++a) {
        out.per_action[static_cast<std::size_t>(a)] +=
            ImportanceWeightedEstimate(a, round.chosen, round.prob, round.estimate) -
            ImportanceWeightedEstimate(a, round.chosen, round.prob,
                                       Clamp01(it->second));
      }
    }
    for (double e : out.per_action) out.max_abs = std::max(out.max_abs, std::abs(e));
    return out;
  }

  // Largest |eps_a| possible given the recorded draws: rewards live in [0, 1],
  // so each unresolved round can be off by at most 1/p at its chosen action.
  double CumulativeErrorCeiling() const {
    std::vector<double> ceiling(log_weights_.size(), 0.0);
    for (const auto& [s, round] : pending_) {
      ceiling[static_cast<std::size_t>(round.chosen)] += 1.0 / round.prob;
    }
    return ceiling.empty() ? 0.0 : *std::max_element(ceiling.begin(), ceiling.end());
  }

  // Neighbor -> last action known for it (any round), or the default.
  int LastKnownAction(int neighbor) const {
    auto it = last_known_.find(neighbor);
    return it == last_known_.end() ? default_action_ : it->second.second;
  }

  void ApplyIncrements(std::span<const double> delta) { Apply(delta); }

 private:
  static double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

  PendingRound& Pending(int s) {
    auto it = pending_.find(s);
    if (it == pending_.end()) {
      throw std::out_of_range("no unresolved round " + std::to_string(s));
    }
    return it->second;
  }

  std::vector<double> InitialIncrements(const PendingRound& round, double z) const {
    std::vector<double> delta(log_weights_.size());
    for (int a = 0; a < action_count(); ++a) {
      delta[static_cast<std::size_t>(a)] =
          learning_rate_ * ImportanceWeightedEstimate(a, round.chosen, round.prob, z);
    }
    return delta;
  }

  std::vector<double> CorrectionIncrements(const PendingRound& round, double z_new,
                                           double z_prev) const {
    std::vector<double> delta(log_weights_.size());
    for (int a = 0; a < action_count(); ++a) {
      delta[static_cast<std::size_t>(a)] =
          learning_rate_ *
          (ImportanceWeightedEstimate(a, round.chosen, round.prob, z_new) -
           ImportanceWeightedEstimate(a, round.chosen, round.prob, z_prev));
    }
    return delta;
  }

  void Remember(int s, std::span<const NeighborArrival> batch) {
    for (const auto& msg : batch) {
      auto [it, inserted] = last_known_.try_emplace(msg.sender, s, msg.action);
      if (!inserted && it->second.first <= s) it->second = {s, msg.action};
    }
  }

  static void MoveArrivals(PendingRound& round, std::span<const NeighborArrival> batch) {
    for (const auto& msg : batch) {
      auto it = std::lower_bound(round.missing.begin(), round.missing.end(), msg.sender);
      if (it == round.missing.end() || *it != msg.sender) {
        if (std::binary_search(round.received.begin(), round.received.end(),
                               msg.sender)) {
          throw std::invalid_argument(
              "round " + std::to_string(round.round) + ": neighbor " +
              std::to_string(msg.sender) + " already received");
        }
        throw std::invalid_argument("round " + std::to_string(round.round) +
                                    ": sender " + std::to_string(msg.sender) +
                                    " is not a neighbor");
      }
      round.missing.erase(it);
      round.received.insert(
          std::lower_bound(round.received.begin(), round.received.end(), msg.sender),
          msg.sender);
      round.known_actions[msg.sender] = msg.action;
    }
    ++round.batches_seen;
  }

  std::map<int, int> EstimatedActions(const PendingRound& round) const {
    std::map<int, int> actions = round.known_actions;
    for (int j : round.missing) actions[j] = LastKnownAction(j);
    return actions;
  }

  void Absorb(int s, std::span<const NeighborArrival> batch, const RewardModel& model,
              std::vector<double>& delta) {
    PendingRound& round = Pending(s);
    if (rule_ == UpdateRule::kIntermediate && std::isnan(round.estimate)) {
      throw std::logic_error("round " + std::to_string(s) +
                             " has no initial update to correct");
    }
    MoveArrivals(round, batch);
    if (rule_ == UpdateRule::kIntermediate) {
      const double z = Clamp01(model(s, round.chosen, EstimatedActions(round)));
      const auto correction = CorrectionIncrements(round, z, round.estimate);
      for (std::size_t a = 0; a < delta.size(); ++a) delta[a] += correction[a];
      round.estimate = z;
    } else if (round.complete()) {
      const double z = Clamp01(model(s, round.chosen, round.known_actions));
      const auto full = InitialIncrements(round, z);
      for (std::size_t a = 0; a < delta.size(); ++a) delta[a] += full[a];
      round.estimate = z;
    }
  }

  void Apply(std::span<const double> delta) {
    if (delta.size() != log_weights_.size()) {
      throw std::invalid_argument("increment vector has the wrong length");
    }
    for (std::size_t a = 0; a < delta.size(); ++a) log_weights_[a] += delta[a];
    const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
    for (double& w : log_weights_) w -= top;
  }

  int RetireComplete() {
    int retired = 0;
    for (auto it = pending_.begin(); it != pending_.end();) {
      if (it->second.complete() && !std::isnan(it->second.estimate)) {
        it = pending_.erase(it);
        ++retired;
      } else {
        ++it;
      }
    }
    return retired;
  }

  std::vector<double> log_weights_;
  double learning_rate_;
  std::vector<int> neighbors_;
  int delay_bound_;
  UpdateRule rule_;
  int default_action_;
  std::map<int, PendingRound> pending_;
  std::map<int, std::pair<int, int>> last_known_;  // neighbor -> (round, action)
};

// max_a sum_t table[t][a] - sum_t table[t][plays[t]].
inline double StaticRegret(std::span<const int> plays,
                           const std::vector<std::vector<double>>& table) {
  if (plays.size() != table.size()) {
    throw std::invalid_argument("regret: plays and reward table differ in length");
  }
  if (table.empty()) return 0.0;
  const std::size_t actions = table.front().size();
  std::vector<double> totals(actions, 0.0);
  double realized = 0.0;
  for (std::size_t t = 0; t < table.size(); ++t) {
    if (table[t].size() != actions) {
      throw std::invalid_argument("regret: ragged reward table at round " +
                                  std::to_string(t));
    }
    const auto played = static_cast<std::size_t>(plays[t]);
    if (played >= actions) throw std::out_of_range("regret: play out of range");
    for (std::size_t a = 0; a < actions; ++a) totals[a] += table[t][a];
    realized += table[t][played];
  }
  return *std::max_element(totals.begin(), totals.end()) - realized;
}

// Per-round realized reward and (optionally instrumented) M_t.
struct RegretLedger {
  std::vector<double> realized;
  std::vector<double> max_error;

  void Record(double reward, double m_t) {
    realized.push_back(reward);
    max_error.push_back(m_t);
  }
  std::size_t rounds() const { return realized.size(); }
};

}  // namespace dogiu
