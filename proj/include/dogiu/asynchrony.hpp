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
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dogiu/csv.hpp"
#include "dogiu/rng.hpp"

namespace dogiu {

// Per-agent execution times for logical rounds. Agent i runs round t at
// t + offset, offset ~ Uniform[-rho/2, rho/2), so any two agents differ by at
// most rho. Offsets are keyed by (agent, round) and can be queried in any
// order.
class ClockModel {
 public:
  ClockModel() = default;

  ClockModel(double skew_bound, std::uint64_t seed) : rho_(skew_bound), seed_(seed) {
    if (!(rho_ >= 0.0) || !(rho_ < 1.0)) {
      throw std::invalid_argument("skew bound must lie in [0, 1) round");
    }
  }

  double skew_bound() const { return rho_; }

  double Offset(int agent, int round) const {
    if (rho_ == 0.0) return 0.0;
    const double u = HashUniform(seed_, static_cast<std::uint64_t>(agent),
                                 static_cast<std::uint64_t>(round));
    return rho_ * (u - 0.5);
  }

  double ExecutionTime(int agent, int round) const {
    return static_cast<double>(round) + Offset(agent, round);
  }

  std::vector<double> SampleExecutionTimes(int round, int agent_count) const {
    std::vector<double> times(static_cast<std::size_t>(agent_count));
    for (int i = 0; i < agent_count; ++i) {
      times[static_cast<std::size_t>(i)] = ExecutionTime(i, round);
    }
    if (!times.empty()) {
      const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
      if (*hi - *lo > rho_) throw std::logic_error("clock skew bound violated");
    }
    return times;
  }

 private:
  double rho_ = 0.0;
  std::uint64_t seed_ = 0;
};

struct Deployment {
  int agent = 0;
  int action = 0;
  double time = 0.0;
};

// Deployments ordered by time, ties by ascending agent id.
inline void SortSchedule(std::vector<Deployment>& entries) {
  std::sort(entries.begin(), entries.end(), [](const Deployment& a, const Deployment& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.agent < b.agent;
  });
}

class DeploymentSchedule {
 public:
  DeploymentSchedule() = default;
  explicit DeploymentSchedule(std::vector<Deployment> entries)
      : entries_(std::move(entries)) {
    SortSchedule(entries_);
    for (std::size_t k = 1; k < entries_.size(); ++k) {
      for (std::size_t j = 0; j < k; ++j) {
        if (entries_[j].agent == entries_[k].agent) {
          throw std::invalid_argument("schedule has two entries for agent " +
                                      std::to_string(entries_[k].agent));
        }
      }
    }
  }

  std::span<const Deployment> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Deployment> entries_;
};

// F(tau; D) with declared Lipschitz constants in the evaluation time (L_e)
// and in any single deployment time (L_d).
class TimeStampedReward {
 public:
  using Evaluator = std::function<double(double, std::span<const Deployment>)>;

  TimeStampedReward(Evaluator evaluator, double eval_lipschitz, double deploy_lipschitz)
      : evaluator_(std::move(evaluator)),
        eval_lipschitz_(eval_lipschitz),
        deploy_lipschitz_(deploy_lipschitz) {
    if (!evaluator_) throw std::invalid_argument("empty time-stamped reward");
    if (eval_lipschitz_ < 0.0 || deploy_lipschitz_ < 0.0) {
      throw std::invalid_argument("Lipschitz constants must be >= 0");
    }
  }

  double operator()(double tau, std::span<const Deployment> schedule) const {
    if (schedule.empty()) return 0.0;
    return evaluator_(tau, schedule);
  }

  double eval_lipschitz() const { return eval_lipschitz_; }
  double deploy_lipschitz() const { return deploy_lipschitz_; }

 private:
  Evaluator evaluator_;
  double eval_lipschitz_;
  double deploy_lipschitz_;
};

// sum_k [F(tau_k; D_k) - F(tau_k; D_{k-1})] with agents sorted by execution
// time. Consecutive agents sharing a timestamp form one telescoped term
// F(tau; D_last) - F(tau; D_first-1), which is the same sum without the
// intermediate round-off; with a single common timestamp it is exactly F(tau; D).
inline double AsyncGlobalReward(const TimeStampedReward& reward,
                                std::span<const Deployment> round_entries) {
  std::vector<Deployment> order(round_entries.begin(), round_entries.end());
  SortSchedule(order);
  for (std::size_t k = 1; k < order.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (order[j].agent == order[k].agent) {
        throw std::invalid_argument("async reward: duplicate entry for agent " +
                                    std::to_string(order[k].agent));
      }
    }
  }
  const std::span<const Deployment> all(order);
  double total = 0.0;
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    while (end < order.size() && order[end].time == order[begin].time) ++end;
    const double tau = order[begin].time;
    const double after = reward(tau, all.first(end));
    const double before = begin == 0 ? 0.0 : reward(tau, all.first(begin));
    total += after - before;
    begin = end;
  }
  return total;
}

// Gamma_rho = (2 L_e n + L_d n^2) rho.
inline double AsynchronyGapBound(double eval_lipschitz, double deploy_lipschitz,
                                 int agent_count, double rho) {
  if (eval_lipschitz < 0.0 || deploy_lipschitz < 0.0 || agent_count < 0 || rho < 0.0) {
    throw std::invalid_argument("gap bound arguments must be >= 0");
  }
  const double n = agent_count;
  return (2.0 * eval_lipschitz * n + deploy_lipschitz * n * n) * rho;
}

struct LipschitzProbe {
  double tau = 0.0;
  std::vector<Deployment> schedule;
};

struct LipschitzAudit {
  double max_eval_slope = 0.0;
  double max_deploy_slope = 0.0;
  bool consistent = true;
  std::string message;
};

// Central finite differences (step h) in the evaluation time and in each
// deployment time. The declaration is consistent when no measured slope
// exceeds the declared constant by more than `tolerance` (relative).
inline LipschitzAudit AuditLipschitz(const TimeStampedReward& reward,
                                     std::span<const LipschitzProbe> probes,
                                     double step = 1e-4, double tolerance = 0.05) {
  LipschitzAudit audit;
  for (const auto& probe : probes) {
    const double plus = reward(probe.tau + step, probe.schedule);
    const double minus = reward(probe.tau - step, probe.schedule);
    audit.max_eval_slope =
        std::max(audit.max_eval_slope, std::abs(plus - minus) / (2.0 * step));
    std::vector<Deployment> moved = probe.schedule;
    for (std::size_t j = 0; j < moved.size(); ++j) {
      const double original = moved[j].time;
      moved[j].time = original + step;
      const double up = reward(probe.tau, moved);
      moved[j].time = original - step;
      const double down = reward(probe.tau, moved);
      moved[j].time = original;
      audit.max_deploy_slope =
          std::max(audit.max_deploy_slope, std::abs(up - down) / (2.0 * step));
    }
  }
  const double slack = 1.0 + tolerance;
  if (audit.max_eval_slope > reward.eval_lipschitz() * slack) {
    audit.consistent = false;
    audit.message = "evaluation-time slope " + std::to_string(audit.max_eval_slope) +
                    " exceeds declared L_e " + std::to_string(reward.eval_lipschitz());
  } else if (audit.max_deploy_slope > reward.deploy_lipschitz() * slack) {
    audit.consistent = false;
    audit.message = "deployment-time slope " + std::to_string(audit.max_deploy_slope) +
                    " exceeds declared L_d " + std::to_string(reward.deploy_lipschitz());
  }
  return audit;
}

struct GapReport {
  double async_reward = 0.0;
  double sync_reward = 0.0;
  double measured_gap = 0.0;
  double bound = 0.0;
  bool holds = false;
  bool skipped = false;  // Lipschitz declaration failed its audit
  std::string message;
};

// Compares the asynchronous reward of one round against the synchronous one
// with every action deployed and evaluated at tau_bar = max_i tau_i.
inline GapReport VerifyGap(const TimeStampedReward& reward,
                           std::span<const Deployment> round_entries, double rho,
                           const LipschitzAudit& audit) {
  GapReport report;
  if (!audit.consistent) {
    report.skipped = true;
    report.message = "Lipschitz audit failed: " + audit.message;
    return report;
  }
  if (round_entries.empty()) {
    report.holds = true;
    return report;
  }
  double lo = round_entries.front().time;
  double hi = lo;
  for (const auto& e : round_entries) {
    lo = std::min(lo, e.time);
    hi = std::max(hi, e.time);
  }
  if (hi - lo > rho) {
    throw std::invalid_argument("execution times spread beyond the skew bound");
  }
  std::vector<Deployment> synced(round_entries.begin(), round_entries.end());
  for (auto& e : synced) e.time = hi;
  report.async_reward = AsyncGlobalReward(reward, round_entries);
  report.sync_reward = reward(hi, synced);
  report.measured_gap = std::abs(report.async_reward - report.sync_reward);
  report.bound = AsynchronyGapBound(reward.eval_lipschitz(), reward.deploy_lipschitz(),
                                    static_cast<int>(round_entries.size()), rho);
  report.holds = report.measured_gap <= report.bound;
  return report;
}

struct GapAuditRow {
  int round = 0;
  double measured_gap = 0.0;
  double bound = 0.0;
  bool holds = false;
};

inline void WriteGapCsv(std::ostream& out, std::span<const GapAuditRow> rows) {
  out << "round,measured_gap,bound,holds\n";
  for (const auto& row : rows) {
    out << row.round << ',';
    WriteDouble(out, row.measured_gap);
    out << ',';
    WriteDouble(out, row.bound);
    out << ',' << (row.holds ? 1 : 0) << '\n';
  }
}

}  // namespace dogiu
