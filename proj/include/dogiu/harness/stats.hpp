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
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dogiu/csv.hpp"
#include "dogiu/harness/config.hpp"
#include "dogiu/harness/simulator.hpp"

namespace dogiu {

// Per-round mean over runs with a normal-approximation 95% interval
// (1.96 s / sqrt(n), s the sample standard deviation; 0 when n = 1) and a
// trailing running average of the mean.
struct AggregateStats {
  std::vector<double> mean;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<double> running_avg;

  std::size_t rounds() const { return mean.size(); }
  double ci_half_width(std::size_t t) const { return (ci_high[t] - ci_low[t]) / 2.0; }
  bool operator==(const AggregateStats&) const = default;
};

inline constexpr double kNormalZ95 = 1.96;

inline std::vector<double> RunningAverage(std::span<const double> series, int window) {
  if (window < 1) throw std::invalid_argument("running average window must be >= 1");
  std::vector<double> out(series.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    sum += series[t];
    if (t >= static_cast<std::size_t>(window)) sum -= series[t - static_cast<std::size_t>(window)];
    const auto count = std::min<std::size_t>(t + 1, static_cast<std::size_t>(window));
    out[t] = sum / static_cast<double>(count);
  }
  return out;
}

inline AggregateStats Aggregate(std::span<const RunResult> runs, int window) {
  AggregateStats stats;
  if (runs.empty()) return stats;
  const std::size_t rounds = runs.front().coverage.size();
  for (const auto& run : runs) {
    if (run.coverage.size() != rounds) throw std::invalid_argument("runs differ in length");
  }
  const double n = static_cast<double>(runs.size());
  stats.mean.resize(rounds);
  stats.ci_low.resize(rounds);
  stats.ci_high.resize(rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    double sum = 0.0;
    for (const auto& run : runs) sum += run.coverage[t];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& run : runs) ss += (run.coverage[t] - mean) * (run.coverage[t] - mean);
    const double half =
        runs.size() > 1 ? kNormalZ95 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    stats.mean[t] = mean;
    stats.ci_low[t] = mean - half;
    stats.ci_high[t] = mean + half;
  }
  stats.running_avg = RunningAverage(stats.mean, window);
  return stats;
}

// Average of the running-average curve over the final `last` rounds.
inline double TailMean(const AggregateStats& stats, std::size_t last) {
  if (stats.running_avg.empty()) return 0.0;
  last = std::min(last, stats.running_avg.size());
  double sum = 0.0;
  for (std::size_t t = stats.running_avg.size() - last; t < stats.running_avg.size(); ++t) {
    sum += stats.running_avg[t];
  }
  return sum / static_cast<double>(last);
}

struct MonteCarloResult {
  std::vector<RunResult> runs;
  AggregateStats stats;
};

// Seeds base .. base + runs - 1, reduced in seed order.
inline MonteCarloResult RunMonteCarlo(const ExperimentConfig& config, RunOptions options = {}) {
  config.Validate();
  MonteCarloResult out;
  for (int k = 0; k < config.runs; ++k) {
    out.runs.push_back(RunSingle(config, config.seed + static_cast<std::uint64_t>(k), options));
  }
  out.stats = Aggregate(out.runs, config.smoothing_window);
  return out;
}

inline void WriteStatsCsv(std::ostream& out, const AggregateStats& stats) {
  out << "t,mean,ci_low,ci_high,running_avg\n";
  for (std::size_t t = 0; t < stats.rounds(); ++t) {
    out << (t + 1) << ',' << FormatDouble(stats.mean[t]) << ','
        << FormatDouble(stats.ci_low[t]) << ',' << FormatDouble(stats.ci_high[t]) << ','
        << FormatDouble(stats.running_avg[t]) << '\n';
  }
}

inline void EmitCsv(const AggregateStats& stats, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  WriteStatsCsv(out, stats);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// Inverse of WriteStatsCsv.
inline AggregateStats ReadStatsCsv(std::istream& in) {
  AggregateStats stats;
  std::string line;
  if (!std::getline(in, line) || line != "t,mean,ci_low,ci_high,running_avg") {
    throw std::invalid_argument("stats csv: missing header");
  }
  std::size_t expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cells[5];
    for (auto& cell : cells) {
      if (!std::getline(fields, cell, ',')) throw std::invalid_argument("stats csv: short row");
    }
    if (std::stoul(cells[0]) != expected++) throw std::invalid_argument("stats csv: bad t");
    stats.mean.push_back(ParseDoubleExact(cells[1]));
    stats.ci_low.push_back(ParseDoubleExact(cells[2]));
    stats.ci_high.push_back(ParseDoubleExact(cells[3]));
    stats.running_avg.push_back(ParseDoubleExact(cells[4]));
  }
  return stats;
}

inline void WriteTraceCsv(std::ostream& out, std::span<const TraceRow> rows) {
  out << "round,chosen_action,p_chosen,Z0,batches_applied,M_t_if_instrumented\n";
  for (const auto& row : rows) {
    out << row.round << ',' << row.chosen_action << ',' << FormatDouble(row.p_chosen) << ','
        << (std::isnan(row.z0) ? std::string() : FormatDouble(row.z0)) << ','
        << row.batches_applied << ','
        << (row.max_error ? FormatDouble(*row.max_error) : std::string()) << '\n';
  }
}

}  // namespace dogiu
