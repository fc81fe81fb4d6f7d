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


// Command-line driver: run, sweep, accept, analyze.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dogiu/dogiu.hpp"

namespace fs = std::filesystem;
using namespace dogiu;

namespace {

struct Overrides {
  std::string config_path;
  std::string algo;
  std::optional<int> dbar;
  std::optional<double> rho;
  std::optional<int> seeds;
};

void AddOverrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--rho", o.rho, "clock skew bound");
  cmd->add_option("--seeds", o.seeds, "Monte Carlo runs (seeds base..base+n-1)");
}

ExperimentConfig Resolve(const Overrides& o) {
  ExperimentConfig config = o.config_path.empty() ? ExperimentConfig{} : LoadConfig(o.config_path);
  if (!o.algo.empty()) config.algorithm = ParseAlgorithm(o.algo);
  if (o.dbar) config.dbar = *o.dbar;
  if (o.rho) config.rho = *o.rho;
  if (o.seeds) config.runs = *o.seeds;
  config.Validate();
  return config;
}

std::string StatsName(const ExperimentConfig& c) {
  return ToString(c.algorithm) + "_dbar" + std::to_string(c.dbar) + ".csv";
}

void Report(const ExperimentConfig& c, const MonteCarloResult& mc, const fs::path& path) {
  const std::size_t tail = std::min<std::size_t>(500, mc.stats.rounds());
  std::cout << ToString(c.algorithm) << " dbar=" << c.dbar << " rho=" << c.rho
            << " runs=" << c.runs << " tail-" << tail
            << " running avg=" << FormatDouble(TailMean(mc.stats, tail)) << " -> "
            << path.string() << "\n";
}

void WriteScene(const ExperimentConfig& config, const RunResult& run, const fs::path& path) {
  CoverageWorld world = MakeWorld(config, run.seed);
  Rng rng = Rng::Stream(run.seed, streams::kTargets);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  WriteSceneHeader(out);
  for (std::size_t t = 0; t < run.actions.size(); ++t) {
    world.targets.Step(static_cast<int>(t) + 1, rng);
    WriteSceneRows(out, static_cast<int>(t) + 1, world, run.actions[t]);
  }
}

int RunCommand(const Overrides& o, const std::string& out_dir, bool trace, bool scene) {
  const ExperimentConfig config = Resolve(o);
  fs::create_directories(out_dir);
  const RunOptions options{trace, trace, false, false};
  const auto mc = RunMonteCarlo(config, options);
  const fs::path stats_path = fs::path(out_dir) / StatsName(config);
  EmitCsv(mc.stats, stats_path);
  {
    std::ofstream cfg(fs::path(out_dir) / "config.txt");
    WriteConfig(cfg, config);
  }
  if (trace) {
    const auto& first = mc.runs.front();
    for (std::size_t i = 0; i < first.traces.size(); ++i) {
      std::ofstream out(fs::path(out_dir) / ("trace_seed" + std::to_string(first.seed) +
                                             "_agent" + std::to_string(i) + ".csv"));
      WriteTraceCsv(out, first.traces[i]);
    }
  }
  if (scene) {
    const auto& first = mc.runs.front();
    WriteScene(config, first,
               fs::path(out_dir) / ("scene_seed" + std::to_string(first.seed) + ".csv"));
  }
  Report(config, mc, stats_path);
  return 0;
}

int SweepCommand(const Overrides& o, const std::vector<int>& dbars,
                 const std::vector<std::string>& algos, const std::string& out_dir) {
  ExperimentConfig base = Resolve(o);
  fs::create_directories(out_dir);
  for (int dbar : dbars) {
    for (const auto& name : algos) {
      ExperimentConfig config = base;
      config.dbar = dbar;
      config.algorithm = ParseAlgorithm(name);
      config.Validate();
      const auto mc = RunMonteCarlo(config);
      const fs::path path = fs::path(out_dir) / StatsName(config);
      EmitCsv(mc.stats, path);
      Report(config, mc, path);
    }
  }
  return 0;
}

int AcceptCommand(const std::vector<int>& only, int seeds, double gamma_scale) {
  AcceptanceOptions options;
  options.only.insert(only.begin(), only.end());
  options.seeds = seeds;
  options.gamma_scale = gamma_scale;
  return AllPass(RunAcceptance(options, std::cout)) ? 0 : 1;
}

std::vector<int> ParseActions(const std::string& text) {
  std::vector<int> actions;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) actions.push_back(std::stoi(item));
  return actions;
}

int AnalyzeCommand(const std::string& path, const std::string& joint_text,
                   const std::string& edges_text) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  const ValueTable table = ParseValueTable(in);
  const SetFunction f = TabularInstance(table);
  const auto& ground = table.ground;
  std::cout << "ground elements: " << ground.size() << " " << ToString(ground) << "\n";
  std::cout << "f(ground) = " << FormatDouble(f(ground)) << "\n";

  const auto curvature = Curvature(f, ground);
  std::cout << "curvature = " << FormatDouble(curvature.kappa);
  if (!curvature.zero_singletons.empty()) {
    std::cout << " (zero singletons skipped: " << ToString(curvature.zero_singletons) << ")";
  }
  std::cout << "\n";

  auto print_check = [](const char* name, const StructureReport& report) {
    std::cout << name << ": " << (report.holds ? "holds" : "VIOLATED");
    if (report.witness) {
      const auto& w = *report.witness;
      std::cout << " [" << w.violated << " A=" << ToString(w.a) << " B=" << ToString(w.b);
      if (!w.c.empty()) std::cout << " C=" << ToString(w.c);
      if (w.s) std::cout << " s=" << ToString(*w.s);
      std::cout << " lhs=" << FormatDouble(w.lhs) << " rhs=" << FormatDouble(w.rhs) << "]";
    }
    std::cout << "\n";
  };
  print_check("monotone submodular", CheckMonotoneSubmodular(f, ground));
  print_check("second-order submodular", CheckSecondOrderSubmodular(f, ground));

  // Per-agent action counts; brute force needs actions 0..k-1 for agents 0..n-1.
  std::map<int, int> counts;
  for (const auto& e : ground) counts[e.agent] = std::max(counts[e.agent], e.action + 1);
  const bool product = !counts.empty() && counts.rbegin()->first + 1 ==
                                              static_cast<int>(counts.size());
  std::size_t expected = 0;
  for (const auto& [agent, k] : counts) expected += static_cast<std::size_t>(k);
  if (!product || expected != ground.size()) {
    std::cout << "optimum: skipped (ground set is not a full agent x action product)\n";
    return 0;
  }
  std::vector<int> action_counts;
  for (const auto& [agent, k] : counts) action_counts.push_back(k);
  const auto optimum = BruteForceOptimum(f, action_counts);
  std::cout << "optimum: " << ToString(optimum.assignment.elements()) << " value "
            << FormatDouble(optimum.value) << "\n";

  const int n = static_cast<int>(action_counts.size());
  const Assignment joint = joint_text.empty() ? optimum.assignment
                                              : Assignment::FromActions(ParseActions(joint_text));
  CommGraph graph = CommGraph::Complete(n);
  if (!edges_text.empty()) {
    ExperimentConfig scratch;
    scratch.graph_edges = edges_text;
    graph = CommGraph::FromEdges(n, scratch.Edges());
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = Coin(f, i, joint, graph.in_neighbors(i));
    total += c;
    std::cout << "coin[" << i << "] = " << FormatDouble(c) << "\n";
  }
  std::cout << "coin total at " << ToString(joint.elements()) << " = " << FormatDouble(total)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dogiu: distributed online greedy with intermediate updates"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string run_out = "out";
  bool trace = false;
  bool scene = false;
  auto* run = app.add_subcommand("run", "Monte Carlo run of one algorithm");
  AddOverrides(run, run_o);
  run->add_option("--algo", run_o.algo, "dog-iu or dog")->check(CLI::IsMember({"dog-iu", "dog"}));
  run->add_option("--dbar", run_o.dbar, "delay bound");
  run->add_option("--out", run_out, "output directory");
  run->add_flag("--trace", trace, "per-agent trace CSVs for the first seed");
  run->add_flag("--scene", scene, "scene CSV for the first seed");

  Overrides sweep_o;
  std::string sweep_out = "out";
  std::vector<int> dbars = {1, 5, 10, 15, 20, 30};
  std::vector<std::string> algos = {"dog-iu", "dog"};
  auto* sweep = app.add_subcommand("sweep", "one CSV per delay bound per algorithm");
  AddOverrides(sweep, sweep_o);
  sweep->add_option("--dbar", dbars, "delay bounds")->delimiter(',');
  sweep->add_option("--algo", algos, "algorithms")->delimiter(',')
      ->check(CLI::IsMember({"dog-iu", "dog"}));
  sweep->add_option("--out", sweep_out, "output directory");

  std::vector<int> only;
  int accept_seeds = 20;
  double gamma_scale = 1.0;
  auto* accept = app.add_subcommand("accept", "run the acceptance suite");
  accept->add_option("--only", only, "criterion ids")->delimiter(',');
  accept->add_option("--seeds", accept_seeds, "seeds per statistical criterion");
  accept->add_option("--corrupt-gamma", gamma_scale,
                     "scale the asynchrony gap bound (fault injection)");

  std::string instance;
  std::string joint;
  std::string edges;
  auto* analyze = app.add_subcommand("analyze", "structure of a tabulated set function");
  analyze->add_option("--instance", instance, "value table file")->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--joint", joint, "joint action for coin, e.g. 0,2,1 (default: optimum)");
  analyze->add_option("--edges", edges, "communication edges 'from>to ...' (default: complete)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return RunCommand(run_o, run_out, trace, scene);
    if (*sweep) return SweepCommand(sweep_o, dbars, algos, sweep_out);
    if (*accept) return AcceptCommand(only, accept_seeds, gamma_scale);
    if (*analyze) return AnalyzeCommand(instance, joint, edges);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
