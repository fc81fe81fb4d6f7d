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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dogiu/csv.hpp"

namespace dogiu {

enum class Algorithm { kDogIu, kDog };

inline std::string ToString(Algorithm a) { return a == Algorithm::kDogIu ? "dog-iu" : "dog"; }

inline Algorithm ParseAlgorithm(const std::string& text) {
  if (text == "dog-iu") return Algorithm::kDogIu;
  if (text == "dog") return Algorithm::kDog;
  throw std::invalid_argument("algorithm: expected 'dog-iu' or 'dog', got '" + text + "'");
}

// Every knob of one experiment. Defaults reproduce the 16-camera monitoring
// setup (4x4 grid, 8 headings, 80 targets in 8 clusters, c = 14, T = 2000).
struct ExperimentConfig {
  int horizon = 2000;
  Algorithm algorithm = Algorithm::kDogIu;
  std::string graph = "grid4";  // grid4 | edges
  std::string graph_edges;      // "0>1 1>0 ..." when graph = edges
  int grid_rows = 4;
  int grid_cols = 4;
  std::string delay_kind = "uniform";  // constant | uniform | trace
  int dbar = 10;
  std::string delay_trace;  // csv path when delay_kind = trace
  double rho = 0.0;
  bool skew_delivery = false;
  double lr_scale = 14.0;
  int headings = 8;
  double fov_half_angle_deg = 30.0;
  double sensing_range = 20.0;
  double workspace_width = 100.0;
  double workspace_height = 100.0;
  int targets = 80;
  int clusters = 8;
  double target_speed = 1.0;
  double noise_sigma = 0.005;
  int resample_period = 30;
  double cluster_spread = 3.0;
  double normalization_cap = 0.0;  // 0 = derive from a pilot rollout
  int pilot_steps = 200;
  double pilot_quantile = 0.99;  // 1 = pilot maximum
  int default_action = 0;
  int runs = 20;
  std::uint64_t seed = 1;
  int smoothing_window = 50;

  int agent_count() const { return grid_rows * grid_cols; }
  double fov_half_angle() const { return fov_half_angle_deg * std::numbers::pi / 180.0; }

  // Throws std::invalid_argument naming the first bad field.
  void Validate() const {
    auto require = [](bool ok, const char* field, const std::string& why) {
      if (!ok) throw std::invalid_argument(std::string(field) + ": " + why);
    };
    require(horizon >= 1, "horizon", "must be >= 1");
    require(graph == "grid4" || graph == "edges", "graph", "expected grid4 or edges");
    require(grid_rows >= 1, "grid_rows", "must be >= 1");
    require(grid_cols >= 1, "grid_cols", "must be >= 1");
    require(graph != "edges" || !graph_edges.empty() || agent_count() == 1, "graph_edges",
            "required when graph = edges");
    require(delay_kind == "constant" || delay_kind == "uniform" || delay_kind == "trace",
            "delay_kind", "expected constant, uniform or trace");
    require(dbar >= 0, "dbar", "must be >= 0");
    require(delay_kind != "trace" || !delay_trace.empty(), "delay_trace",
            "required when delay_kind = trace");
    require(rho >= 0.0 && rho < 1.0, "rho", "must lie in [0, 1)");
    require(lr_scale > 0.0, "lr_scale", "must be > 0");
    require(headings >= 2, "headings", "must be >= 2");
    require(fov_half_angle_deg > 0.0 && fov_half_angle_deg < 90.0, "fov_half_angle_deg",
            "must lie in (0, 90)");
    require(sensing_range > 0.0, "sensing_range", "must be > 0");
    require(workspace_width > 0.0, "workspace_width", "must be > 0");
    require(workspace_height > 0.0, "workspace_height", "must be > 0");
    require(targets >= 0, "targets", "must be >= 0");
    require(clusters >= 1, "clusters", "must be >= 1");
    require(target_speed >= 0.0, "target_speed", "must be >= 0");
    require(noise_sigma >= 0.0, "noise_sigma", "must be >= 0");
    require(resample_period >= 1, "resample_period", "must be >= 1");
    require(cluster_spread >= 0.0, "cluster_spread", "must be >= 0");
    require(normalization_cap >= 0.0, "normalization_cap", "must be >= 0");
    require(pilot_steps >= 0, "pilot_steps", "must be >= 0");
    require(pilot_quantile > 0.0 && pilot_quantile <= 1.0, "pilot_quantile", "must be in (0, 1]");
    require(default_action >= 0 && default_action < headings, "default_action",
            "must index a heading");
    require(runs >= 1, "runs", "must be >= 1");
    require(smoothing_window >= 1, "smoothing_window", "must be >= 1");
  }

  // (sender, recipient) pairs parsed from graph_edges.
  std::vector<std::pair<int, int>> Edges() const {
    std::vector<std::pair<int, int>> edges;
    std::istringstream in(graph_edges);
    std::string token;
    while (in >> token) {
      const auto arrow = token.find('>');
      if (arrow == std::string::npos) {
        throw std::invalid_argument("graph_edges: expected 'from>to', got '" + token + "'");
      }
      edges.emplace_back(std::stoi(token.substr(0, arrow)), std::stoi(token.substr(arrow + 1)));
    }
    return edges;
  }

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

// Field table shared by the reader and the writer, in file order.
struct ConfigField {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

inline int ToInt(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw std::invalid_argument(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

inline double ToDouble(const std::string& key, const std::string& value) {
  try {
    return ParseDoubleExact(value);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(key + ": expected a number, got '" + value + "'");
  }
}

inline bool ToBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + value + "'");
}

#define DOGIU_INT_FIELD(name)                                              \
  ConfigField {                                                            \
    #name, [](const ExperimentConfig& c) { return std::to_string(c.name); }, \
        [](ExperimentConfig& c, const std::string& v) { c.name = ToInt(#name, v); } \
  }
#define DOGIU_DOUBLE_FIELD(name)                                           \
  ConfigField {                                                            \
    #name, [](const ExperimentConfig& c) { return FormatDouble(c.name); }, \
        [](ExperimentConfig& c, const std::string& v) { c.name = ToDouble(#name, v); } \
  }
#define DOGIU_STRING_FIELD(name)                                           \
  ConfigField {                                                            \
    #name, [](const ExperimentConfig& c) { return c.name; },               \
        [](ExperimentConfig& c, const std::string& v) { c.name = v; }      \
  }

inline const std::vector<ConfigField>& ConfigFields() {
  static const std::vector<ConfigField> fields = {
      DOGIU_INT_FIELD(horizon),
      ConfigField{"algorithm",
                  [](const ExperimentConfig& c) { return ToString(c.algorithm); },
                  [](ExperimentConfig& c, const std::string& v) {
                    c.algorithm = ParseAlgorithm(v);
                  }},
      DOGIU_STRING_FIELD(graph),
      DOGIU_STRING_FIELD(graph_edges),
      DOGIU_INT_FIELD(grid_rows),
      DOGIU_INT_FIELD(grid_cols),
      DOGIU_STRING_FIELD(delay_kind),
      DOGIU_INT_FIELD(dbar),
      DOGIU_STRING_FIELD(delay_trace),
      DOGIU_DOUBLE_FIELD(rho),
      ConfigField{"skew_delivery",
                  [](const ExperimentConfig& c) {
                    return std::string(c.skew_delivery ? "true" : "false");
                  },
                  [](ExperimentConfig& c, const std::string& v) {
                    c.skew_delivery = ToBool("skew_delivery", v);
                  }},
      DOGIU_DOUBLE_FIELD(lr_scale),
      DOGIU_INT_FIELD(headings),
      DOGIU_DOUBLE_FIELD(fov_half_angle_deg),
      DOGIU_DOUBLE_FIELD(sensing_range),
      DOGIU_DOUBLE_FIELD(workspace_width),
      DOGIU_DOUBLE_FIELD(workspace_height),
      DOGIU_INT_FIELD(targets),
      DOGIU_INT_FIELD(clusters),
      DOGIU_DOUBLE_FIELD(target_speed),
      DOGIU_DOUBLE_FIELD(noise_sigma),
      DOGIU_INT_FIELD(resample_period),
      DOGIU_DOUBLE_FIELD(cluster_spread),
      DOGIU_DOUBLE_FIELD(normalization_cap),
      DOGIU_INT_FIELD(pilot_steps),
      DOGIU_DOUBLE_FIELD(pilot_quantile),
      DOGIU_INT_FIELD(default_action),
      DOGIU_INT_FIELD(runs),
      ConfigField{"seed",
                  [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                  [](ExperimentConfig& c, const std::string& v) {
                    std::size_t used = 0;
                    try {
                      c.seed = std::stoull(v, &used);
                    } catch (const std::exception&) {
                      used = 0;
                    }
                    if (used == 0 || used != v.size() || v[0] == '-') {
                      throw std::invalid_argument("seed: expected an unsigned integer, got '" +
                                                  v + "'");
                    }
                  }},
      DOGIU_INT_FIELD(smoothing_window),
  };
  return fields;
}

#undef DOGIU_INT_FIELD
#undef DOGIU_DOUBLE_FIELD
#undef DOGIU_STRING_FIELD

inline std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace detail

// `key = value` per line; '#' starts a comment. Keys may appear at most once;
// unknown keys are errors; absent keys keep their defaults.
inline ExperimentConfig ParseConfig(std::istream& in) {
  ExperimentConfig config;
  std::map<std::string, const detail::ConfigField*> by_key;
  for (const auto& field : detail::ConfigFields()) by_key[field.key] = &field;
  std::map<std::string, bool> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::Trim(raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key = detail::Trim(line.substr(0, eq));
    const std::string value = detail::Trim(line.substr(eq + 1));
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
    if (seen[key]) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
    }
    seen[key] = true;
    it->second->set(config, value);
  }
  config.Validate();
  return config;
}

inline ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  try {
    return ParseConfig(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline void WriteConfig(std::ostream& out, const ExperimentConfig& config) {
  for (const auto& field : detail::ConfigFields()) {
    out << field.key << " = " << field.get(config) << '\n';
  }
}

}  // namespace dogiu
