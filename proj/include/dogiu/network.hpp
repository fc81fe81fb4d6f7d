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
#include <compare>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dogiu/bandit.hpp"
#include "dogiu/rng.hpp"

namespace dogiu {

// Directed communication graph; in_neighbors(i) are the agents i hears from.
class CommGraph {
 public:
  CommGraph() = default;

  CommGraph(int agent_count, std::vector<std::vector<int>> in_neighbors)
      : in_(std::move(in_neighbors)) {
    if (agent_count < 0 || static_cast<std::size_t>(agent_count) != in_.size()) {
      throw std::invalid_argument("graph: neighbor lists do not match agent count");
    }
    out_.resize(in_.size());
    for (int i = 0; i < agent_count; ++i) {
      auto& list = in_[static_cast<std::size_t>(i)];
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      for (int j : list) {
        if (j == i) {
          throw std::invalid_argument("graph: self-loop at agent " + std::to_string(i));
        }
        if (j < 0 || j >= agent_count) {
          throw std::invalid_argument("graph: neighbor " + std::to_string(j) +
                                      " out of range");
        }
        out_[static_cast<std::size_t>(j)].push_back(i);
      }
    }
    for (auto& list : out_) std::sort(list.begin(), list.end());
  }

  // Edges are (sender, recipient).
  static CommGraph FromEdges(int agent_count,
                             std::span<const std::pair<int, int>> edges) {
    std::vector<std::vector<int>> in(static_cast<std::size_t>(agent_count));
    for (const auto& [from, to] : edges) {
      if (to < 0 || to >= agent_count) {
        throw std::invalid_argument("graph: recipient " + std::to_string(to) +
                                    " out of range");
      }
      in[static_cast<std::size_t>(to)].push_back(from);
    }
    return CommGraph(agent_count, std::move(in));
  }

  // 4-neighbor lattice, agents numbered row-major, links in both directions.
  static CommGraph Grid4(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid4: empty grid");
    std::vector<std::vector<int>> in(static_cast<std::size_t>(rows * cols));
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        auto& list = in[static_cast<std::size_t>(r * cols + c)];
        if (r > 0) list.push_back((r - 1) * cols + c);
        if (c > 0) list.push_back(r * cols + c - 1);
        if (c + 1 < cols) list.push_back(r * cols + c + 1);
        if (r + 1 < rows) list.push_back((r + 1) * cols + c);
      }
    }
    return CommGraph(rows * cols, std::move(in));
  }

  static CommGraph Complete(int agent_count) {
    std::vector<std::vector<int>> in(static_cast<std::size_t>(agent_count));
    for (int i = 0; i < agent_count; ++i) {
      for (int j = 0; j < agent_count; ++j) {
        if (i != j) in[static_cast<std::size_t>(i)].push_back(j);
      }
    }
    return CommGraph(agent_count, std::move(in));
  }

  int agent_count() const { return static_cast<int>(in_.size()); }
  std::span<const int> in_neighbors(int i) const { return in_.at(static_cast<std::size_t>(i)); }
  std::span<const int> out_neighbors(int j) const { return out_.at(static_cast<std::size_t>(j)); }

  bool HasEdge(int from, int to) const {
    const auto list = in_neighbors(to);
    return std::binary_search(list.begin(), list.end(), from);
  }

 private:
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
};

struct Link {
  int sender = 0;
  int recipient = 0;
  auto operator<=>(const Link&) const = default;
};

enum class DelayKind { kConstant, kUniform, kTrace };

// Per-(link, round) delay source. Every sampled delay lies in [0, bound].
class DelayModel {
 public:
  static DelayModel Constant(int delay) { return DelayModel(DelayKind::kConstant, delay); }
  static DelayModel Uniform(int bound) { return DelayModel(DelayKind::kUniform, bound); }

  // (sender, recipient, round) -> delay.
  static DelayModel Trace(std::map<std::tuple<int, int, int>, int> table) {
    int bound = 0;
    for (const auto& [key, d] : table) {
      if (d < 0) throw std::invalid_argument("delay trace: negative delay");
      bound = std::max(bound, d);
    }
    DelayModel model(DelayKind::kTrace, bound);
    model.trace_ = std::move(table);
    return model;
  }

  // Tighter bound for one link (constant/uniform kinds).
  DelayModel& WithLinkBound(Link link, int bound) {
    if (bound < 0 || bound > bound_) {
      throw std::invalid_argument("per-link bound must lie in [0, global bound]");
    }
    link_bounds_[link] = bound;
    return *this;
  }

  DelayKind kind() const { return kind_; }
  int bound() const { return bound_; }

  int BoundFor(Link link) const {
    auto it = link_bounds_.find(link);
    return it == link_bounds_.end() ? bound_ : it->second;
  }

  int Sample(Link link, int round, Rng& rng) const {
    switch (kind_) {
      case DelayKind::kConstant:
        return BoundFor(link);
      case DelayKind::kUniform:
        return static_cast<int>(
            rng.UniformInt(static_cast<std::uint64_t>(BoundFor(link)) + 1));
      case DelayKind::kTrace: {
        auto it = trace_.find({link.sender, link.recipient, round});
        if (it == trace_.end()) {
          throw std::out_of_range("delay trace has no entry for link " +
                                  std::to_string(link.sender) + "->" +
                                  std::to_string(link.recipient) + " round " +
                                  std::to_string(round));
        }
        return it->second;
      }
    }
    return 0;
  }

 private:
  DelayModel(DelayKind kind, int bound) : kind_(kind), bound_(bound) {
    if (bound_ < 0) throw std::invalid_argument("delay bound must be >= 0");
  }

  DelayKind kind_;
  int bound_;
  std::map<Link, int> link_bounds_;
  std::map<std::tuple<int, int, int>, int> trace_;
};

// CSV with header `sender,recipient,round,delay`.
inline DelayModel ParseDelayTrace(std::istream& in) {
  std::map<std::tuple<int, int, int>, int> table;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "sender,recipient,round,delay") {
        throw std::invalid_argument("delay trace: expected header "
                                    "'sender,recipient,round,delay'");
      }
      continue;
    }
    std::istringstream fields(line);
    std::string cell;
    int values[4];
    for (int k = 0; k < 4; ++k) {
      if (!std::getline(fields, cell, ',')) {
        throw std::invalid_argument("delay trace line " + std::to_string(line_no) +
                                    ": expected 4 columns");
      }
      std::size_t used = 0;
      try {
        values[k] = std::stoi(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size()) {
        throw std::invalid_argument("delay trace line " + std::to_string(line_no) +
                                    ": bad integer '" + cell + "'");
      }
    }
    if (!table.emplace(std::make_tuple(values[0], values[1], values[2]), values[3])
             .second) {
      throw std::invalid_argument("delay trace line " + std::to_string(line_no) +
                                  ": duplicate entry");
    }
  }
  return DelayModel::Trace(std::move(table));
}

struct InFlightMessage {
  int sender = 0;
  int recipient = 0;
  int round = 0;
  int action = 0;
  int deliver_at = 0;

  // Bus order: (deliver_at, recipient, round, sender).
  auto Key() const { return std::tie(deliver_at, recipient, round, sender); }
  bool operator<(const InFlightMessage& other) const { return Key() < other.Key(); }
  bool operator==(const InFlightMessage& other) const = default;
};

// Recipient -> (origin round -> batch, senders ascending).
using Deliveries = std::map<int, Arrivals>;

class MessageBus {
 public:
  // Optional extra ticks added to a message after its delay is drawn.
  using Lateness = std::function<int(const InFlightMessage&)>;

  MessageBus(CommGraph graph, DelayModel delays, int staleness_slack = 0)
      : graph_(std::move(graph)), delays_(std::move(delays)),
        staleness_limit_(delays_.bound() + staleness_slack) {}

  const CommGraph& graph() const { return graph_; }
  const DelayModel& delays() const { return delays_; }
  int staleness_limit() const { return staleness_limit_; }

  // One message per out-neighbor, each with its own delay draw (recipients in
  // ascending order so the rng is consumed deterministically).
  std::vector<InFlightMessage> Broadcast(int sender, int round, int action, Rng& rng,
                                         const Lateness& lateness = {}) {
    std::vector<InFlightMessage> sent;
    for (int recipient : graph_.out_neighbors(sender)) {
      InFlightMessage msg{sender, recipient, round, action, round};
      msg.deliver_at += delays_.Sample({sender, recipient}, round, rng);
      if (lateness) msg.deliver_at += lateness(msg);
      queue_.insert(msg);
      sent.push_back(msg);
      ++broadcast_count_;
    }
    return sent;
  }

  // Removes and returns every message due at tick t.
  Deliveries Deliver(int t) {
    Deliveries out;
    auto it = queue_.begin();
    while (it != queue_.end() && it->deliver_at <= t) {
      const InFlightMessage& msg = *it;
      if (msg.deliver_at < t) {
        throw std::logic_error("message from round " + std::to_string(msg.round) +
                               " was due at tick " + std::to_string(msg.deliver_at) +
                               " but the bus is at tick " + std::to_string(t));
      }
      if (t - msg.round > staleness_limit_ || t < msg.round) {
        throw std::logic_error("staleness bound violated: round " +
                               std::to_string(msg.round) + " delivered at tick " +
                               std::to_string(t));
      }
      out[msg.recipient][msg.round].push_back({msg.sender, msg.action});
      ++delivered_count_;
      it = queue_.erase(it);
    }
    return out;
  }

  std::size_t in_flight() const { return queue_.size(); }
  std::size_t broadcast_count() const { return broadcast_count_; }
  std::size_t delivered_count() const { return delivered_count_; }

 private:
  CommGraph graph_;
  DelayModel delays_;
  int staleness_limit_;
  std::set<InFlightMessage> queue_;
  std::size_t broadcast_count_ = 0;
  std::size_t delivered_count_ = 0;
};

}  // namespace dogiu
