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
#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dogiu {

// One (agent, action) pair of the product ground set.
struct GroundElement {
  int agent = 0;
  int action = 0;

  auto operator<=>(const GroundElement&) const = default;
};

inline std::string ToString(const GroundElement& e) {
  return std::to_string(e.agent) + ":" + std::to_string(e.action);
}

inline std::string ToString(std::span<const GroundElement> set) {
  if (set.empty()) return "{}";
  std::string out;
  for (const auto& e : set) {
    if (!out.empty()) out += ',';
    out += ToString(e);
  }
  return out;
}

// Joint action: at most one element per agent, kept in ascending agent order.
class Assignment {
 public:
  Assignment() = default;

  explicit Assignment(std::vector<GroundElement> elements)
      : elements_(std::move(elements)) {
    std::sort(elements_.begin(), elements_.end());
    for (std::size_t k = 1; k < elements_.size(); ++k) {
      if (elements_[k].agent == elements_[k - 1].agent) {
        throw std::invalid_argument("assignment has two elements for agent " +
                                    std::to_string(elements_[k].agent));
      }
    }
  }

  // actions[i] is agent i's action.
  static Assignment FromActions(std::span<const int> actions) {
    std::vector<GroundElement> elements;
    elements.reserve(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
      elements.push_back({static_cast<int>(i), actions[i]});
    }
    return Assignment(std::move(elements));
  }

  bool Contains(int agent) const { return Find(agent) != elements_.end(); }

  std::optional<int> ActionOf(int agent) const {
    auto it = Find(agent);
    if (it == elements_.end()) return std::nullopt;
    return it->action;
  }

  void Insert(GroundElement e) {
    auto it = std::lower_bound(elements_.begin(), elements_.end(),
                               GroundElement{e.agent, INT32_MIN});
    if (it != elements_.end() && it->agent == e.agent) {
      throw std::invalid_argument("agent " + std::to_string(e.agent) +
                                  " already has an action in the assignment");
    }
    elements_.insert(it, e);
  }

  Assignment With(GroundElement e) const {
    Assignment copy = *this;
    copy.Insert(e);
    return copy;
  }

  Assignment Without(int agent) const {
    Assignment copy;
    for (const auto& e : elements_) {
      if (e.agent != agent) copy.elements_.push_back(e);
    }
    return copy;
  }

  std::span<const GroundElement> elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<GroundElement>::const_iterator Find(int agent) const {
    auto it = std::lower_bound(elements_.begin(), elements_.end(),
                               GroundElement{agent, INT32_MIN});
    if (it != elements_.end() && it->agent == agent) return it;
    return elements_.end();
  }

  std::vector<GroundElement> elements_;
};

// Set function over subsets of the product ground set. The evaluator always
// receives a sorted, duplicate-free span. Values must stay within
// [0, upper_bound]; violations throw.
class SetFunction {
 public:
  using Evaluator = std::function<double(std::span<const GroundElement>)>;

  SetFunction(Evaluator evaluator, double upper_bound)
      : evaluator_(std::move(evaluator)), upper_bound_(upper_bound) {
    if (!evaluator_) throw std::invalid_argument("empty set-function evaluator");
    if (!(upper_bound_ > 0.0)) {
      throw std::invalid_argument("set-function upper bound must be positive");
    }
  }

  double operator()(std::span<const GroundElement> set) const {
    if (std::is_sorted(set.begin(), set.end()) &&
        std::adjacent_find(set.begin(), set.end()) == set.end()) {
      return Checked(evaluator_(set), set);
    }
    std::vector<GroundElement> canonical(set.begin(), set.end());
    std::sort(canonical.begin(), canonical.end());
    canonical.erase(std::unique(canonical.begin(), canonical.end()),
                    canonical.end());
    return Checked(evaluator_(canonical), canonical);
  }

  double operator()(const Assignment& a) const { return (*this)(a.elements()); }

  double upper_bound() const { return upper_bound_; }

 private:
  double Checked(double value, std::span<const GroundElement> set) const {
    constexpr double kSlack = 1e-9;
    if (!(value >= -kSlack) || value > upper_bound_ * (1.0 + kSlack) + kSlack) {
      throw std::domain_error("set-function value " + std::to_string(value) +
                              " outside [0, " + std::to_string(upper_bound_) +
                              "] at " + ToString(set));
    }
    return value;
  }

  Evaluator evaluator_;
  double upper_bound_;
};

// f(A + a) - f(A). The assignment must not already hold an action for a's agent.
inline double MarginalGain(const SetFunction& f, GroundElement a,
                           const Assignment& base) {
  if (base.Contains(a.agent)) {
    throw std::invalid_argument("marginal gain: agent " + std::to_string(a.agent) +
                                " already present in the assignment");
  }
  return f(base.With(a)) - f(base);
}

struct CurvatureResult {
  double kappa = 0.0;
  // Elements with f(v) = 0; left out of the minimum.
  std::vector<GroundElement> zero_singletons;
};

// 1 - min_v [f(V) - f(V \ v)] / f(v) over the given ground set.
inline CurvatureResult Curvature(const SetFunction& f,
                                 std::span<const GroundElement> ground) {
  std::vector<GroundElement> all(ground.begin(), ground.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  CurvatureResult result;
  const double full = f(all);
  double min_ratio = 1.0;
  bool any = false;
  std::vector<GroundElement> rest;
  for (std::size_t k = 0; k < all.size(); ++k) {
    const GroundElement single[] = {all[k]};
    const double alone = f(single);
    if (alone <= 0.0) {
      result.zero_singletons.push_back(all[k]);
      continue;
    }
    rest.assign(all.begin(), all.end());
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    const double ratio = (full - f(rest)) / alone;
    min_ratio = any ? std::min(min_ratio, ratio) : ratio;
    any = true;
  }
  if (any) result.kappa = std::clamp(1.0 - min_ratio, 0.0, 1.0);
  return result;
}

// f(a_i) - f(a_i | actions of agents outside the neighborhood, excluding i).
inline double Coin(const SetFunction& f, int agent, const Assignment& joint,
                   std::span<const int> neighborhood) {
  const auto own = joint.ActionOf(agent);
  if (!own) {
    throw std::invalid_argument("coin: assignment has no action for agent " +
                                std::to_string(agent));
  }
  Assignment outside;
  for (const auto& e : joint.elements()) {
    if (e.agent == agent) continue;
    if (std::find(neighborhood.begin(), neighborhood.end(), e.agent) !=
        neighborhood.end()) {
      continue;
    }
    outside.Insert(e);
  }
  const GroundElement mine{agent, *own};
  const GroundElement single[] = {mine};
  return f(single) - MarginalGain(f, mine, outside);
}

struct StructureWitness {
  std::string violated;  // "normalization", "monotonicity", ...
  std::vector<GroundElement> a, b, c;
  std::optional<GroundElement> s;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct StructureReport {
  bool holds = true;
  std::optional<StructureWitness> witness;
};

struct ExhaustiveOptions {
  std::size_t max_elements = 12;
  double tolerance = 1e-9;
};

namespace detail {

// All 2^n values of f over subsets of a canonical ground set, indexed by mask.
class SubsetTable {
 public:
  SubsetTable(const SetFunction& f, std::span<const GroundElement> ground,
              std::size_t cap, const char* what)
      : ground_(ground.begin(), ground.end()) {
    std::sort(ground_.begin(), ground_.end());
    ground_.erase(std::unique(ground_.begin(), ground_.end()), ground_.end());
    if (ground_.size() > cap) {
      throw std::length_error(std::string(what) + ": ground set of " +
                              std::to_string(ground_.size()) +
                              " elements exceeds the exhaustive-check cap of " +
                              std::to_string(cap));
    }
    const std::uint64_t count = std::uint64_t{1} << ground_.size();
    values_.resize(count);
    std::vector<GroundElement> subset;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      values_[mask] = f(Elements(mask, subset));
    }
  }

  std::size_t size() const { return ground_.size(); }
  double operator[](std::uint64_t mask) const { return values_[mask]; }
  std::uint64_t full() const { return (std::uint64_t{1} << ground_.size()) - 1; }

  std::vector<GroundElement> Elements(std::uint64_t mask) const {
    std::vector<GroundElement> out;
    return Elements(mask, out);
  }

  const std::vector<GroundElement>& Elements(std::uint64_t mask,
                                             std::vector<GroundElement>& out) const {
    out.clear();
    for (std::size_t k = 0; k < ground_.size(); ++k) {
      if (mask >> k & 1) out.push_back(ground_[k]);
    }
    return out;
  }

  const GroundElement& element(std::size_t k) const { return ground_[k]; }

 private:
  std::vector<GroundElement> ground_;
  std::vector<double> values_;
};

}  // namespace detail

// Exhaustive check of normalization, monotonicity and diminishing returns
// over every (A subset-of B, s) triple. Reports the first violation found.
inline StructureReport CheckMonotoneSubmodular(const SetFunction& f,
                                               std::span<const GroundElement> ground,
                                               ExhaustiveOptions options = {}) {
  const detail::SubsetTable table(f, ground, options.max_elements,
                                  "check_monotone_submodular");
  const double tol = options.tolerance;
  StructureReport report;
  auto fail = [&](StructureWitness w) {
    report.holds = false;
    report.witness = std::move(w);
    return report;
  };

  if (std::abs(table[0]) > tol) {
    return fail({"normalization", {}, {}, {}, std::nullopt, table[0], 0.0});
  }
  const std::uint64_t full = table.full();
  for (std::uint64_t b = 0; b <= full; ++b) {
    // Every A subset of B, including B itself.
    for (std::uint64_t a = b;; a = (a - 1) & b) {
      if (table[a] > table[b] + tol) {
        return fail({"monotonicity", table.Elements(a), table.Elements(b), {},
                     std::nullopt, table[a], table[b]});
      }
      for (std::size_t k = 0; k < table.size(); ++k) {
        const std::uint64_t bit = std::uint64_t{1} << k;
        if (b & bit) continue;
        const double gain_a = table[a | bit] - table[a];
        const double gain_b = table[b | bit] - table[b];
        if (gain_a + tol < gain_b) {
          return fail({"submodularity", table.Elements(a), table.Elements(b), {},
                       table.element(k), gain_a, gain_b});
        }
      }
      if (a == 0) break;
    }
  }
  return report;
}

// Exhaustive check of
//   f(s|C) - f(s|A+C) >= f(s|B+C) - f(s|A+B+C)
// over pairwise-disjoint A, B, C and s outside their union.
inline StructureReport CheckSecondOrderSubmodular(
    const SetFunction& f, std::span<const GroundElement> ground,
    ExhaustiveOptions options = {}) {
  const detail::SubsetTable table(f, ground, options.max_elements,
                                  "check_second_order_submodular");
  const double tol = options.tolerance;
  const std::uint64_t full = table.full();
  StructureReport report;
  auto gain = [&](std::uint64_t bit, std::uint64_t set) {
    return table[set | bit] - table[set];
  };
  for (std::uint64_t c = 0; c <= full; ++c) {
    const std::uint64_t not_c = full & ~c;
    for (std::uint64_t a = not_c;; a = (a - 1) & not_c) {
      const std::uint64_t not_ac = not_c & ~a;
      for (std::uint64_t b = not_ac;; b = (b - 1) & not_ac) {
        const std::uint64_t free = not_ac & ~b;
        for (std::size_t k = 0; k < table.size(); ++k) {
          const std::uint64_t bit = std::uint64_t{1} << k;
          if (!(free & bit)) continue;
          const double lhs = gain(bit, c) - gain(bit, a | c);
          const double rhs = gain(bit, b | c) - gain(bit, a | b | c);
          if (lhs + tol < rhs) {
            report.holds = false;
            report.witness = StructureWitness{
                "second_order_submodularity", table.Elements(a), table.Elements(b),
                table.Elements(c), table.element(k), lhs, rhs};
            return report;
          }
        }
        if (b == 0) break;
      }
      if (a == 0) break;
    }
  }
  return report;
}

struct Optimum {
  Assignment assignment;
  double value = 0.0;
};

// Exact maximizer over the product of per-agent action sets. Enumerates in
// lexicographic order of the action vector and keeps the first maximum, so
// ties resolve to the lowest indices.
inline Optimum BruteForceOptimum(const SetFunction& f,
                                 std::span<const int> action_counts,
                                 double max_points = 1e6) {
  double points = 1.0;
  for (int count : action_counts) {
    if (count < 1) throw std::invalid_argument("brute force: empty action set");
    points *= count;
  }
  if (points > max_points) {
    throw std::length_error("brute force: " + std::to_string(points) +
                            " joint actions exceed the cap of " +
                            std::to_string(max_points));
  }
  std::vector<int> actions(action_counts.size(), 0);
  Optimum best{Assignment::FromActions(actions), f(Assignment::FromActions(actions))};
  while (true) {
    std::size_t k = actions.size();
    while (k > 0) {
      --k;
      if (++actions[k] < action_counts[k]) break;
      actions[k] = 0;
      if (k == 0) return best;
    }
    if (actions.empty()) return best;
    auto joint = Assignment::FromActions(actions);
    const double value = f(joint);
    if (value > best.value) best = {std::move(joint), value};
  }
}

// Plain-text value table: one subset per line followed by its value.
//   positional form:  2,-,0 1.5      (agent i takes the i-th entry, '-' absent)
//   explicit form:    0:2,2:0 1.5
//   empty set:        {} 0
// Blank lines and lines starting with '#' are ignored.
struct ValueTable {
  std::vector<GroundElement> ground;  // union of all listed elements
  std::map<std::vector<GroundElement>, double> values;
};

namespace detail {

inline int ParseInt(std::string_view text, std::size_t line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("table line " + std::to_string(line) +
                                ": bad integer '" + std::string(text) + "'");
  }
  return value;
}

inline double ParseDouble(std::string_view text, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("table line " + std::to_string(line) +
                                ": bad value '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

inline ValueTable ParseValueTable(std::istream& in) {
  ValueTable table;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::istringstream line(raw);
    std::string set_token, value_token, extra;
    if (!(line >> set_token)) continue;
    if (set_token[0] == '#') continue;
    if (!(line >> value_token) || (line >> extra)) {
      throw std::invalid_argument("table line " + std::to_string(line_no) +
                                  ": expected '<elements> <value>'");
    }
    std::vector<GroundElement> set;
    if (set_token != "{}") {
      std::string_view rest = set_token;
      int position = 0;
      while (true) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto colon = item.find(':');
        if (colon != std::string_view::npos) {
          set.push_back({detail::ParseInt(item.substr(0, colon), line_no),
                         detail::ParseInt(item.substr(colon + 1), line_no)});
        } else if (item != "-") {
          set.push_back({position, detail::ParseInt(item, line_no)});
        }
        ++position;
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
    }
    std::sort(set.begin(), set.end());
    if (std::adjacent_find(set.begin(), set.end()) != set.end()) {
      throw std::invalid_argument("table line " + std::to_string(line_no) +
                                  ": repeated element");
    }
    const double value = detail::ParseDouble(value_token, line_no);
    if (!table.values.emplace(set, value).second) {
      throw std::invalid_argument("table line " + std::to_string(line_no) +
                                  ": duplicate subset " + ToString(set));
    }
    table.ground.insert(table.ground.end(), set.begin(), set.end());
  }
  std::sort(table.ground.begin(), table.ground.end());
  table.ground.erase(std::unique(table.ground.begin(), table.ground.end()),
                     table.ground.end());
  return table;
}

}  // namespace dogiu
