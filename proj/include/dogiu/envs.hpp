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
#include <map>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dogiu/asynchrony.hpp"
#include "dogiu/csv.hpp"
#include "dogiu/rng.hpp"
#include "dogiu/submodular.hpp"

namespace dogiu {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double Dot(Vec2 o) const { return x * o.x + y * o.y; }
  double Cross(Vec2 o) const { return x * o.y - y * o.x; }
  double Norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

inline Vec2 UnitVector(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Fixed cameras; action k of a camera points it at angle 2 pi k / headings.
struct CameraConfig {
  std::vector<Vec2> positions;
  int headings = 8;
  double fov_half_angle = std::numbers::pi / 6.0;
  double range = 20.0;

  // rows x cols lattice of cell centers over a width x height workspace.
  static CameraConfig Grid(int rows, int cols, double width, double height,
                           int headings, double fov_half_angle, double range) {
    CameraConfig config;
    config.headings = headings;
    config.fov_half_angle = fov_half_angle;
    config.range = range;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        config.positions.push_back(
            {(c + 0.5) * width / cols, (r + 0.5) * height / rows});
      }
    }
    return config;
  }

  int camera_count() const { return static_cast<int>(positions.size()); }

  double HeadingAngle(int action) const {
    return 2.0 * std::numbers::pi * action / headings;
  }

  void Validate(double width, double height) const {
    if (headings < 1) throw std::invalid_argument("cameras need at least one heading");
    if (!(fov_half_angle > 0.0) || fov_half_angle >= std::numbers::pi / 2.0) {
      throw std::invalid_argument("field-of-view half-angle must be in (0, pi/2)");
    }
    if (!(range > 0.0)) throw std::invalid_argument("sensing range must be positive");
    for (const auto& p : positions) {
      if (p.x < 0.0 || p.x > width || p.y < 0.0 || p.y > height) {
        throw std::invalid_argument("camera outside the workspace");
      }
    }
  }
};

// Closed sector test: distance <= range and angular offset <= half-angle.
// Written in along/lateral coordinates so the smooth reward below can share
// the same boundary.
class SectorTest {
 public:
  explicit SectorTest(const CameraConfig& cameras)
      : cameras_(&cameras),
        cos_half_(std::cos(cameras.fov_half_angle)),
        sin_half_(std::sin(cameras.fov_half_angle)),
        range_sq_(cameras.range * cameras.range) {
    for (int k = 0; k < cameras.headings; ++k) {
      directions_.push_back(UnitVector(cameras.HeadingAngle(k)));
    }
  }

  bool Covers(int camera, int action, Vec2 target) const {
    const Vec2 r = target - cameras_->positions[static_cast<std::size_t>(camera)];
    if (r.Dot(r) > range_sq_) return false;
    const Vec2 h = directions_[static_cast<std::size_t>(action)];
    const double along = r.Dot(h);
    if (along < 0.0) return false;
    return std::abs(h.Cross(r)) * cos_half_ <= along * sin_half_;
  }

 private:
  const CameraConfig* cameras_;
  double cos_half_;
  double sin_half_;
  double range_sq_;
  std::vector<Vec2> directions_;
};

// Distinct targets inside at least one of the given (camera, heading) sectors.
inline int CountCovered(const CameraConfig& cameras, std::span<const Vec2> targets,
                        std::span<const GroundElement> sectors) {
  const SectorTest test(cameras);
  int count = 0;
  for (const auto& x : targets) {
    for (const auto& e : sectors) {
      if (test.Covers(e.agent, e.action, x)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

// Targets seen by `own` and by none of `others`.
inline int CountMarginal(const SectorTest& test, std::span<const Vec2> targets,
                         GroundElement own, std::span<const GroundElement> others) {
  int count = 0;
  for (const auto& x : targets) {
    if (!test.Covers(own.agent, own.action, x)) continue;
    bool seen = false;
    for (const auto& e : others) {
      if (test.Covers(e.agent, e.action, x)) {
        seen = true;
        break;
      }
    }
    if (!seen) ++count;
  }
  return count;
}

// Reflects a coordinate into [0, limit]; returns true if the number of
// reflections was odd.
inline bool ReflectInto(double& v, double limit) {
  bool flipped = false;
  while (v < 0.0 || v > limit) {
    v = v < 0.0 ? -v : 2.0 * limit - v;
    flipped = !flipped;
  }
  return flipped;
}

// Clustered targets sharing a per-cluster velocity. A target that hits a wall
// mirrors its own copy of the velocity; mirrors reset when the cluster
// heading is redrawn.
struct TargetSystem {
  std::vector<Vec2> positions;
  std::vector<int> cluster;
  std::vector<Vec2> cluster_velocity;
  std::vector<Vec2> mirror;  // per-target (+-1, +-1)
  double speed = 1.0;
  int resample_period = 30;
  double noise_sigma = 0.005;
  double width = 100.0;
  double height = 100.0;

  static TargetSystem Clustered(int target_count, int cluster_count, double speed,
                                int resample_period, double noise_sigma, double width,
                                double height, double spread, Rng& rng) {
    if (target_count < 0 || cluster_count < 1) {
      throw std::invalid_argument("need target_count >= 0 and at least one cluster");
    }
    TargetSystem system;
    system.speed = speed;
    system.resample_period = resample_period;
    system.noise_sigma = noise_sigma;
    system.width = width;
    system.height = height;
    std::vector<Vec2> centers;
    for (int c = 0; c < cluster_count; ++c) {
      centers.push_back({rng.Uniform(0.0, width), rng.Uniform(0.0, height)});
    }
    for (int c = 0; c < cluster_count; ++c) {
      system.cluster_velocity.push_back(
          UnitVector(rng.Uniform(0.0, 2.0 * std::numbers::pi)) * speed);
    }
    for (int k = 0; k < target_count; ++k) {
      const int c = static_cast<int>(static_cast<long long>(k) * cluster_count /
                                     std::max(target_count, 1));
      Vec2 p = centers[static_cast<std::size_t>(c)] +
               Vec2{rng.Normal(0.0, spread), rng.Normal(0.0, spread)};
      ReflectInto(p.x, width);
      ReflectInto(p.y, height);
      system.positions.push_back(p);
      system.cluster.push_back(c);
      system.mirror.push_back({1.0, 1.0});
    }
    return system;
  }

  int target_count() const { return static_cast<int>(positions.size()); }

  Vec2 Velocity(int target) const {
    const auto k = static_cast<std::size_t>(target);
    const Vec2 v = cluster_velocity[static_cast<std::size_t>(cluster[k])];
    return {v.x * mirror[k].x, v.y * mirror[k].y};
  }

  // Advances to step t (t >= 1). Cluster headings are redrawn at multiples of
  // the resample period, before moving.
  void Step(int t, Rng& rng) {
    if (t < 1) throw std::invalid_argument("target steps start at 1");
    if (resample_period > 0 && t % resample_period == 0) {
      for (auto& v : cluster_velocity) {
        v = UnitVector(rng.Uniform(0.0, 2.0 * std::numbers::pi)) * speed;
      }
      for (auto& m : mirror) m = {1.0, 1.0};
    }
    for (std::size_t k = 0; k < positions.size(); ++k) {
      Vec2 p = positions[k] + Velocity(static_cast<int>(k));
      if (noise_sigma > 0.0) {
        p.x += rng.Normal(0.0, noise_sigma);
        p.y += rng.Normal(0.0, noise_sigma);
      }
      if (ReflectInto(p.x, width)) mirror[k].x = -mirror[k].x;
      if (ReflectInto(p.y, height)) mirror[k].y = -mirror[k].y;
      positions[k] = p;
    }
  }
};

// Camera layout plus targets plus the reward normalization cap B.
struct CoverageWorld {
  CameraConfig cameras;
  TargetSystem targets;
  double cap = 1.0;

  int CoveredCount(std::span<const int> headings) const {
    if (static_cast<int>(headings.size()) != cameras.camera_count()) {
      throw std::invalid_argument("need one heading per camera");
    }
    std::vector<GroundElement> sectors;
    for (std::size_t i = 0; i < headings.size(); ++i) {
      sectors.push_back({static_cast<int>(i), headings[i]});
    }
    return CountCovered(cameras, targets.positions, sectors);
  }

  // Per-agent bandit reward: marginal count over the neighbors, divided by B
  // and clamped to [0, 1].
  double NormalizedMarginal(GroundElement own, std::span<const GroundElement> others,
                            bool* clamped = nullptr) const {
    const SectorTest test(cameras);
    const double value = CountMarginal(test, targets.positions, own, others) / cap;
    if (clamped) *clamped = value > 1.0;
    return std::min(value, 1.0);
  }
};

// covered_count / B over arbitrary sets of (camera, heading) elements.
inline SetFunction CoverageSetFunction(const CoverageWorld& world) {
  if (!(world.cap > 0.0)) throw std::invalid_argument("normalization cap must be > 0");
  const CameraConfig cameras = world.cameras;
  const std::vector<Vec2> targets = world.targets.positions;
  const double cap = world.cap;
  const double upper = std::max<double>(1.0, static_cast<double>(targets.size())) / cap;
  return SetFunction(
      [cameras, targets, cap](std::span<const GroundElement> set) {
        return CountCovered(cameras, targets, set) / cap;
      },
      upper);
}

// Max targets in any single sector across a pilot rollout (initial frame
// included), at least 1.
inline int PilotNormalizationCap(const CameraConfig& cameras, TargetSystem targets,
                                 int steps, Rng& rng, double quantile = 1.0) {
  if (!(quantile > 0.0 && quantile <= 1.0)) {
    throw std::invalid_argument("PilotNormalizationCap: quantile must be in (0, 1]");
  }
  const SectorTest test(cameras);
  std::vector<int> counts;
  auto record = [&]() {
    for (int cam = 0; cam < cameras.camera_count(); ++cam) {
      for (int h = 0; h < cameras.headings; ++h) {
        int count = 0;
        for (const auto& x : targets.positions) count += test.Covers(cam, h, x) ? 1 : 0;
        counts.push_back(count);
      }
    }
  };
  record();
  for (int t = 1; t <= steps; ++t) {
    targets.Step(t, rng);
    record();
  }
  std::sort(counts.begin(), counts.end());
  // Nearest-rank quantile over every (frame, camera, heading) sector count.
  const auto rank = static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(counts.size())));
  const int cap = counts[std::clamp<std::size_t>(rank, 1, counts.size()) - 1];
  return std::max(cap, 1);
}

// Target positions at integer times 0..n-1, linearly interpolated between
// frames and held constant outside them.
struct TargetTrajectory {
  std::vector<std::vector<Vec2>> frames;

  std::vector<Vec2> At(double tau) const {
    if (frames.empty()) return {};
    if (frames.size() == 1 || tau <= 0.0) return frames.front();
    const double last = static_cast<double>(frames.size() - 1);
    if (tau >= last) return frames.back();
    const auto k = static_cast<std::size_t>(std::floor(tau));
    const double w = tau - static_cast<double>(k);
    std::vector<Vec2> out(frames[k].size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = frames[k][j] * (1.0 - w) + frames[k + 1][j] * w;
    }
    return out;
  }

  double MaxSpeed() const {
    double best = 0.0;
    for (std::size_t k = 1; k < frames.size(); ++k) {
      for (std::size_t j = 0; j < frames[k].size(); ++j) {
        best = std::max(best, (frames[k][j] - frames[k - 1][j]).Norm());
      }
    }
    return best;
  }
};

// Continuous-time scene for the smoothed reward. Before settling on its new
// heading at deployment time tau_j, camera j slews from previous_headings[j]
// over [tau_j - slew_duration, tau_j].
struct SmoothScene {
  CameraConfig cameras;
  TargetTrajectory trajectory;
  std::vector<int> previous_headings;
  double slew_duration = 0.5;
  double cap = 1.0;
};

namespace detail {

inline double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double WrapAngle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

inline double Smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

}  // namespace detail

// Soft coverage: target membership in a sector is a product of sigmoids on
// the range and angular boundaries (same boundaries as SectorTest), and the
// per-target value over cameras is the probabilistic OR 1 - prod(1 - m_j),
// which keeps F monotone submodular in the deployed set.
//
// Declared constants follow from |grad_x m| <= k/2 and |dm/dtheta| <=
// k R / 4 + 1/4 (sharpness k, range R), with target speed bounded by the
// trajectory and slew rate bounded by 1.5 pi / slew_duration.
inline TimeStampedReward SmoothedTimeStampedReward(const SmoothScene& scene,
                                                   double sharpness) {
  if (!(sharpness > 0.0)) throw std::invalid_argument("sharpness must be > 0");
  if (!(scene.cap > 0.0)) throw std::invalid_argument("normalization cap must be > 0");
  if (scene.slew_duration < 0.0) throw std::invalid_argument("negative slew duration");
  if (static_cast<int>(scene.previous_headings.size()) != scene.cameras.camera_count()) {
    throw std::invalid_argument("need a previous heading per camera");
  }
  const double k = sharpness;
  const double range = scene.cameras.range;
  const double sin_half = std::sin(scene.cameras.fov_half_angle);
  const double cos_half = std::cos(scene.cameras.fov_half_angle);

  auto evaluate = [scene, k, range, sin_half, cos_half](
                      double tau, std::span<const Deployment> schedule) {
    const auto targets = scene.trajectory.At(tau);
    std::vector<Vec2> directions;
    directions.reserve(schedule.size());
    for (const auto& d : schedule) {
      const double goal = scene.cameras.HeadingAngle(d.action);
      double angle = goal;
      if (scene.slew_duration > 0.0) {
        const double start = scene.cameras.HeadingAngle(
            scene.previous_headings.at(static_cast<std::size_t>(d.agent)));
        const double progress = detail::Smoothstep(
            (tau - (d.time - scene.slew_duration)) / scene.slew_duration);
        angle = start + detail::WrapAngle(goal - start) * progress;
      }
      directions.push_back(UnitVector(angle));
    }
    double total = 0.0;
    for (const auto& x : targets) {
      double miss = 1.0;
      for (std::size_t j = 0; j < schedule.size(); ++j) {
        const Vec2 r =
            x - scene.cameras.positions.at(static_cast<std::size_t>(schedule[j].agent));
        const double along = r.Dot(directions[j]);
        const double lateral = std::abs(directions[j].Cross(r));
        const double in_range = detail::Sigmoid(k * (range - r.Norm()));
        const double in_angle = detail::Sigmoid(k * (along * sin_half - lateral * cos_half));
        miss *= 1.0 - in_range * in_angle;
      }
      total += 1.0 - miss;
    }
    return total / scene.cap;
  };

  const double per_target = 1.0 / scene.cap;
  const double targets =
      scene.trajectory.frames.empty() ? 0.0 : scene.trajectory.frames.front().size();
  const double cameras = scene.cameras.camera_count();
  const double position_slope = k / 2.0;
  const double heading_slope = k * range / 4.0 + 0.25;
  const double slew_rate = scene.slew_duration > 0.0
                               ? 1.5 * std::numbers::pi / scene.slew_duration
                               : 0.0;
  const double deploy = per_target * targets * heading_slope * slew_rate;
  const double eval =
      per_target * targets * cameras *
          (position_slope * scene.trajectory.MaxSpeed()) +
      cameras * deploy;
  return TimeStampedReward(evaluate, eval, deploy);
}

// Discrete coverage as a time-stamped reward: targets at time tau, cameras
// pointing at their deployed headings. Piecewise constant in time, so no
// Lipschitz constants are declared.
inline TimeStampedReward DiscreteTimeStampedReward(const CameraConfig& cameras,
                                                   TargetTrajectory trajectory) {
  auto evaluate = [cameras, trajectory = std::move(trajectory)](
                      double tau, std::span<const Deployment> schedule) {
    std::vector<GroundElement> sectors;
    for (const auto& d : schedule) sectors.push_back({d.agent, d.action});
    return static_cast<double>(CountCovered(cameras, trajectory.At(tau), sectors));
  };
  return TimeStampedReward(evaluate, 0.0, 0.0);
}

// Exact lookup over a table covering every subset of its ground set.
inline SetFunction TabularInstance(const ValueTable& table) {
  const std::size_t n = table.ground.size();
  if (n > 20) throw std::length_error("tabular instance: ground set too large");
  if (table.values.size() != (std::size_t{1} << n)) {
    // Find a missing subset for the message.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<GroundElement> subset;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask >> k & 1) subset.push_back(table.ground[k]);
      }
      if (!table.values.contains(subset)) {
        throw std::invalid_argument("tabular instance: missing subset " +
                                    ToString(subset));
      }
    }
  }
  auto empty = table.values.find({});
  if (empty == table.values.end() || empty->second != 0.0) {
    throw std::invalid_argument("tabular instance: f(empty set) must be 0");
  }
  double upper = 0.0;
  for (const auto& [set, value] : table.values) {
    if (value < 0.0) {
      throw std::invalid_argument("tabular instance: negative value at " + ToString(set));
    }
    upper = std::max(upper, value);
  }
  auto values = table.values;
  return SetFunction(
      [values = std::move(values)](std::span<const GroundElement> set) {
        auto it = values.find(std::vector<GroundElement>(set.begin(), set.end()));
        if (it == values.end()) {
          throw std::out_of_range("tabular instance: no value for " + ToString(set));
        }
        return it->second;
      },
      upper > 0.0 ? upper : 1.0);
}

// Weighted coverage: element e covers items covers[e]; f(S) is the total
// weight of covered items.
inline SetFunction WeightedCoverage(std::map<GroundElement, std::vector<int>> covers,
                                    std::vector<double> weights) {
  double upper = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("weighted coverage: negative weight");
    upper += w;
  }
  for (const auto& [e, items] : covers) {
    for (int item : items) {
      if (item < 0 || static_cast<std::size_t>(item) >= weights.size()) {
        throw std::invalid_argument("weighted coverage: item out of range");
      }
    }
  }
  return SetFunction(
      [covers = std::move(covers), weights](std::span<const GroundElement> set) {
        std::vector<char> hit(weights.size(), 0);
        for (const auto& e : set) {
          auto it = covers.find(e);
          if (it == covers.end()) continue;
          for (int item : it->second) hit[static_cast<std::size_t>(item)] = 1;
        }
        double total = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) {
          if (hit[k]) total += weights[k];
        }
        return total;
      },
      upper > 0.0 ? upper : 1.0);
}

// Every subset of `ground` with its value, ready for TabularInstance.
inline ValueTable Tabulate(const SetFunction& f, std::span<const GroundElement> ground) {
  ValueTable table;
  table.ground.assign(ground.begin(), ground.end());
  std::sort(table.ground.begin(), table.ground.end());
  table.ground.erase(std::unique(table.ground.begin(), table.ground.end()),
                     table.ground.end());
  const std::size_t n = table.ground.size();
  if (n > 20) throw std::length_error("tabulate: ground set too large");
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<GroundElement> subset;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask >> k & 1) subset.push_back(table.ground[k]);
    }
    const double value = f(subset);
    table.values.emplace(std::move(subset), value);
  }
  return table;
}

inline void WriteValueTable(std::ostream& out, const ValueTable& table) {
  for (const auto& [set, value] : table.values) {
    out << ToString(set) << ' ' << FormatDouble(value) << '\n';
  }
}

// Scene export rows: step,kind,id,x,y,heading (heading -1 for targets).
inline void WriteSceneHeader(std::ostream& out) { out << "step,kind,id,x,y,heading\n"; }

inline void WriteSceneRows(std::ostream& out, int step, const CoverageWorld& world,
                           std::span<const int> headings) {
  for (int c = 0; c < world.cameras.camera_count(); ++c) {
    const auto& p = world.cameras.positions[static_cast<std::size_t>(c)];
    out << step << ",camera," << c << ',' << FormatDouble(p.x) << ','
        << FormatDouble(p.y) << ',' << headings[static_cast<std::size_t>(c)] << '\n';
  }
  for (int k = 0; k < world.targets.target_count(); ++k) {
    const auto& p = world.targets.positions[static_cast<std::size_t>(k)];
    out << step << ",target," << k << ',' << FormatDouble(p.x) << ','
        << FormatDouble(p.y) << ",-1\n";
  }
}

}  // namespace dogiu
