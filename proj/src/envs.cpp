// Copyright 2026 The SRPO Lab Authors. All rights reserved.
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

#include "srpolab/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srpolab/csv.hpp"
#include "srpolab/error.hpp"

namespace srpo {
namespace {

constexpr int kDx[kGridActions] = {1, -1, 0, 0};
constexpr int kDy[kGridActions] = {0, 0, 1, -1};
// Two directions perpendicular to each action.
constexpr int kPerp[kGridActions][2] = {{2, 3}, {2, 3}, {0, 1}, {0, 1}};
constexpr int kMirror[kGridActions] = {1, 0, 3, 2};

void CheckCommon(const EnvSpec& spec) {
  Require(!spec.dynamics_params.empty(), ErrorCode::kInvalidArgument,
          "EnvSpec: dynamics_params must not be empty");
  Require(spec.gamma > 0.0 && spec.gamma < 1.0, ErrorCode::kInvalidArgument,
          "EnvSpec: gamma must lie in (0, 1)");
  Require(spec.action_cost_coeff >= 0.0 && std::isfinite(spec.action_cost_coeff),
          ErrorCode::kInvalidArgument,
          "EnvSpec: action_cost_coeff must be finite and >= 0");
  for (double p : spec.dynamics_params) {
    Require(std::isfinite(p), ErrorCode::kInvalidArgument,
            "EnvSpec: dynamics_params must be finite");
  }
}

std::string Label(double x) { return FormatDouble(x); }

void RequireHomomorphousFamily(const std::vector<TabularMdp>& members) {
  for (std::size_t i = 1; i < members.size(); ++i) {
    Require(is_homomorphous(members.front(), members[i]), ErrorCode::kStructural,
            "generated members 0 and " + std::to_string(i) +
                " are not homomorphous");
  }
}

// Nearest integer with exact halves rounded toward zero.
int RoundTiesToZero(double x) {
  const double r = std::ceil(std::abs(x) - 0.5);
  return static_cast<int>(x < 0 ? -r : r);
}

int Wrap(int i, int n) { return ((i % n) + n) % n; }

struct GridLayout {
  int width;
  int height;
  int Index(int x, int y) const { return y * width + x; }
  int goal() const { return Index(width - 1, height - 1); }
  int Move(int s, int dir) const {
    const int x = std::clamp(s % width + kDx[dir], 0, width - 1);
    const int y = std::clamp(s / width + kDy[dir], 0, height - 1);
    return Index(x, y);
  }
  int Distance(int s, int t) const {
    return std::abs(s % width - t % width) + std::abs(s / width - t / width);
  }
};

MdpAnnotations GridAnnotations(const GridLayout& g, double cost) {
  MdpAnnotations ann;
  std::vector<std::vector<double>> sc;
  for (int s = 0; s < g.width * g.height; ++s) {
    sc.push_back({static_cast<double>(s % g.width), static_cast<double>(s / g.width)});
  }
  ann.state_coords = CoordTable::FromRows(sc);
  std::vector<std::vector<double>> ac;
  for (int a = 0; a < kGridActions; ++a) {
    ac.push_back({static_cast<double>(kDx[a]), static_cast<double>(kDy[a])});
  }
  ann.action_coords = CoordTable::FromRows(ac);
  ann.reward_lipschitz = cost;
  return ann;
}

TabularMdp GridMember(const EnvSpec& spec, const GridLayout& g, double slip,
                      bool mirrored) {
  Require(slip >= 0.0 && slip <= 1.0, ErrorCode::kInvalidArgument,
          "gridworld slip must lie in [0, 1]");
  const int n = g.width * g.height;
  const std::size_t size = static_cast<std::size_t>(n) * kGridActions * n;
  std::vector<double> t(size, 0.0), r(size, 0.0);
  const int goal = g.goal();
  const double max_dist = std::max(1, g.Distance(0, goal));
  auto at = [&](int s, int a, int next) {
    return (static_cast<std::size_t>(s) * kGridActions + a) * n + next;
  };
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < kGridActions; ++a) {
      const int dir = mirrored ? kMirror[a] : a;
      t[at(s, a, g.Move(s, dir))] += 1.0 - slip;
      t[at(s, a, g.Move(s, kPerp[dir][0]))] += 0.5 * slip;
      t[at(s, a, g.Move(s, kPerp[dir][1]))] += 0.5 * slip;
      for (int next = 0; next < n; ++next) {
        // Every action has unit L1 norm, so the action term is the cost.
        r[at(s, a, next)] = (next == goal ? spec.goal_bonus : 0.0) -
                            spec.distance_coeff * g.Distance(next, goal) / max_dist -
                            spec.action_cost_coeff;
      }
    }
  }
  std::vector<double> rho0(n, 0.0);
  rho0[0] = 1.0;
  return TabularMdp(n, kGridActions, std::move(t), std::move(r), spec.gamma,
                    std::move(rho0), GridAnnotations(g, spec.action_cost_coeff));
}

GridLayout CheckedLayout(const EnvSpec& spec) {
  Require(spec.width >= 1 && spec.height >= 1 && spec.width * spec.height >= 2,
          ErrorCode::kInvalidArgument, "gridworld needs at least two cells");
  return {spec.width, spec.height};
}

}  // namespace

std::string ToString(EnvKind kind) {
  switch (kind) {
    case EnvKind::kGridworld:
      return "gridworld";
    case EnvKind::kMirroredGridworld:
      return "mirrored_gridworld";
    case EnvKind::kPendulum:
      return "pendulum";
    case EnvKind::kBottleneck:
      return "bottleneck";
  }
  return "unknown";
}

EnvKind ParseEnvKind(const std::string& name) {
  if (name == "gridworld") return EnvKind::kGridworld;
  if (name == "mirrored_gridworld") return EnvKind::kMirroredGridworld;
  if (name == "pendulum") return EnvKind::kPendulum;
  if (name == "bottleneck") return EnvKind::kBottleneck;
  Fail(ErrorCode::kConfig, "unknown environment kind '" + name + "'");
}

std::string ToString(PendulumKnob knob) {
  return knob == PendulumKnob::kGravity ? "gravity" : "friction";
}

PendulumKnob ParsePendulumKnob(const std::string& name) {
  if (name == "gravity") return PendulumKnob::kGravity;
  if (name == "friction") return PendulumKnob::kFriction;
  Fail(ErrorCode::kConfig, "unknown pendulum knob '" + name + "'");
}

std::string EnvSignature(const EnvSpec& spec) {
  std::string sig = ToString(spec.kind);
  if (spec.kind == EnvKind::kPendulum) {
    sig += " " + std::to_string(spec.angle_bins) + "x" +
           std::to_string(spec.velocity_bins) + "x" +
           std::to_string(spec.torque_levels) + " " + ToString(spec.knob);
  } else if (spec.kind == EnvKind::kBottleneck) {
    sig += " goal=" + FormatDouble(spec.bottleneck_goal) +
           " lure=" + FormatDouble(spec.bottleneck_lure) +
           " penalty=" + FormatDouble(spec.bottleneck_penalty);
  } else {
    sig += " " + std::to_string(spec.width) + "x" + std::to_string(spec.height);
  }
  sig += " params=[";
  for (std::size_t i = 0; i < spec.dynamics_params.size(); ++i) {
    if (i > 0) sig += ",";
    sig += FormatDouble(spec.dynamics_params[i]);
  }
  sig += "] gamma=" + FormatDouble(spec.gamma) +
         " cost=" + FormatDouble(spec.action_cost_coeff);
  return sig;
}

HipMdpFamily make_gridworld_family(const EnvSpec& spec) {
  CheckCommon(spec);
  const GridLayout g = CheckedLayout(spec);
  std::vector<TabularMdp> members;
  std::vector<std::string> labels;
  for (double slip : spec.dynamics_params) {
    members.push_back(GridMember(spec, g, slip, false));
    labels.push_back(Label(slip));
  }
  RequireHomomorphousFamily(members);
  return HipMdpFamily(std::move(members), std::move(labels));
}

HipMdpFamily make_mirrored_gridworld_family(const EnvSpec& spec) {
  CheckCommon(spec);
  const GridLayout g = CheckedLayout(spec);
  const double slip = spec.dynamics_params.front();
  std::vector<TabularMdp> members = {GridMember(spec, g, slip, false),
                                     GridMember(spec, g, slip, true)};
  RequireHomomorphousFamily(members);
  return HipMdpFamily(std::move(members), {"normal", "mirrored"});
}

HipMdpFamily make_pendulum_family(const EnvSpec& spec) {
  CheckCommon(spec);
  const int na = spec.angle_bins;
  const int nv = spec.velocity_bins;
  const int nt = spec.torque_levels;
  Require(na >= 3 && na % 2 == 1 && nv >= 3 && nv % 2 == 1 && nt >= 3 &&
              nt % 2 == 1,
          ErrorCode::kInvalidArgument,
          "pendulum bins and torque levels must be odd and >= 3");
  Require(nv >= nt, ErrorCode::kInvalidArgument,
          "pendulum needs at least as many velocity bins as torque levels");
  Require(spec.dt > 0.0 && spec.start_spread >= 0, ErrorCode::kInvalidArgument,
          "pendulum dt must be positive and start_spread nonnegative");

  const int ca = (na - 1) / 2;
  const int cv = (nv - 1) / 2;
  const int half = (nt - 1) / 2;
  const double dtheta = 2.0 * std::numbers::pi / na;
  // One velocity bin moves the angle by half a bin per step.
  const double domega = dtheta / (2.0 * spec.dt);
  const int n = na * nv;
  auto theta = [&](int s) { return (s / nv - ca) * dtheta; };
  auto omega = [&](int s) { return (s % nv - cv) * domega; };

  MdpAnnotations ann;
  std::vector<std::vector<double>> sc, ac;
  for (int s = 0; s < n; ++s) sc.push_back({theta(s), omega(s)});
  std::vector<double> torque(nt);
  for (int k = 0; k < nt; ++k) {
    torque[k] = -1.0 + 2.0 * k / (nt - 1);
    ac.push_back({torque[k]});
  }
  ann.state_coords = CoordTable::FromRows(sc);
  ann.action_coords = CoordTable::FromRows(ac);
  // |c a1^2 - c a2^2| = c |a1 + a2| |a1 - a2| <= 2c |a1 - a2| on [-1, 1].
  ann.reward_lipschitz = 2.0 * spec.action_cost_coeff;

  const std::size_t size = static_cast<std::size_t>(n) * nt * n;
  std::vector<double> reward(size);
  for (int s = 0; s < n; ++s) {
    const double base = theta(s) * theta(s) + 0.1 * omega(s) * omega(s);
    for (int k = 0; k < nt; ++k) {
      const double rv = -(base + spec.action_cost_coeff * torque[k] * torque[k]);
      std::fill_n(reward.begin() + (static_cast<std::size_t>(s) * nt + k) * n, n, rv);
    }
  }

  std::vector<double> rho0(n, 0.0);
  int n_start = 0;
  for (int s = 0; s < n; ++s) {
    if (std::abs(s / nv - ca) <= spec.start_spread &&
        std::abs(s % nv - cv) <= spec.start_spread) {
      ++n_start;
    }
  }
  for (int s = 0; s < n; ++s) {
    if (std::abs(s / nv - ca) <= spec.start_spread &&
        std::abs(s % nv - cv) <= spec.start_spread) {
      rho0[s] = 1.0 / n_start;
    }
  }

  std::vector<TabularMdp> members;
  std::vector<std::string> labels;
  for (double param : spec.dynamics_params) {
    const double g = spec.gravity_scale *
                     (spec.knob == PendulumKnob::kGravity ? param : spec.gravity);
    const double f = spec.knob == PendulumKnob::kFriction ? param : spec.friction;
    Require(g >= 0.0 && f >= 0.0, ErrorCode::kInvalidArgument,
            "pendulum gravity and friction must be nonnegative");
    std::vector<double> t(size, 0.0);
    for (int s = 0; s < n; ++s) {
      const int i = s / nv;
      const int j = s % nv;
      const int next_i = Wrap(i + RoundTiesToZero(omega(s) * spec.dt / dtheta), na);
      const int drift = RoundTiesToZero(
          (g * std::sin(theta(s)) - f * omega(s)) * spec.dt / domega);
      // Every member maps the torque levels one-to-one onto the same window
      // of velocity bins; targets outside the window wrap around inside it.
      const int lo = std::clamp(j - half, 0, nv - nt);
      for (int k = 0; k < nt; ++k) {
        const int raw = j + (k - half) + drift;
        const int next_j = lo + Wrap(raw - lo, nt);
        t[(static_cast<std::size_t>(s) * nt + k) * n + next_i * nv + next_j] = 1.0;
      }
    }
    members.emplace_back(n, nt, std::move(t), reward, spec.gamma, rho0, ann);
    labels.push_back(Label(param));
  }
  for (const TabularMdp& m : members) {
    for (int s = 0; s < n; ++s) {
      Require(!m.is_terminal(s), ErrorCode::kStructural,
              "pendulum discretization produced a dead state");
    }
  }
  RequireHomomorphousFamily(members);
  return HipMdpFamily(std::move(members), std::move(labels));
}

HipMdpFamily make_bottleneck_family(const EnvSpec& spec) {
  CheckCommon(spec);
  const double leak = spec.dynamics_params.front();
  Require(leak > 0.0 && leak < 1.0, ErrorCode::kInvalidArgument,
          "bottleneck leak probability must lie in (0, 1)");
  Require(std::isfinite(spec.bottleneck_goal) && std::isfinite(spec.bottleneck_lure) &&
              std::isfinite(spec.bottleneck_penalty),
          ErrorCode::kInvalidArgument, "bottleneck rewards must be finite");
  constexpr int n = 6;
  constexpr int na = 2;
  auto at = [](int s, int a, int next) { return (s * na + a) * n + next; };

  std::vector<double> r(n * na * n, 0.0);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < na; ++a) {
      r[at(s, a, kBottleneckGoal)] = spec.bottleneck_goal;
      r[at(s, a, kBottleneckLure)] = spec.bottleneck_lure;
      r[at(s, a, kBottleneckPenalty)] = -spec.bottleneck_penalty;
    }
  }
  MdpAnnotations ann;
  ann.state_coords =
      CoordTable::FromRows({{0, 0}, {1, 0}, {2, -1}, {2, 1}, {3, -1}, {3, 1}});
  ann.action_coords = CoordTable::FromRows({{-1}, {1}});
  ann.reward_lipschitz = 0.0;
  std::vector<double> rho0(n, 0.0);
  rho0[kBottleneckStart] = 1.0;

  std::vector<TabularMdp> members;
  for (int m = 0; m < 2; ++m) {
    std::vector<double> t(n * na * n, 0.0);
    for (int a = 0; a < na; ++a) {
      t[at(kBottleneckStart, a, kBottleneckState)] = 1.0;
      t[at(kBottleneckGoal, a, kBottleneckStart)] = 1.0;
      t[at(kBottleneckPenalty, a, kBottleneckStart)] = 1.0;
    }
    t[at(kBottleneckState, 0, kBottleneckDetour)] = 1.0;
    t[at(kBottleneckState, 1, kBottleneckLure)] = 1.0;
    const int good = m == 0 ? kBottleneckDetour : kBottleneckLure;
    const int bad = m == 0 ? kBottleneckLure : kBottleneckDetour;
    // Action 1 on a branch leaks into the other outcome, which keeps the
    // reachability of both branches identical across members.
    t[at(good, 0, kBottleneckGoal)] = 1.0;
    t[at(good, 1, kBottleneckGoal)] = 1.0 - leak;
    t[at(good, 1, kBottleneckPenalty)] = leak;
    t[at(bad, 0, kBottleneckPenalty)] = 1.0;
    t[at(bad, 1, kBottleneckPenalty)] = 1.0 - leak;
    t[at(bad, 1, kBottleneckGoal)] = leak;
    members.emplace_back(n, na, std::move(t), r, spec.gamma, rho0, ann);
  }
  RequireHomomorphousFamily(members);
  return HipMdpFamily(std::move(members), {"lure-penalty", "lure-goal"});
}

HipMdpFamily make_family(const EnvSpec& spec) {
  switch (spec.kind) {
    case EnvKind::kGridworld:
      return make_gridworld_family(spec);
    case EnvKind::kMirroredGridworld:
      return make_mirrored_gridworld_family(spec);
    case EnvKind::kPendulum:
      return make_pendulum_family(spec);
    case EnvKind::kBottleneck:
      return make_bottleneck_family(spec);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown environment kind");
}

}  // namespace srpo
