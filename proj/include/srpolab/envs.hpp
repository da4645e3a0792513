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

// Generators for homomorphous families: a slippery gridworld, a gridworld
// pair with mirrored controls, and a discretized inverted pendulum.

#ifndef SRPOLAB_ENVS_HPP_
#define SRPOLAB_ENVS_HPP_

#include <string>
#include <vector>

#include "srpolab/mdp.hpp"

namespace srpo {

enum class EnvKind { kGridworld, kMirroredGridworld, kPendulum, kBottleneck };
enum class PendulumKnob { kGravity, kFriction };

std::string ToString(EnvKind kind);
EnvKind ParseEnvKind(const std::string& name);
std::string ToString(PendulumKnob knob);
PendulumKnob ParsePendulumKnob(const std::string& name);

struct EnvSpec {
  EnvKind kind = EnvKind::kGridworld;
  // Gridworld size.
  int width = 5;
  int height = 5;
  // Pendulum discretization.
  int angle_bins = 15;
  int velocity_bins = 15;
  int torque_levels = 5;
  PendulumKnob knob = PendulumKnob::kGravity;
  // Slip probabilities (gridworlds), gravity / friction values (pendulum) or
  // the branch leak probability (bottleneck; first value only).
  std::vector<double> dynamics_params = {0.0};
  double gamma = 0.9;
  double action_cost_coeff = 0.0;
  // Gridworld reward shape.
  double goal_bonus = 1.0;
  double distance_coeff = 0.1;
  // Pendulum constants held fixed while the knob varies.
  double gravity = 10.0;
  double friction = 0.2;
  double gravity_scale = 5.0;
  double dt = 0.1;
  // Half-width (in bins, per axis) of the uniform upright start region.
  int start_spread = 2;
  // Bottleneck rewards on entering the goal, the lure and the penalty state.
  double bottleneck_goal = 0.2;
  double bottleneck_lure = 0.5;
  double bottleneck_penalty = 0.6;
};

// One-line description used in manifests and to detect mixed environments.
std::string EnvSignature(const EnvSpec& spec);

HipMdpFamily make_gridworld_family(const EnvSpec& spec);
// Two members sharing the slip dynamics of dynamics_params[0]; the second
// has left/right and up/down swapped, so optimal actions are opposite while
// optimal state distributions coincide.
HipMdpFamily make_mirrored_gridworld_family(const EnvSpec& spec);
HipMdpFamily make_pendulum_family(const EnvSpec& spec);
// Two members sharing a bottleneck state whose optimal actions are opposite.
// Every lap runs start -> bottleneck -> {detour, lure} -> {goal, penalty} ->
// start. Action 1 at the bottleneck enters the lure (immediate reward); in
// member 0 the lure mostly leads to the penalty state and the detour to the
// goal, in member 1 the roles of the two branches are swapped.
HipMdpFamily make_bottleneck_family(const EnvSpec& spec);
// Dispatches on spec.kind.
HipMdpFamily make_family(const EnvSpec& spec);

// Gridworld action coordinates, in action index order.
inline constexpr int kGridActions = 4;  // right, left, up, down

// State indices of the bottleneck family.
inline constexpr int kBottleneckStart = 0;
inline constexpr int kBottleneckState = 1;
inline constexpr int kBottleneckDetour = 2;
inline constexpr int kBottleneckLure = 3;
inline constexpr int kBottleneckGoal = 4;
inline constexpr int kBottleneckPenalty = 5;

}  // namespace srpo

#endif  // SRPOLAB_ENVS_HPP_
