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

// Finite MDPs, hidden-parameter families of them, and the structural
// quantities that relate two members of a family: reachability
// (homomorphism), dynamics shift, Lipschitz constants and the action gap.

#ifndef SRPOLAB_MDP_HPP_
#define SRPOLAB_MDP_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace srpo {

// Row-major coordinate table: one fixed-width real vector per item.
struct CoordTable {
  int dim = 0;
  std::vector<double> values;  // size() == n_items * dim

  bool empty() const { return dim == 0; }
  std::span<const double> row(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
  static CoordTable FromRows(const std::vector<std::vector<double>>& rows);
};

// Optional annotations carried next to the core tensors.
struct MdpAnnotations {
  CoordTable state_coords;
  CoordTable action_coords;
  // Analytic Lipschitz constant of the reward in the action (L1 norm on
  // action coordinates), declared by the environment that built the MDP.
  std::optional<double> reward_lipschitz;
};

// One nonzero entry of a transition row.
struct Successor {
  int next_state;
  double prob;
  double reward;
};

// Finite MDP (S, A, T, r, gamma, rho0). Immutable after construction; the
// constructor validates every invariant and throws srpo::Error on failure.
class TabularMdp {
 public:
  // transition and reward are dense [s][a][s'] tensors in row-major order.
  TabularMdp(int n_states, int n_actions, std::vector<double> transition,
             std::vector<double> reward, double gamma,
             std::vector<double> rho0, MdpAnnotations annotations = {});

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double gamma() const { return gamma_; }
  std::span<const double> rho0() const { return rho0_; }

  double p(int s, int a, int next) const { return transition_[Index(s, a, next)]; }
  double r(int s, int a, int next) const { return reward_[Index(s, a, next)]; }
  std::span<const double> transition_row(int s, int a) const {
    return {transition_.data() + Index(s, a, 0),
            static_cast<std::size_t>(n_states_)};
  }
  // Nonzero entries of T(.|s,a), in increasing next-state order.
  std::span<const Successor> successors(int s, int a) const;

  const std::vector<double>& transition() const { return transition_; }
  const std::vector<double>& reward() const { return reward_; }

  // Largest |r| over all entries.
  double r_max() const { return r_max_; }
  // Expected immediate reward sum_{s'} T(s'|s,a) r(s,a,s').
  double expected_reward(int s, int a) const;

  // Every T(.|s,a) is a point mass.
  bool is_deterministic() const { return deterministic_; }
  // Point-mass target of T(.|s,a); only valid when is_deterministic().
  int successor(int s, int a) const;
  // All actions self-loop with zero reward.
  bool is_terminal(int s) const;

  const MdpAnnotations& annotations() const { return annotations_; }
  bool has_state_coords() const { return !annotations_.state_coords.empty(); }
  bool has_action_coords() const { return !annotations_.action_coords.empty(); }
  std::span<const double> state_coord(int s) const {
    return annotations_.state_coords.row(s);
  }
  std::span<const double> action_coord(int a) const {
    return annotations_.action_coords.row(a);
  }
  std::optional<double> reward_lipschitz() const {
    return annotations_.reward_lipschitz;
  }

  // Copy with a different transition tensor (same rewards, rho0, coords).
  TabularMdp WithTransition(std::vector<double> transition) const;
  // Copy with a different reward tensor.
  TabularMdp WithReward(std::vector<double> reward) const;

 private:
  std::size_t Index(int s, int a, int next) const {
    return (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + next;
  }

  int n_states_;
  int n_actions_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double gamma_;
  std::vector<double> rho0_;
  MdpAnnotations annotations_;

  std::vector<Successor> sparse_;
  std::vector<std::size_t> sparse_offsets_;  // (s, a) -> start in sparse_
  double r_max_ = 0.0;
  bool deterministic_ = false;
};

// Members share S, A, r, gamma and rho0; only the dynamics vary with the
// hidden parameter.
class HipMdpFamily {
 public:
  HipMdpFamily(std::vector<TabularMdp> members,
               std::vector<std::string> theta_labels);

  int size() const { return static_cast<int>(members_.size()); }
  const TabularMdp& member(int i) const { return members_.at(i); }
  const std::vector<TabularMdp>& members() const { return members_; }
  const std::string& theta_label(int i) const { return theta_labels_.at(i); }
  const std::vector<std::string>& theta_labels() const { return theta_labels_; }

 private:
  std::vector<TabularMdp> members_;
  std::vector<std::string> theta_labels_;
};

struct LipschitzConstants {
  double lambda1 = 0.0;  // reward w.r.t. action
  double lambda2 = 0.0;  // inverse Lipschitz of dynamics w.r.t. action
  double r_max = 0.0;
};

// Probabilities at or below this are treated as zero in reachability tests.
inline constexpr double kReachabilityTol = 1e-12;

// Throws ErrorCode::kStructural when state or action counts differ.
void RequireSameSpaces(const TabularMdp& m1, const TabularMdp& m2);

// Same state-to-state reachability: sum_a T1(s'|s,a) > 0 iff
// sum_a T2(s'|s,a) > 0 for every (s, s').
bool is_homomorphous(const TabularMdp& m1, const TabularMdp& m2);

enum class DistanceMode {
  kAuto,           // coordinate mode when both members are deterministic
  kCoordinate,     // Euclidean distance between deterministic next states
  kTotalVariation  // max_{s,a} TV(T1(.|s,a), T2(.|s,a))
};

// Smallest eps_m with m2 in the eps-neighbourhood of m1 (boundary included).
double dynamics_distance(const TabularMdp& m1, const TabularMdp& m2,
                         DistanceMode mode = DistanceMode::kAuto);

// (s, a) pairs whose deterministic next states differ, with the distance.
struct PointwiseShift {
  int state;
  int action;
  double distance;
};

// Sampled estimate: lambda2 is the largest |da|_1 / |ds'|_2 over random
// (s, a, a +/- perturbation) probes with a distinct snapped action and a
// distinct next state. lambda1 is the declared reward constant.
LipschitzConstants estimate_lipschitz(const TabularMdp& m, int n_samples,
                                      double perturbation,
                                      std::uint64_t rng_seed);

// Exhaustive inverse-Lipschitz constant over every state and action pair.
// +infinity when two distinct actions share a next state somewhere.
double exact_inverse_lipschitz(const TabularMdp& m);

// Largest |r(s,a1,s') - r(s,a2,s')| / |a1 - a2|_1 over the table.
double discrete_reward_lipschitz(const TabularMdp& m);

// Constants valid for a pair of members: exact lambda2 over both, the
// declared lambda1 and the shared r_max.
LipschitzConstants pair_lipschitz(const TabularMdp& m1, const TabularMdp& m2);

inline constexpr double kInfiniteGap = std::numeric_limits<double>::infinity();

// min over members, states and non-greedy actions of V*(s) - Q*(s,a).
double action_gap(const HipMdpFamily& family);
double action_gap(const TabularMdp& m);

}  // namespace srpo

#endif  // SRPOLAB_MDP_HPP_
