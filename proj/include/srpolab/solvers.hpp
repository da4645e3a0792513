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

#ifndef SRPOLAB_SOLVERS_HPP_
#define SRPOLAB_SOLVERS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "srpolab/mdp.hpp"
#include "srpolab/transition.hpp"

namespace srpo {

// pi[s][a], each row a probability vector.
class PolicyTable {
 public:
  PolicyTable(int n_states, int n_actions, std::vector<double> probs);

  static PolicyTable Uniform(int n_states, int n_actions);
  static PolicyTable Deterministic(int n_actions, std::span<const int> actions);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double prob(int s, int a) const { return probs_[Index(s, a)]; }
  std::span<const double> row(int s) const {
    return {probs_.data() + Index(s, 0), static_cast<std::size_t>(n_actions_)};
  }
  const std::vector<double>& probs() const { return probs_; }
  // Action with unit mass at s, or -1 when the row is stochastic.
  int deterministic_action(int s) const;

  bool operator==(const PolicyTable&) const = default;

 private:
  std::size_t Index(int s, int a) const {
    return static_cast<std::size_t>(s) * n_actions_ + a;
  }
  int n_states_;
  int n_actions_;
  std::vector<double> probs_;
};

enum class ValueKind { kHard, kSoft };

struct ValueTable {
  std::vector<double> v;
  std::vector<double> q;  // [s][a]; empty for policy evaluation output
  ValueKind kind = ValueKind::kHard;
  double tol_used = 0.0;
  int iterations = 0;
  double residual = 0.0;

  double Q(int s, int a, int n_actions) const {
    return q[static_cast<std::size_t>(s) * n_actions + a];
  }
};

class OccupancyVector {
 public:
  OccupancyVector(std::vector<double> d, double gamma);
  const std::vector<double>& d() const { return d_; }
  double operator[](int s) const { return d_[s]; }
  int size() const { return static_cast<int>(d_.size()); }
  double gamma() const { return gamma_; }
  double residual() const { return residual_; }
  void set_residual(double r) { residual_ = r; }

 private:
  std::vector<double> d_;
  double gamma_;
  double residual_ = 0.0;
};

inline constexpr double kDefaultTol = 1e-10;
inline constexpr int kDefaultMaxIters = 100000;
inline constexpr double kLinearResidualTol = 1e-8;

ValueTable value_iteration(const TabularMdp& m, double tol = kDefaultTol,
                           int max_iters = kDefaultMaxIters);

// Deterministic argmax of q; exact ties go to the lowest action index.
PolicyTable greedy_policy(const ValueTable& vt, int n_actions);

// Stationary soft backup:
//   Q(s,a) = log sum_{s'} T(s'|s,a) exp[r(s,a,s') + gamma W(s')]
//   W(s)   = max_a Q(s,a)
ValueTable soft_value_iteration(const TabularMdp& m, double tol = kDefaultTol,
                                int max_iters = kDefaultMaxIters);

// Solves (I - gamma P_pi) v = r_pi; q is left empty.
ValueTable policy_evaluation(const TabularMdp& m, const PolicyTable& pi);

// Q(s,a) = sum_{s'} T(s'|s,a) [r + gamma v(s')].
std::vector<double> q_from_v(const TabularMdp& m, std::span<const double> v);

// Solves d^T = (1 - gamma) rho0^T + gamma d^T P_pi.
OccupancyVector occupancy(const TabularMdp& m, const PolicyTable& pi);

// E_{rho0}[v_pi]; cross-checked against the occupancy form below.
double expected_return(const TabularMdp& m, const PolicyTable& pi);
// (1/(1-gamma)) E_{(s,a,s') ~ d_pi x pi x T}[r(s,a,s')].
double expected_return_occupancy_form(const TabularMdp& m,
                                      const PolicyTable& pi);

// Optimal values refined to linear-solve precision: value iteration, then
// policy-iteration steps until the greedy policy is stable.
struct OptimalSolution {
  ValueTable values;  // hard; q exact for the returned policy
  PolicyTable policy;
};
OptimalSolution solve_optimal(const TabularMdp& m);

// n rollouts of fixed length; initial states from rho0. theta_idx is
// copied into every transition.
std::vector<Trajectory> sample_trajectories(const TabularMdp& m,
                                            const PolicyTable& pi, int n,
                                            int horizon,
                                            std::uint64_t rng_seed,
                                            int theta_idx = 0);

}  // namespace srpo

#endif  // SRPOLAB_SOLVERS_HPP_
