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

// Exact checks of the dynamics-shift bounds on pairs of family members.
// Every quantity comes from the exact solvers; nothing is sampled.

#ifndef SRPOLAB_THEORY_HPP_
#define SRPOLAB_THEORY_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srpolab/mdp.hpp"
#include "srpolab/solvers.hpp"

namespace srpo {

inline constexpr double kSupportSmoothing = 1e-8;
inline constexpr double kBoundSlack = 1e-9;
inline constexpr double kEqualityTol = 1e-8;
inline constexpr double kPremiseMargin = 1e-9;

// Adds kSupportSmoothing to every entry and renormalizes.
std::vector<double> SmoothDistribution(std::span<const double> p);
// KL(p || q) of the smoothed distributions.
double SmoothedKl(std::span<const double> p, std::span<const double> q);
double occupancy_kl(const OccupancyVector& d1, const OccupancyVector& d2);

// Optimal transport value between p (size n) and q (size m) under a
// row-major n x m cost matrix, by successive shortest augmenting paths.
double wasserstein1_discrete(std::span<const double> p,
                             std::span<const double> q,
                             std::span<const double> cost);
// Pairwise L1 distances between the action coordinates of m.
std::vector<double> ActionCostMatrix(const TabularMdp& m);

enum class Theorem { kValueGap, kOccupancyEquality, kPerformanceBound, kWasserstein };
std::string ToString(Theorem theorem);

// Structural assumptions shared by the checks. `notes` lists each failed
// assumption in words.
struct PairPremises {
  bool homomorphous = false;
  bool deterministic = false;
  bool coords = false;
  bool state_action_reward = false;  // r(s, a, s') independent of s'
  bool bounded_actions = false;      // action L1 diameter <= 2
  bool lambda1_valid = false;        // >= the tabulated reward slope
  bool lambda2_valid = false;        // finite and >= the exact constant
  std::vector<std::string> notes;
  bool all() const {
    return homomorphous && deterministic && coords && state_action_reward &&
           bounded_actions && lambda1_valid && lambda2_valid;
  }
  std::string summary() const;
};
PairPremises CheckPairPremises(const TabularMdp& m1, const TabularMdp& m2,
                               const LipschitzConstants& lips);

struct TheoremCheck {
  Theorem theorem = Theorem::kValueGap;
  std::string label;  // e.g. "performance_bound:uniform"
  bool premise_holds = false;
  std::string premise_note;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

struct TheoryReport {
  std::string pair_id;
  int member_a = 0;  // plays T
  int member_b = 0;  // plays T'
  double eps_m = 0.0;
  double eps_s = 0.0;   // KL for the transplanted policy
  double eps_pi = 0.0;  // max per-state W1 of the matched policy
  double delta = 0.0;
  // Largest next-state shift at the (s, pi*_{T'}(s)) pairs actually used.
  double pointwise_eps = 0.0;
  LipschitzConstants lipschitz;
  std::vector<TheoremCheck> checks;
  std::string state_norm = "euclidean(state_coords)";
  std::string action_norm = "l1(action_coords)";
  std::uint64_t seed = 0;
};

// Cached exact quantities for one member.
struct MemberSolution {
  OptimalSolution optimal;
  OccupancyVector occupancy;
  double action_gap;
};
MemberSolution SolveMember(const TabularMdp& m);

TheoremCheck verify_value_gap_lemma(const TabularMdp& m1, const TabularMdp& m2,
                                    const LipschitzConstants& lips);
TheoremCheck verify_occupancy_equality(const TabularMdp& m1,
                                       const TabularMdp& m2,
                                       const LipschitzConstants& lips);
// T = m1, T' = m2; pi_hat acts in T.
TheoremCheck verify_performance_bound(const TabularMdp& m1,
                                      const TabularMdp& m2,
                                      const PolicyTable& pi_hat,
                                      const LipschitzConstants& lips);
TheoremCheck verify_wasserstein_lemma(const TabularMdp& m1,
                                      const TabularMdp& m2,
                                      const LipschitzConstants& lips);

// Policy in m1 whose next state matches m2's optimal next state at every
// state; empty when some target is unreachable in m1.
std::optional<PolicyTable> MatchedPolicy(const TabularMdp& m1,
                                         const TabularMdp& m2,
                                         const PolicyTable& target_policy);

struct SuiteOptions {
  int n_pairs = 20;
  int n_random_policies = 20;
  std::uint64_t seed = 0;
};

// Runs every check over distinct ordered member pairs (a single-member
// family yields self-pairs). Failures are recorded, never thrown.
std::vector<TheoryReport> generate_report_suite(const HipMdpFamily& family,
                                                const SuiteOptions& options);

struct TheoremTally {
  std::string theorem;
  int premise_holding = 0;
  int satisfied = 0;
  int premise_unmet = 0;
  double pass_rate() const {
    return premise_holding == 0 ? 1.0
                                : static_cast<double>(satisfied) / premise_holding;
  }
};
// One tally per theorem kind, in Theorem order.
std::vector<TheoremTally> TallyReports(const std::vector<TheoryReport>& reports);

}  // namespace srpo

#endif  // SRPOLAB_THEORY_HPP_
