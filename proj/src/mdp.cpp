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

#include "srpolab/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srpolab/error.hpp"
#include "srpolab/rng.hpp"
#include "srpolab/solvers.hpp"

namespace srpo {
namespace {

constexpr double kSumTol = 1e-12;

double Euclidean(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double L1(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
  return acc;
}

void CheckCoords(const CoordTable& t, int n_items, const char* what) {
  if (t.empty()) {
    Require(t.values.empty(), ErrorCode::kInvalidArgument,
            std::string(what) + ": values given with zero dimension");
    return;
  }
  Require(t.dim > 0 && t.values.size() ==
                           static_cast<std::size_t>(n_items) * t.dim,
          ErrorCode::kInvalidArgument,
          std::string(what) + ": expected one row per item");
  for (double v : t.values) {
    Require(std::isfinite(v), ErrorCode::kInvalidArgument,
            std::string(what) + ": non-finite coordinate");
  }
}

void RequireDeterministicWithCoords(const TabularMdp& m, const char* op) {
  Require(m.is_deterministic(), ErrorCode::kDomain,
          std::string(op) + ": requires deterministic dynamics");
  Require(m.has_state_coords(), ErrorCode::kDomain,
          std::string(op) + ": requires state_coords");
}

}  // namespace

CoordTable CoordTable::FromRows(const std::vector<std::vector<double>>& rows) {
  CoordTable t;
  if (rows.empty()) return t;
  t.dim = static_cast<int>(rows.front().size());
  Require(t.dim > 0, ErrorCode::kInvalidArgument, "coordinate rows are empty");
  t.values.reserve(rows.size() * t.dim);
  for (const auto& row : rows) {
    Require(static_cast<int>(row.size()) == t.dim,
            ErrorCode::kInvalidArgument, "ragged coordinate rows");
    t.values.insert(t.values.end(), row.begin(), row.end());
  }
  return t;
}

TabularMdp::TabularMdp(int n_states, int n_actions,
                       std::vector<double> transition,
                       std::vector<double> reward, double gamma,
                       std::vector<double> rho0, MdpAnnotations annotations)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma),
      rho0_(std::move(rho0)),
      annotations_(std::move(annotations)) {
  Require(n_states_ > 0 && n_actions_ > 0, ErrorCode::kInvalidArgument,
          "n_states and n_actions must be positive");
  const std::size_t n = static_cast<std::size_t>(n_states_) * n_actions_ *
                        n_states_;
  Require(transition_.size() == n, ErrorCode::kInvalidArgument,
          "transition tensor has wrong size");
  Require(reward_.size() == n, ErrorCode::kInvalidArgument,
          "reward tensor has wrong size");
  Require(gamma_ > 0.0 && gamma_ < 1.0, ErrorCode::kInvalidArgument,
          "gamma must lie in (0, 1)");
  Require(rho0_.size() == static_cast<std::size_t>(n_states_),
          ErrorCode::kInvalidArgument, "rho0 has wrong size");

  double rho_sum = 0.0;
  for (double p : rho0_) {
    Require(std::isfinite(p) && p >= 0.0, ErrorCode::kInvalidArgument,
            "rho0 entries must be nonnegative");
    rho_sum += p;
  }
  Require(std::abs(rho_sum - 1.0) <= kSumTol, ErrorCode::kInvalidArgument,
          "rho0 must sum to 1");

  for (double r : reward_) {
    Require(std::isfinite(r), ErrorCode::kInvalidArgument,
            "reward entries must be finite");
    r_max_ = std::max(r_max_, std::abs(r));
  }

  CheckCoords(annotations_.state_coords, n_states_, "state_coords");
  CheckCoords(annotations_.action_coords, n_actions_, "action_coords");
  for (double c : annotations_.action_coords.values) {
    Require(c >= -1.0 && c <= 1.0, ErrorCode::kInvalidArgument,
            "action_coords must lie in [-1, 1]");
  }
  if (annotations_.reward_lipschitz) {
    const double l = *annotations_.reward_lipschitz;
    Require(std::isfinite(l) && l >= 0.0, ErrorCode::kInvalidArgument,
            "reward_lipschitz must be finite and >= 0");
  }

  deterministic_ = true;
  sparse_offsets_.reserve(static_cast<std::size_t>(n_states_) * n_actions_ + 1);
  for (int s = 0; s < n_states_; ++s) {
    for (int a = 0; a < n_actions_; ++a) {
      sparse_offsets_.push_back(sparse_.size());
      double row_sum = 0.0;
      int nonzero = 0;
      for (int next = 0; next < n_states_; ++next) {
        const double p = transition_[Index(s, a, next)];
        Require(std::isfinite(p) && p >= 0.0, ErrorCode::kInvalidArgument,
                "transition probabilities must be nonnegative");
        row_sum += p;
        if (p > 0.0) {
          sparse_.push_back({next, p, reward_[Index(s, a, next)]});
          ++nonzero;
        }
      }
      Require(std::abs(row_sum - 1.0) <= kSumTol, ErrorCode::kInvalidArgument,
              "transition row (" + std::to_string(s) + ", " +
                  std::to_string(a) + ") does not sum to 1");
      if (nonzero != 1) deterministic_ = false;
    }
  }
  sparse_offsets_.push_back(sparse_.size());
}

std::span<const Successor> TabularMdp::successors(int s, int a) const {
  const std::size_t k = static_cast<std::size_t>(s) * n_actions_ + a;
  return {sparse_.data() + sparse_offsets_[k],
          sparse_offsets_[k + 1] - sparse_offsets_[k]};
}

double TabularMdp::expected_reward(int s, int a) const {
  double acc = 0.0;
  for (const Successor& e : successors(s, a)) acc += e.prob * e.reward;
  return acc;
}

int TabularMdp::successor(int s, int a) const {
  Require(deterministic_, ErrorCode::kDomain,
          "successor() requires deterministic dynamics");
  return successors(s, a).front().next_state;
}

bool TabularMdp::is_terminal(int s) const {
  for (int a = 0; a < n_actions_; ++a) {
    auto succ = successors(s, a);
    if (succ.size() != 1 || succ.front().next_state != s ||
        succ.front().reward != 0.0) {
      return false;
    }
  }
  return true;
}

TabularMdp TabularMdp::WithTransition(std::vector<double> transition) const {
  return TabularMdp(n_states_, n_actions_, std::move(transition), reward_,
                    gamma_, rho0_, annotations_);
}

TabularMdp TabularMdp::WithReward(std::vector<double> reward) const {
  return TabularMdp(n_states_, n_actions_, transition_, std::move(reward),
                    gamma_, rho0_, annotations_);
}

HipMdpFamily::HipMdpFamily(std::vector<TabularMdp> members,
                           std::vector<std::string> theta_labels)
    : members_(std::move(members)), theta_labels_(std::move(theta_labels)) {
  Require(!members_.empty(), ErrorCode::kInvalidArgument,
          "family must have at least one member");
  if (theta_labels_.empty()) {
    for (int i = 0; i < size(); ++i) theta_labels_.push_back(std::to_string(i));
  }
  Require(theta_labels_.size() == members_.size(), ErrorCode::kInvalidArgument,
          "one theta label per member is required");
  const TabularMdp& ref = members_.front();
  for (int i = 1; i < size(); ++i) {
    const TabularMdp& m = members_[i];
    const std::string who = "family member " + std::to_string(i);
    Require(m.n_states() == ref.n_states() && m.n_actions() == ref.n_actions(),
            ErrorCode::kStructural, who + ": state/action spaces differ");
    Require(m.gamma() == ref.gamma(), ErrorCode::kStructural,
            who + ": gamma differs");
    Require(std::equal(m.rho0().begin(), m.rho0().end(), ref.rho0().begin()),
            ErrorCode::kStructural, who + ": rho0 differs");
    Require(m.reward() == ref.reward(), ErrorCode::kStructural,
            who + ": reward tensor differs");
    const auto& a = m.annotations();
    const auto& b = ref.annotations();
    Require(a.state_coords.dim == b.state_coords.dim &&
                a.state_coords.values == b.state_coords.values &&
                a.action_coords.dim == b.action_coords.dim &&
                a.action_coords.values == b.action_coords.values &&
                a.reward_lipschitz == b.reward_lipschitz,
            ErrorCode::kStructural, who + ": coordinates differ");
  }
}

void RequireSameSpaces(const TabularMdp& m1, const TabularMdp& m2) {
  Require(m1.n_states() == m2.n_states() && m1.n_actions() == m2.n_actions(),
          ErrorCode::kStructural,
          "MDPs do not share state/action spaces (" +
              std::to_string(m1.n_states()) + "x" +
              std::to_string(m1.n_actions()) + " vs " +
              std::to_string(m2.n_states()) + "x" +
              std::to_string(m2.n_actions()) + ")");
}

bool is_homomorphous(const TabularMdp& m1, const TabularMdp& m2) {
  RequireSameSpaces(m1, m2);
  const int n = m1.n_states();
  std::vector<double> reach1(n), reach2(n);
  for (int s = 0; s < n; ++s) {
    std::fill(reach1.begin(), reach1.end(), 0.0);
    std::fill(reach2.begin(), reach2.end(), 0.0);
    for (int a = 0; a < m1.n_actions(); ++a) {
      for (const Successor& e : m1.successors(s, a)) reach1[e.next_state] += e.prob;
      for (const Successor& e : m2.successors(s, a)) reach2[e.next_state] += e.prob;
    }
    for (int next = 0; next < n; ++next) {
      if ((reach1[next] > kReachabilityTol) != (reach2[next] > kReachabilityTol)) {
        return false;
      }
    }
  }
  return true;
}

double dynamics_distance(const TabularMdp& m1, const TabularMdp& m2,
                         DistanceMode mode) {
  RequireSameSpaces(m1, m2);
  if (mode == DistanceMode::kAuto) {
    mode = (m1.is_deterministic() && m2.is_deterministic())
               ? DistanceMode::kCoordinate
               : DistanceMode::kTotalVariation;
  }
  double eps = 0.0;
  if (mode == DistanceMode::kCoordinate) {
    RequireDeterministicWithCoords(m1, "dynamics_distance");
    RequireDeterministicWithCoords(m2, "dynamics_distance");
    for (int s = 0; s < m1.n_states(); ++s) {
      for (int a = 0; a < m1.n_actions(); ++a) {
        eps = std::max(eps, Euclidean(m1.state_coord(m1.successor(s, a)),
                                      m2.state_coord(m2.successor(s, a))));
      }
    }
    return eps;
  }
  for (int s = 0; s < m1.n_states(); ++s) {
    for (int a = 0; a < m1.n_actions(); ++a) {
      auto p = m1.transition_row(s, a);
      auto q = m2.transition_row(s, a);
      double tv = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
      eps = std::max(eps, 0.5 * tv);
    }
  }
  return eps;
}

LipschitzConstants estimate_lipschitz(const TabularMdp& m, int n_samples,
                                      double perturbation,
                                      std::uint64_t rng_seed) {
  Require(n_samples > 0, ErrorCode::kInvalidArgument,
          "estimate_lipschitz: n_samples must be positive");
  Require(perturbation > 0.0, ErrorCode::kInvalidArgument,
          "estimate_lipschitz: perturbation must be positive");
  RequireDeterministicWithCoords(m, "estimate_lipschitz");
  Require(m.has_action_coords(), ErrorCode::kDomain,
          "estimate_lipschitz: requires action_coords");
  Require(m.reward_lipschitz().has_value(), ErrorCode::kDomain,
          "estimate_lipschitz: the MDP declares no reward Lipschitz constant");

  const int dim = m.annotations().action_coords.dim;
  Rng rng(rng_seed, "estimate_lipschitz");
  std::vector<double> target(dim);
  double lambda2 = 0.0;
  bool found = false;
  for (int i = 0; i < n_samples; ++i) {
    // Fixed number of draws per probe keeps prefixes of the stream aligned.
    const int s = rng.UniformInt(m.n_states());
    const int a = rng.UniformInt(m.n_actions());
    const int axis = rng.UniformInt(dim);
    const double sign = rng.UniformInt(2) == 0 ? -1.0 : 1.0;

    auto base = m.action_coord(a);
    std::copy(base.begin(), base.end(), target.begin());
    target[axis] += sign * perturbation;
    if (target[axis] < -1.0 - 1e-12 || target[axis] > 1.0 + 1e-12) continue;

    int snapped = -1;
    double best = 0.0;
    for (int b = 0; b < m.n_actions(); ++b) {
      const double d = Euclidean(m.action_coord(b), target);
      if (snapped < 0 || d < best) {
        snapped = b;
        best = d;
      }
    }
    if (snapped == a) continue;
    const double ds = Euclidean(m.state_coord(m.successor(s, a)),
                                m.state_coord(m.successor(s, snapped)));
    if (ds == 0.0) continue;
    lambda2 = std::max(lambda2, L1(m.action_coord(a), m.action_coord(snapped)) / ds);
    found = true;
  }
  Require(found, ErrorCode::kDomain,
          "estimate_lipschitz: degenerate dynamics, no perturbation moved the "
          "next state");
  return {*m.reward_lipschitz(), lambda2, m.r_max()};
}

double exact_inverse_lipschitz(const TabularMdp& m) {
  RequireDeterministicWithCoords(m, "exact_inverse_lipschitz");
  Require(m.has_action_coords(), ErrorCode::kDomain,
          "exact_inverse_lipschitz: requires action_coords");
  double lambda2 = 0.0;
  for (int s = 0; s < m.n_states(); ++s) {
    for (int a1 = 0; a1 < m.n_actions(); ++a1) {
      for (int a2 = a1 + 1; a2 < m.n_actions(); ++a2) {
        const double da = L1(m.action_coord(a1), m.action_coord(a2));
        const double ds = Euclidean(m.state_coord(m.successor(s, a1)),
                                    m.state_coord(m.successor(s, a2)));
        if (ds == 0.0) {
          if (da > 0.0) return std::numeric_limits<double>::infinity();
          continue;
        }
        lambda2 = std::max(lambda2, da / ds);
      }
    }
  }
  return lambda2;
}

double discrete_reward_lipschitz(const TabularMdp& m) {
  Require(m.has_action_coords(), ErrorCode::kDomain,
          "discrete_reward_lipschitz: requires action_coords");
  double lambda1 = 0.0;
  for (int s = 0; s < m.n_states(); ++s) {
    for (int a1 = 0; a1 < m.n_actions(); ++a1) {
      for (int a2 = a1 + 1; a2 < m.n_actions(); ++a2) {
        const double da = L1(m.action_coord(a1), m.action_coord(a2));
        for (int next = 0; next < m.n_states(); ++next) {
          const double dr = std::abs(m.r(s, a1, next) - m.r(s, a2, next));
          if (dr == 0.0) continue;
          if (da == 0.0) return std::numeric_limits<double>::infinity();
          lambda1 = std::max(lambda1, dr / da);
        }
      }
    }
  }
  return lambda1;
}

LipschitzConstants pair_lipschitz(const TabularMdp& m1, const TabularMdp& m2) {
  RequireSameSpaces(m1, m2);
  Require(m1.reward_lipschitz().has_value(), ErrorCode::kDomain,
          "pair_lipschitz: the MDP declares no reward Lipschitz constant");
  LipschitzConstants lips;
  lips.lambda1 = *m1.reward_lipschitz();
  lips.lambda2 = std::max(exact_inverse_lipschitz(m1), exact_inverse_lipschitz(m2));
  lips.r_max = std::max(m1.r_max(), m2.r_max());
  return lips;
}

double action_gap(const TabularMdp& m) {
  if (m.n_actions() == 1) return kInfiniteGap;
  const OptimalSolution sol = solve_optimal(m);
  const int n_actions = m.n_actions();
  double gap = kInfiniteGap;
  for (int s = 0; s < m.n_states(); ++s) {
    const int best = sol.policy.deterministic_action(s);
    const double v = sol.values.Q(s, best, n_actions);
    for (int a = 0; a < n_actions; ++a) {
      if (a == best) continue;
      gap = std::min(gap, v - sol.values.Q(s, a, n_actions));
    }
  }
  return gap;
}

double action_gap(const HipMdpFamily& family) {
  double gap = kInfiniteGap;
  for (const TabularMdp& m : family.members()) gap = std::min(gap, action_gap(m));
  return gap;
}

}  // namespace srpo
