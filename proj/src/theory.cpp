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

#include "srpolab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "srpolab/csv.hpp"
#include "srpolab/error.hpp"
#include "srpolab/rng.hpp"

namespace srpo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFlowEps = 1e-14;

struct FlowEdge {
  int to;
  double cap;
  double cost;
};

double MaxAbsDiff(std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

double Expect(std::span<const double> rho0, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) acc += rho0[s] * v[s];
  return acc;
}

double ActionDiameter(const TabularMdp& m) {
  double diam = 0.0;
  for (int a = 0; a < m.n_actions(); ++a) {
    for (int b = a + 1; b < m.n_actions(); ++b) {
      double d = 0.0;
      auto x = m.action_coord(a);
      auto y = m.action_coord(b);
      for (std::size_t k = 0; k < x.size(); ++k) d += std::abs(x[k] - y[k]);
      diam = std::max(diam, d);
    }
  }
  return diam;
}

bool RewardIgnoresNextState(const TabularMdp& m) {
  for (int s = 0; s < m.n_states(); ++s) {
    for (int a = 0; a < m.n_actions(); ++a) {
      const double first = m.r(s, a, 0);
      for (int next = 1; next < m.n_states(); ++next) {
        if (m.r(s, a, next) != first) return false;
      }
    }
  }
  return true;
}

double SafeDynamicsDistance(const TabularMdp& m1, const TabularMdp& m2) {
  if (m1.is_deterministic() && m2.is_deterministic() && m1.has_state_coords()) {
    return dynamics_distance(m1, m2, DistanceMode::kCoordinate);
  }
  return kNaN;
}

// Everything one ordered pair needs, computed once.
struct PairContext {
  const TabularMdp& m1;
  const TabularMdp& m2;
  const MemberSolution& s1;
  const MemberSolution& s2;
  PairPremises premises;
  double eps_m;
  LipschitzConstants lips;
};

TheoremCheck ValueGap(const PairContext& c) {
  TheoremCheck out;
  out.theorem = Theorem::kValueGap;
  out.label = ToString(out.theorem);
  out.premise_holds = c.premises.all();
  out.premise_note = c.premises.summary();
  out.lhs = MaxAbsDiff(c.s1.optimal.values.v, c.s2.optimal.values.v);
  out.rhs = c.lips.lambda1 * c.lips.lambda2 * c.eps_m / (1.0 - c.m1.gamma());
  if (c.lips.lambda1 == 0.0 && std::isfinite(c.eps_m)) out.rhs = 0.0;
  out.satisfied = out.lhs <= out.rhs + kBoundSlack;
  return out;
}

TheoremCheck OccupancyEquality(const PairContext& c) {
  TheoremCheck out;
  out.theorem = Theorem::kOccupancyEquality;
  out.label = ToString(out.theorem);
  const double gamma = c.m1.gamma();
  const double delta = std::min(c.s1.action_gap, c.s2.action_gap);
  double threshold =
      (2.0 - gamma) * c.lips.lambda1 * c.lips.lambda2 * c.eps_m / (1.0 - gamma);
  if (c.lips.lambda1 == 0.0 && std::isfinite(c.eps_m)) threshold = 0.0;
  const bool gap_ok = delta > threshold + kPremiseMargin;
  out.premise_holds = c.premises.all() && gap_ok;
  out.premise_note = c.premises.summary();
  if (!gap_ok) {
    if (!out.premise_note.empty()) out.premise_note += "; ";
    out.premise_note += "action gap " + FormatDouble(delta) +
                        " does not exceed " + FormatDouble(threshold);
  }
  out.lhs = MaxAbsDiff(c.s1.occupancy.d(), c.s2.occupancy.d());
  out.rhs = kEqualityTol;
  out.satisfied = out.lhs <= out.rhs;
  return out;
}

TheoremCheck PerformanceBound(const PairContext& c, const PolicyTable& pi_hat,
                              const std::string& policy_label,
                              double* eps_s_out = nullptr) {
  TheoremCheck out;
  out.theorem = Theorem::kPerformanceBound;
  out.label = ToString(out.theorem) + ":" + policy_label;
  out.premise_holds = c.premises.all();
  out.premise_note = c.premises.summary();
  const double gamma = c.m1.gamma();
  const double eta_star = Expect(c.m1.rho0(), c.s1.optimal.values.v);
  const double eta_hat = expected_return(c.m1, pi_hat);
  const OccupancyVector d_hat = occupancy(c.m1, pi_hat);
  const double eps_s = occupancy_kl(d_hat, c.s2.occupancy);
  if (eps_s_out != nullptr) *eps_s_out = eps_s;
  out.lhs = eta_star - eta_hat;
  double shift = c.lips.lambda1 * c.lips.lambda2 * c.eps_m;
  if (c.lips.lambda1 == 0.0 && std::isfinite(c.eps_m)) shift = 0.0;
  out.rhs = (shift + 2.0 * c.lips.lambda1 +
             std::sqrt(2.0) * c.lips.r_max * std::sqrt(eps_s)) /
            (1.0 - gamma);
  out.satisfied = out.lhs <= out.rhs + kBoundSlack;
  return out;
}

TheoremCheck Wasserstein(const PairContext& c, double* eps_pi_out) {
  TheoremCheck out;
  out.theorem = Theorem::kWasserstein;
  out.label = ToString(out.theorem);
  out.premise_holds = c.premises.all();
  out.premise_note = c.premises.summary();
  out.lhs = kNaN;
  out.rhs = kNaN;
  *eps_pi_out = kNaN;
  if (!(c.m1.is_deterministic() && c.m2.is_deterministic())) {
    out.premise_holds = false;
    return out;
  }
  const std::optional<PolicyTable> matched = MatchedPolicy(c.m1, c.m2, c.s2.optimal.policy);
  if (!matched) {
    out.premise_holds = false;
    if (!out.premise_note.empty()) out.premise_note += "; ";
    out.premise_note += "no action in T reproduces the optimal next state of T'";
    return out;
  }
  const OccupancyVector d_hat = occupancy(c.m1, *matched);
  if (MaxAbsDiff(d_hat.d(), c.s2.occupancy.d()) > kEqualityTol) {
    out.premise_holds = false;
    if (!out.premise_note.empty()) out.premise_note += "; ";
    out.premise_note += "matched policy does not reproduce the occupancy of T'";
  }
  double eps_pi = 0.0;
  if (c.m1.has_action_coords()) {
    const std::vector<double> cost = ActionCostMatrix(c.m1);
    for (int s = 0; s < c.m1.n_states(); ++s) {
      eps_pi = std::max(eps_pi, wasserstein1_discrete(matched->row(s),
                                                      c.s2.optimal.policy.row(s), cost));
    }
  } else {
    eps_pi = kNaN;
  }
  *eps_pi_out = eps_pi;
  const double gamma = c.m1.gamma();
  const double eta_star = Expect(c.m1.rho0(), c.s1.optimal.values.v);
  out.lhs = std::abs(eta_star - expected_return(c.m1, *matched));
  double shift = c.lips.lambda1 * c.lips.lambda2 * c.eps_m;
  if (c.lips.lambda1 == 0.0 && std::isfinite(c.eps_m)) shift = 0.0;
  out.rhs = (shift + c.lips.lambda1 * eps_pi) / (1.0 - gamma);
  if (c.lips.lambda1 == 0.0) out.rhs = shift / (1.0 - gamma);
  out.satisfied = out.lhs <= out.rhs + kBoundSlack;
  return out;
}

LipschitzConstants SuiteLipschitz(const TabularMdp& m1, const TabularMdp& m2,
                                  double lambda2_1, double lambda2_2) {
  LipschitzConstants lips;
  lips.lambda1 = m1.reward_lipschitz().value_or(kInf);
  lips.lambda2 = std::max(lambda2_1, lambda2_2);
  lips.r_max = std::max(m1.r_max(), m2.r_max());
  return lips;
}

PolicyTable RandomPolicy(int n_states, int n_actions, Rng& rng) {
  std::vector<double> probs(static_cast<std::size_t>(n_states) * n_actions);
  for (int s = 0; s < n_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      double u = rng.Uniform();
      while (u <= 0.0) u = rng.Uniform();
      probs[s * n_actions + a] = -std::log(u);
      sum += probs[s * n_actions + a];
    }
    for (int a = 0; a < n_actions; ++a) probs[s * n_actions + a] /= sum;
  }
  return PolicyTable(n_states, n_actions, std::move(probs));
}

}  // namespace

std::vector<double> SmoothDistribution(std::span<const double> p) {
  std::vector<double> out(p.begin(), p.end());
  double sum = 0.0;
  for (double& x : out) {
    Require(std::isfinite(x) && x >= 0.0, ErrorCode::kDomain,
            "distribution entries must be finite and nonnegative");
    x += kSupportSmoothing;
    sum += x;
  }
  for (double& x : out) x /= sum;
  return out;
}

double SmoothedKl(std::span<const double> p, std::span<const double> q) {
  Require(p.size() == q.size() && !p.empty(), ErrorCode::kStructural,
          "KL arguments must have the same nonzero size");
  const std::vector<double> ps = SmoothDistribution(p);
  const std::vector<double> qs = SmoothDistribution(q);
  double kl = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) kl += ps[i] * std::log(ps[i] / qs[i]);
  return std::max(0.0, kl);
}

double occupancy_kl(const OccupancyVector& d1, const OccupancyVector& d2) {
  return SmoothedKl(d1.d(), d2.d());
}

double wasserstein1_discrete(std::span<const double> p,
                             std::span<const double> q,
                             std::span<const double> cost) {
  const int n = static_cast<int>(p.size());
  const int m = static_cast<int>(q.size());
  Require(n > 0 && m > 0, ErrorCode::kInvalidArgument,
          "wasserstein1_discrete: empty distribution");
  Require(cost.size() == static_cast<std::size_t>(n) * m,
          ErrorCode::kInvalidArgument, "wasserstein1_discrete: cost has wrong size");
  double mass_p = 0.0, mass_q = 0.0;
  for (double x : p) {
    Require(std::isfinite(x) && x >= 0.0, ErrorCode::kInvalidArgument,
            "wasserstein1_discrete: negative mass");
    mass_p += x;
  }
  for (double x : q) {
    Require(std::isfinite(x) && x >= 0.0, ErrorCode::kInvalidArgument,
            "wasserstein1_discrete: negative mass");
    mass_q += x;
  }
  Require(std::abs(mass_p - mass_q) <= 1e-9, ErrorCode::kInvalidArgument,
          "wasserstein1_discrete: masses differ");
  for (double c : cost) {
    Require(std::isfinite(c) && c >= 0.0, ErrorCode::kInvalidArgument,
            "wasserstein1_discrete: cost entries must be finite and >= 0");
  }

  // Nodes: source, n supply nodes, m demand nodes, sink.
  const int source = 0;
  const int sink = n + m + 1;
  const int n_nodes = n + m + 2;
  std::vector<FlowEdge> edges;
  std::vector<std::vector<int>> adj(n_nodes);
  auto add_edge = [&](int u, int v, double cap, double c) {
    adj[u].push_back(static_cast<int>(edges.size()));
    edges.push_back({v, cap, c});
    adj[v].push_back(static_cast<int>(edges.size()));
    edges.push_back({u, 0.0, -c});
  };
  for (int i = 0; i < n; ++i) add_edge(source, 1 + i, p[i], 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) add_edge(1 + i, 1 + n + j, kInf, cost[i * m + j]);
  }
  for (int j = 0; j < m; ++j) add_edge(1 + n + j, sink, q[j], 0.0);

  double remaining = std::min(mass_p, mass_q);
  double total = 0.0;
  std::vector<double> dist(n_nodes);
  std::vector<int> via(n_nodes);
  while (remaining > kFlowEps) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(via.begin(), via.end(), -1);
    dist[source] = 0.0;
    for (int round = 0; round < n_nodes; ++round) {
      bool relaxed = false;
      for (int u = 0; u < n_nodes; ++u) {
        if (dist[u] == kInf) continue;
        for (int e : adj[u]) {
          if (edges[e].cap <= kFlowEps) continue;
          const double nd = dist[u] + edges[e].cost;
          if (nd < dist[edges[e].to] - 1e-15) {
            dist[edges[e].to] = nd;
            via[edges[e].to] = e;
            relaxed = true;
          }
        }
      }
      if (!relaxed) break;
    }
    if (dist[sink] == kInf) break;
    double push = remaining;
    for (int v = sink; v != source; v = edges[via[v] ^ 1].to) {
      push = std::min(push, edges[via[v]].cap);
    }
    for (int v = sink; v != source; v = edges[via[v] ^ 1].to) {
      edges[via[v]].cap -= push;
      edges[via[v] ^ 1].cap += push;
    }
    total += push * dist[sink];
    remaining -= push;
  }
  return std::max(0.0, total);
}

std::vector<double> ActionCostMatrix(const TabularMdp& m) {
  Require(m.has_action_coords(), ErrorCode::kDomain,
          "action cost matrix requires action_coords");
  const int na = m.n_actions();
  std::vector<double> cost(static_cast<std::size_t>(na) * na, 0.0);
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < na; ++b) {
      auto x = m.action_coord(a);
      auto y = m.action_coord(b);
      double d = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) d += std::abs(x[k] - y[k]);
      cost[a * na + b] = d;
    }
  }
  return cost;
}

std::string ToString(Theorem theorem) {
  switch (theorem) {
    case Theorem::kValueGap:
      return "value_gap";
    case Theorem::kOccupancyEquality:
      return "occupancy_equality";
    case Theorem::kPerformanceBound:
      return "performance_bound";
    case Theorem::kWasserstein:
      return "wasserstein";
  }
  return "unknown";
}

std::string PairPremises::summary() const {
  std::string out;
  for (const std::string& note : notes) {
    if (!out.empty()) out += "; ";
    out += note;
  }
  return out;
}

PairPremises CheckPairPremises(const TabularMdp& m1, const TabularMdp& m2,
                               const LipschitzConstants& lips) {
  RequireSameSpaces(m1, m2);
  PairPremises p;
  p.homomorphous = is_homomorphous(m1, m2);
  if (!p.homomorphous) p.notes.push_back("members are not homomorphous");
  p.deterministic = m1.is_deterministic() && m2.is_deterministic();
  if (!p.deterministic) p.notes.push_back("dynamics are stochastic");
  p.coords = m1.has_state_coords() && m1.has_action_coords() &&
             m2.has_state_coords() && m2.has_action_coords();
  if (!p.coords) p.notes.push_back("state or action coordinates missing");
  p.state_action_reward = RewardIgnoresNextState(m1) && RewardIgnoresNextState(m2);
  if (!p.state_action_reward) p.notes.push_back("reward depends on the next state");
  p.bounded_actions = p.coords && ActionDiameter(m1) <= 2.0 + 1e-12;
  if (!p.bounded_actions) p.notes.push_back("action L1 diameter exceeds 2");
  if (p.coords) {
    const double slope = std::max(discrete_reward_lipschitz(m1),
                                  discrete_reward_lipschitz(m2));
    p.lambda1_valid = std::isfinite(lips.lambda1) && lips.lambda1 >= slope - 1e-12;
  }
  if (!p.lambda1_valid) p.notes.push_back("lambda1 is missing or below the reward slope");
  if (p.coords && p.deterministic) {
    const double exact = std::max(exact_inverse_lipschitz(m1), exact_inverse_lipschitz(m2));
    p.lambda2_valid = std::isfinite(exact) && std::isfinite(lips.lambda2) &&
                      lips.lambda2 >= exact - 1e-12;
  }
  if (!p.lambda2_valid) p.notes.push_back("lambda2 is infinite or below the exact constant");
  return p;
}

MemberSolution SolveMember(const TabularMdp& m) {
  OptimalSolution opt = solve_optimal(m);
  OccupancyVector occ = occupancy(m, opt.policy);
  double gap = kInfiniteGap;
  const int na = m.n_actions();
  for (int s = 0; s < m.n_states(); ++s) {
    const int best = opt.policy.deterministic_action(s);
    for (int a = 0; a < na; ++a) {
      if (a != best) {
        gap = std::min(gap, opt.values.Q(s, best, na) - opt.values.Q(s, a, na));
      }
    }
  }
  return {std::move(opt), std::move(occ), gap};
}

std::optional<PolicyTable> MatchedPolicy(const TabularMdp& m1,
                                         const TabularMdp& m2,
                                         const PolicyTable& target_policy) {
  RequireSameSpaces(m1, m2);
  Require(m1.is_deterministic() && m2.is_deterministic(), ErrorCode::kDomain,
          "matched policy requires deterministic members");
  std::vector<int> actions(m1.n_states());
  for (int s = 0; s < m1.n_states(); ++s) {
    const int a_target = target_policy.deterministic_action(s);
    Require(a_target >= 0, ErrorCode::kDomain,
            "matched policy requires a deterministic target policy");
    const int goal = m2.successor(s, a_target);
    int found = -1;
    for (int a = 0; a < m1.n_actions() && found < 0; ++a) {
      if (m1.successor(s, a) == goal) found = a;
    }
    if (found < 0) return std::nullopt;
    actions[s] = found;
  }
  return PolicyTable::Deterministic(m1.n_actions(), actions);
}

TheoremCheck verify_value_gap_lemma(const TabularMdp& m1, const TabularMdp& m2,
                                    const LipschitzConstants& lips) {
  const MemberSolution s1 = SolveMember(m1), s2 = SolveMember(m2);
  const PairContext c{m1, m2, s1, s2, CheckPairPremises(m1, m2, lips),
                      SafeDynamicsDistance(m1, m2), lips};
  return ValueGap(c);
}

TheoremCheck verify_occupancy_equality(const TabularMdp& m1,
                                       const TabularMdp& m2,
                                       const LipschitzConstants& lips) {
  const MemberSolution s1 = SolveMember(m1), s2 = SolveMember(m2);
  const PairContext c{m1, m2, s1, s2, CheckPairPremises(m1, m2, lips),
                      SafeDynamicsDistance(m1, m2), lips};
  return OccupancyEquality(c);
}

TheoremCheck verify_performance_bound(const TabularMdp& m1,
                                      const TabularMdp& m2,
                                      const PolicyTable& pi_hat,
                                      const LipschitzConstants& lips) {
  const MemberSolution s1 = SolveMember(m1), s2 = SolveMember(m2);
  const PairContext c{m1, m2, s1, s2, CheckPairPremises(m1, m2, lips),
                      SafeDynamicsDistance(m1, m2), lips};
  return PerformanceBound(c, pi_hat, "given");
}

TheoremCheck verify_wasserstein_lemma(const TabularMdp& m1,
                                      const TabularMdp& m2,
                                      const LipschitzConstants& lips) {
  const MemberSolution s1 = SolveMember(m1), s2 = SolveMember(m2);
  const PairContext c{m1, m2, s1, s2, CheckPairPremises(m1, m2, lips),
                      SafeDynamicsDistance(m1, m2), lips};
  double eps_pi = 0.0;
  return Wasserstein(c, &eps_pi);
}

std::vector<TheoryReport> generate_report_suite(const HipMdpFamily& family,
                                                const SuiteOptions& options) {
  Require(options.n_pairs > 0 && options.n_random_policies >= 0,
          ErrorCode::kInvalidArgument,
          "report suite: n_pairs must be positive, n_random_policies >= 0");
  const int k = family.size();
  std::vector<std::pair<int, int>> pairs;
  if (k == 1) {
    pairs.assign(options.n_pairs, {0, 0});
  } else {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i != j) pairs.emplace_back(i, j);
      }
    }
    Rng rng(options.seed, "report_pairs");
    for (int i = static_cast<int>(pairs.size()) - 1; i > 0; --i) {
      std::swap(pairs[i], pairs[rng.UniformInt(i + 1)]);
    }
    if (static_cast<int>(pairs.size()) > options.n_pairs) pairs.resize(options.n_pairs);
  }

  std::vector<std::optional<MemberSolution>> solved(k);
  std::vector<double> lambda2(k, kNaN);
  auto member = [&](int i) -> const MemberSolution& {
    if (!solved[i]) {
      const TabularMdp& m = family.member(i);
      solved[i] = SolveMember(m);
      lambda2[i] = (m.is_deterministic() && m.has_state_coords() && m.has_action_coords())
                       ? exact_inverse_lipschitz(m)
                       : kInf;
    }
    return *solved[i];
  };

  std::vector<TheoryReport> reports;
  reports.reserve(pairs.size());
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    const auto [a, b] = pairs[idx];
    const TabularMdp& m1 = family.member(a);
    const TabularMdp& m2 = family.member(b);
    TheoryReport rep;
    rep.pair_id = std::to_string(a) + "-" + std::to_string(b);
    if (k == 1) rep.pair_id += "#" + std::to_string(idx);
    rep.member_a = a;
    rep.member_b = b;
    rep.seed = options.seed;
    try {
      const MemberSolution& s1 = member(a);
      const MemberSolution& s2 = member(b);
      rep.lipschitz = SuiteLipschitz(m1, m2, lambda2[a], lambda2[b]);
      const PairContext c{m1, m2, s1, s2, CheckPairPremises(m1, m2, rep.lipschitz),
                          SafeDynamicsDistance(m1, m2), rep.lipschitz};
      rep.eps_m = c.eps_m;
      rep.delta = std::min(s1.action_gap, s2.action_gap);
      if (c.premises.deterministic && m1.has_state_coords()) {
        for (int s = 0; s < m1.n_states(); ++s) {
          const int act = s2.optimal.policy.deterministic_action(s);
          auto x = m1.state_coord(m1.successor(s, act));
          auto y = m2.state_coord(m2.successor(s, act));
          double d = 0.0;
          for (std::size_t q = 0; q < x.size(); ++q) d += (x[q] - y[q]) * (x[q] - y[q]);
          rep.pointwise_eps = std::max(rep.pointwise_eps, std::sqrt(d));
        }
      } else {
        rep.pointwise_eps = kNaN;
      }

      rep.checks.push_back(ValueGap(c));
      rep.checks.push_back(OccupancyEquality(c));
      rep.checks.push_back(PerformanceBound(c, s2.optimal.policy, "transplanted", &rep.eps_s));
      rep.checks.push_back(
          PerformanceBound(c, PolicyTable::Uniform(m1.n_states(), m1.n_actions()), "uniform"));
      Rng rng(options.seed, "report_policies:" + rep.pair_id);
      for (int r = 0; r < options.n_random_policies; ++r) {
        rep.checks.push_back(PerformanceBound(
            c, RandomPolicy(m1.n_states(), m1.n_actions(), rng), "random-" + std::to_string(r)));
      }
      rep.checks.push_back(Wasserstein(c, &rep.eps_pi));
    } catch (const Error& e) {
      TheoremCheck failed;
      failed.label = "error";
      failed.premise_holds = false;
      failed.premise_note = e.what();
      failed.lhs = kNaN;
      failed.rhs = kNaN;
      rep.checks.push_back(failed);
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::vector<TheoremTally> TallyReports(const std::vector<TheoryReport>& reports) {
  std::vector<TheoremTally> tallies;
  for (Theorem t : {Theorem::kValueGap, Theorem::kOccupancyEquality,
                    Theorem::kPerformanceBound, Theorem::kWasserstein}) {
    TheoremTally tally;
    tally.theorem = ToString(t);
    for (const TheoryReport& rep : reports) {
      for (const TheoremCheck& c : rep.checks) {
        if (c.theorem != t || c.label == "error") continue;
        if (!c.premise_holds) {
          ++tally.premise_unmet;
        } else {
          ++tally.premise_holding;
          if (c.satisfied) ++tally.satisfied;
        }
      }
    }
    tallies.push_back(tally);
  }
  return tallies;
}

}  // namespace srpo
