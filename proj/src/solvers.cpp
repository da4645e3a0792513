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

#include "srpolab/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "srpolab/error.hpp"
#include "srpolab/rng.hpp"

namespace srpo {
namespace {

constexpr double kRowTol = 1e-12;
constexpr int kMaxPolishSteps = 1000;

void CheckPolicyShape(const TabularMdp& m, const PolicyTable& pi) {
  Require(pi.n_states() == m.n_states() && pi.n_actions() == m.n_actions(),
          ErrorCode::kStructural, "policy shape does not match the MDP");
}

double SupDiff(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

// P_pi as a dense matrix and r_pi as a vector.
void PolicyMarkovChain(const TabularMdp& m, const PolicyTable& pi,
                       Eigen::MatrixXd* p, Eigen::VectorXd* r) {
  const int n = m.n_states();
  p->setZero(n, n);
  r->setZero(n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < m.n_actions(); ++a) {
      const double w = pi.prob(s, a);
      if (w == 0.0) continue;
      for (const Successor& e : m.successors(s, a)) {
        (*p)(s, e.next_state) += w * e.prob;
        (*r)(s) += w * e.prob * e.reward;
      }
    }
  }
}

std::vector<double> SolveChecked(const Eigen::MatrixXd& a,
                                 const Eigen::VectorXd& b, const char* what,
                                 double* residual_out) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::VectorXd x = lu.solve(b);
  const double residual = (a * x - b).lpNorm<Eigen::Infinity>();
  if (!std::isfinite(residual) || residual > kLinearResidualTol) {
    Fail(ErrorCode::kNumerical, std::string(what) +
                                    ": linear-solve residual " +
                                    std::to_string(residual) + " exceeds 1e-8");
  }
  if (residual_out != nullptr) *residual_out = residual;
  return {x.data(), x.data() + x.size()};
}

int ArgmaxLowest(std::span<const double> row) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(row.size()); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

}  // namespace

PolicyTable::PolicyTable(int n_states, int n_actions, std::vector<double> probs)
    : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
  Require(n_states_ > 0 && n_actions_ > 0, ErrorCode::kInvalidArgument,
          "policy dimensions must be positive");
  Require(probs_.size() == static_cast<std::size_t>(n_states_) * n_actions_,
          ErrorCode::kInvalidArgument, "policy table has wrong size");
  for (int s = 0; s < n_states_; ++s) {
    double sum = 0.0;
    for (int a = 0; a < n_actions_; ++a) {
      const double p = probs_[Index(s, a)];
      Require(p >= 0.0 && p <= 1.0, ErrorCode::kInvalidArgument,
              "policy entries must lie in [0, 1]");
      sum += p;
    }
    Require(std::abs(sum - 1.0) <= kRowTol, ErrorCode::kInvalidArgument,
            "policy row " + std::to_string(s) + " does not sum to 1");
  }
}

PolicyTable PolicyTable::Uniform(int n_states, int n_actions) {
  Require(n_actions > 0, ErrorCode::kInvalidArgument,
          "policy dimensions must be positive");
  return PolicyTable(n_states, n_actions,
                     std::vector<double>(static_cast<std::size_t>(n_states) *
                                             n_actions,
                                         1.0 / n_actions));
}

PolicyTable PolicyTable::Deterministic(int n_actions,
                                       std::span<const int> actions) {
  const int n_states = static_cast<int>(actions.size());
  std::vector<double> probs(static_cast<std::size_t>(n_states) * n_actions, 0.0);
  for (int s = 0; s < n_states; ++s) {
    Require(actions[s] >= 0 && actions[s] < n_actions,
            ErrorCode::kInvalidArgument, "action index out of range");
    probs[static_cast<std::size_t>(s) * n_actions + actions[s]] = 1.0;
  }
  return PolicyTable(n_states, n_actions, std::move(probs));
}

int PolicyTable::deterministic_action(int s) const {
  for (int a = 0; a < n_actions_; ++a) {
    if (probs_[Index(s, a)] == 1.0) return a;
  }
  return -1;
}

OccupancyVector::OccupancyVector(std::vector<double> d, double gamma)
    : d_(std::move(d)), gamma_(gamma) {
  double sum = 0.0;
  for (double x : d_) {
    Require(std::isfinite(x) && x >= 0.0, ErrorCode::kInvalidArgument,
            "occupancy entries must be nonnegative");
    sum += x;
  }
  Require(std::abs(sum - 1.0) <= 1e-9, ErrorCode::kInvalidArgument,
          "occupancy must sum to 1");
}

std::vector<double> q_from_v(const TabularMdp& m, std::span<const double> v) {
  const int n_actions = m.n_actions();
  std::vector<double> q(static_cast<std::size_t>(m.n_states()) * n_actions);
  for (int s = 0; s < m.n_states(); ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double acc = 0.0;
      for (const Successor& e : m.successors(s, a)) {
        acc += e.prob * (e.reward + m.gamma() * v[e.next_state]);
      }
      q[static_cast<std::size_t>(s) * n_actions + a] = acc;
    }
  }
  return q;
}

ValueTable value_iteration(const TabularMdp& m, double tol, int max_iters) {
  Require(tol > 0.0 && max_iters > 0, ErrorCode::kInvalidArgument,
          "value_iteration: tol and max_iters must be positive");
  const int n = m.n_states();
  const int n_actions = m.n_actions();
  std::vector<double> v(n, 0.0), next(n);
  double residual = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const std::vector<double> q = q_from_v(m, v);
    for (int s = 0; s < n; ++s) {
      next[s] = *std::max_element(q.begin() + s * n_actions,
                                  q.begin() + (s + 1) * n_actions);
    }
    residual = SupDiff(next, v);
    v.swap(next);
    if (residual <= tol) {
      ValueTable vt;
      vt.q = q_from_v(m, v);
      vt.v.resize(n);
      for (int s = 0; s < n; ++s) {
        vt.v[s] = *std::max_element(vt.q.begin() + s * n_actions,
                                    vt.q.begin() + (s + 1) * n_actions);
      }
      vt.kind = ValueKind::kHard;
      vt.tol_used = tol;
      vt.iterations = it;
      vt.residual = SupDiff(vt.v, v);
      return vt;
    }
  }
  throw ConvergenceError("value_iteration did not converge", residual,
                         max_iters);
}

PolicyTable greedy_policy(const ValueTable& vt, int n_actions) {
  Require(vt.kind == ValueKind::kHard, ErrorCode::kInvalidArgument,
          "greedy_policy expects hard values");
  Require(n_actions > 0 && !vt.q.empty() && vt.q.size() % n_actions == 0,
          ErrorCode::kInvalidArgument, "greedy_policy: q has wrong shape");
  const int n_states = static_cast<int>(vt.q.size() / n_actions);
  std::vector<int> actions(n_states);
  for (int s = 0; s < n_states; ++s) {
    actions[s] = ArgmaxLowest(
        {vt.q.data() + static_cast<std::size_t>(s) * n_actions,
         static_cast<std::size_t>(n_actions)});
  }
  return PolicyTable::Deterministic(n_actions, actions);
}

ValueTable soft_value_iteration(const TabularMdp& m, double tol,
                                int max_iters) {
  Require(tol > 0.0 && max_iters > 0, ErrorCode::kInvalidArgument,
          "soft_value_iteration: tol and max_iters must be positive");
  const int n = m.n_states();
  const int n_actions = m.n_actions();
  std::vector<double> w(n, 0.0), next(n);
  std::vector<double> q(static_cast<std::size_t>(n) * n_actions);

  auto backup = [&](const std::vector<double>& cur) {
    for (int s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < n_actions; ++a) {
        auto succ = m.successors(s, a);
        double peak = -std::numeric_limits<double>::infinity();
        for (const Successor& e : succ) {
          peak = std::max(peak, e.reward + m.gamma() * cur[e.next_state]);
        }
        double acc = 0.0;
        for (const Successor& e : succ) {
          acc += e.prob * std::exp(e.reward + m.gamma() * cur[e.next_state] - peak);
        }
        const double qa = peak + std::log(acc);
        q[static_cast<std::size_t>(s) * n_actions + a] = qa;
        best = std::max(best, qa);
      }
      next[s] = best;
    }
  };

  double residual = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    backup(w);
    residual = SupDiff(next, w);
    w.swap(next);
    if (!std::isfinite(residual)) {
      Fail(ErrorCode::kNumerical, "soft_value_iteration produced non-finite values");
    }
    if (residual <= tol) {
      backup(w);
      ValueTable vt;
      vt.v = next;
      vt.q = q;
      vt.kind = ValueKind::kSoft;
      vt.tol_used = tol;
      vt.iterations = it;
      vt.residual = SupDiff(next, w);
      return vt;
    }
  }
  throw ConvergenceError("soft_value_iteration did not converge", residual,
                         max_iters);
}

ValueTable policy_evaluation(const TabularMdp& m, const PolicyTable& pi) {
  CheckPolicyShape(m, pi);
  Eigen::MatrixXd p;
  Eigen::VectorXd r;
  PolicyMarkovChain(m, pi, &p, &r);
  const int n = m.n_states();
  const Eigen::MatrixXd a =
      Eigen::MatrixXd::Identity(n, n) - m.gamma() * p;
  ValueTable vt;
  vt.v = SolveChecked(a, r, "policy_evaluation", &vt.residual);
  vt.kind = ValueKind::kHard;
  return vt;
}

OccupancyVector occupancy(const TabularMdp& m, const PolicyTable& pi) {
  CheckPolicyShape(m, pi);
  Eigen::MatrixXd p;
  Eigen::VectorXd r;
  PolicyMarkovChain(m, pi, &p, &r);
  const int n = m.n_states();
  const Eigen::MatrixXd a =
      Eigen::MatrixXd::Identity(n, n) - m.gamma() * p.transpose();
  Eigen::VectorXd b(n);
  for (int s = 0; s < n; ++s) b(s) = (1.0 - m.gamma()) * m.rho0()[s];
  double residual = 0.0;
  std::vector<double> d = SolveChecked(a, b, "occupancy", &residual);
  for (double& x : d) {
    if (x < 0.0) {
      Require(x > -kLinearResidualTol, ErrorCode::kNumerical,
              "occupancy: solve produced a negative entry");
      x = 0.0;
    }
  }
  OccupancyVector occ(std::move(d), m.gamma());
  occ.set_residual(residual);
  return occ;
}

double expected_return_occupancy_form(const TabularMdp& m,
                                      const PolicyTable& pi) {
  const OccupancyVector d = occupancy(m, pi);
  double acc = 0.0;
  for (int s = 0; s < m.n_states(); ++s) {
    if (d[s] == 0.0) continue;
    for (int a = 0; a < m.n_actions(); ++a) {
      const double w = d[s] * pi.prob(s, a);
      if (w == 0.0) continue;
      acc += w * m.expected_reward(s, a);
    }
  }
  return acc / (1.0 - m.gamma());
}

double expected_return(const TabularMdp& m, const PolicyTable& pi) {
  const ValueTable vt = policy_evaluation(m, pi);
  double eta = 0.0;
  for (int s = 0; s < m.n_states(); ++s) eta += m.rho0()[s] * vt.v[s];
  const double other = expected_return_occupancy_form(m, pi);
  if (std::abs(eta - other) > 1e-8 * std::max(1.0, std::abs(eta))) {
    Fail(ErrorCode::kNumerical,
         "expected_return: evaluation and occupancy forms disagree");
  }
  return eta;
}

OptimalSolution solve_optimal(const TabularMdp& m) {
  const int n_actions = m.n_actions();
  const ValueTable vi = value_iteration(m);
  PolicyTable policy = greedy_policy(vi, n_actions);
  std::vector<int> actions(m.n_states());
  for (int s = 0; s < m.n_states(); ++s) actions[s] = policy.deterministic_action(s);

  ValueTable exact;
  for (int step = 0;; ++step) {
    Require(step < kMaxPolishSteps, ErrorCode::kConvergence,
            "solve_optimal: policy iteration did not stabilize");
    exact = policy_evaluation(m, policy);
    exact.q = q_from_v(m, exact.v);
    bool changed = false;
    for (int s = 0; s < m.n_states(); ++s) {
      const double* row = exact.q.data() + static_cast<std::size_t>(s) * n_actions;
      const double cur = row[actions[s]];
      const double margin = 1e-12 * (1.0 + std::abs(cur));
      int best = actions[s];
      for (int a = 0; a < n_actions; ++a) {
        if (row[a] > row[best] + margin) best = a;
      }
      if (best != actions[s]) {
        actions[s] = best;
        changed = true;
      }
    }
    if (!changed) break;
    policy = PolicyTable::Deterministic(n_actions, actions);
  }

  // Among numerically tied optimal actions prefer the lowest index.
  bool retie = false;
  for (int s = 0; s < m.n_states(); ++s) {
    const double* row = exact.q.data() + static_cast<std::size_t>(s) * n_actions;
    const double top = *std::max_element(row, row + n_actions);
    const double margin = 1e-12 * (1.0 + std::abs(top));
    for (int a = 0; a < actions[s]; ++a) {
      if (row[a] >= top - margin) {
        actions[s] = a;
        retie = true;
        break;
      }
    }
  }
  if (retie) {
    policy = PolicyTable::Deterministic(n_actions, actions);
    exact = policy_evaluation(m, policy);
    exact.q = q_from_v(m, exact.v);
  }
  exact.kind = ValueKind::kHard;
  exact.tol_used = vi.tol_used;
  exact.iterations = vi.iterations;
  return {std::move(exact), std::move(policy)};
}

std::vector<Trajectory> sample_trajectories(const TabularMdp& m,
                                            const PolicyTable& pi, int n,
                                            int horizon,
                                            std::uint64_t rng_seed,
                                            int theta_idx) {
  CheckPolicyShape(m, pi);
  Require(n > 0 && horizon > 0, ErrorCode::kInvalidArgument,
          "sample_trajectories: n and horizon must be positive");
  std::vector<char> terminal(m.n_states());
  for (int s = 0; s < m.n_states(); ++s) terminal[s] = m.is_terminal(s);

  Rng rng(rng_seed, "sample_trajectories");
  std::vector<Trajectory> out(n);
  for (Trajectory& traj : out) {
    traj.reserve(horizon);
    int s = rng.Categorical(m.rho0());
    for (int t = 0; t < horizon; ++t) {
      const int a = rng.Categorical(pi.row(s));
      auto succ = m.successors(s, a);
      const double u = rng.Uniform();
      double acc = 0.0;
      const Successor* pick = &succ.back();
      for (const Successor& e : succ) {
        acc += e.prob;
        if (u < acc) {
          pick = &e;
          break;
        }
      }
      traj.push_back({s, a, pick->reward, pick->next_state, theta_idx,
                      terminal[pick->next_state] != 0, std::nullopt});
      s = pick->next_state;
    }
  }
  return out;
}

}  // namespace srpo
