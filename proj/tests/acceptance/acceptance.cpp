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


// Acceptance run: one PASS/FAIL line per criterion, with its measurement,
// runtime and runtime limit. Exit status is 0 only if every line passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../unit/test_helpers.hpp"
#include "srpolab/density.hpp"
#include "srpolab/envs.hpp"
#include "srpolab/experiments.hpp"
#include "srpolab/io.hpp"
#include "srpolab/learner.hpp"
#include "srpolab/rng.hpp"
#include "srpolab/solvers.hpp"
#include "srpolab/theory.hpp"

namespace srpo {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;  // <= 0 means no limit
  std::function<Outcome()> body;
};

std::string Fmt(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

// Truncated power series for the occupancy of pi, stopped once the
// remaining geometric tail gamma^t falls below 1e-10.
std::vector<double> PowerSeriesOccupancy(const TabularMdp& m, const PolicyTable& pi) {
  const int n = m.n_states();
  std::vector<double> d(n, 0.0), mass(m.rho0().begin(), m.rho0().end()), next(n);
  double weight = 1.0;
  while (weight >= 1e-10) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < n; ++s) {
      d[s] += (1.0 - m.gamma()) * weight * mass[s];
      for (int a = 0; a < m.n_actions(); ++a) {
        const double w = mass[s] * pi.prob(s, a);
        if (w == 0.0) continue;
        for (int sp = 0; sp < n; ++sp) next[sp] += w * m.p(s, a, sp);
      }
    }
    mass.swap(next);
    weight *= m.gamma();
  }
  return d;
}

PolicyTable RandomPolicy(int n_states, int n_actions, Rng& rng) {
  std::vector<double> probs(static_cast<std::size_t>(n_states) * n_actions);
  for (int s = 0; s < n_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      const double w = -std::log(1.0 - rng.Uniform());
      probs[static_cast<std::size_t>(s) * n_actions + a] = w;
      sum += w;
    }
    for (int a = 0; a < n_actions; ++a) probs[static_cast<std::size_t>(s) * n_actions + a] /= sum;
  }
  return PolicyTable(n_states, n_actions, std::move(probs));
}

Outcome OccupancyExactness() {
  double worst = 0.0;
  Rng rng(2026, "acceptance:occupancy");
  for (unsigned i = 0; i < 50; ++i) {
    const double gamma = 0.5 + 0.49 * rng.Uniform();
    const TabularMdp m = testing::RandomMdp(8, 3, gamma, 100 + i, i % 2 == 0 ? 0 : 3);
    const PolicyTable pi = RandomPolicy(8, 3, rng);
    const OccupancyVector d = occupancy(m, pi);
    const std::vector<double> oracle = PowerSeriesOccupancy(m, pi);
    for (int s = 0; s < 8; ++s) worst = std::max(worst, std::abs(d[s] - oracle[s]));
  }
  return {worst <= 1e-8, "50 MDPs, max L_inf error " + Fmt("%.3g", worst) + " (tol 1e-8)"};
}

Outcome KlIdentity() {
  const TabularMdp m = testing::RandomMdp(5, 2, 0.8, 22);
  const PolicyTable pi = PolicyTable::Uniform(5, 2);
  const OccupancyVector zeta({0.4, 0.25, 0.15, 0.1, 0.1}, 0.8);
  const KlIdentityResult r = kl_identity_check(m, pi, zeta, 200000, 6);
  const double z = std::abs(r.rollout_estimate - r.direct_kl) / r.standard_error;
  return {z <= 3.0, "direct " + Fmt("%.6f", r.direct_kl) + ", rollout " +
                        Fmt("%.6f", r.rollout_estimate) + ", |diff| = " + Fmt("%.2f", z) +
                        " SE (tol 3)"};
}

std::vector<int> Draw(const std::vector<double>& p, int n, std::uint64_t seed) {
  Rng rng(seed, "acceptance:draw");
  std::vector<int> out(n);
  for (int& x : out) x = rng.Categorical(p);
  return out;
}

Outcome RatioRecovery() {
  const std::vector<double> p = {0.2, 0.15, 0.12, 0.1, 0.1, 0.08, 0.08, 0.07, 0.06, 0.04};
  const std::vector<double> q = {0.05, 0.07, 0.08, 0.1, 0.1, 0.12, 0.12, 0.13, 0.13, 0.1};
  const std::vector<int> real = Draw(p, 20000, 1);
  const std::vector<int> fake = Draw(q, 20000, 2);
  const SrpoConfig cfg;
  const Discriminator d = train_discriminator(real, fake, FeatureMap::OneHot(10), cfg, 3);
  double worst = 0.0;
  int checked = 0;
  for (int k = 0; k < 10; ++k) {
    if (std::min(p[k], q[k]) < 0.05) continue;
    const double nr = static_cast<double>(std::count(real.begin(), real.end(), k));
    const double nf = static_cast<double>(std::count(fake.begin(), fake.end(), k));
    const double optimum = nr / nf;
    worst = std::max(worst, std::abs(density_ratio(d, k, cfg.ratio_clip) / optimum - 1.0));
    ++checked;
  }
  return {worst <= 0.10, std::to_string(checked) + " states, max relative error " +
                             Fmt("%.4f", worst) + " (tol 0.10)"};
}

// Ordered pairs of deterministic homomorphous pendulum members over several
// action costs.
struct PairPool {
  std::vector<HipMdpFamily> families;
  std::vector<std::pair<const TabularMdp*, const TabularMdp*>> pairs;
};

const PairPool& Pool() {
  static const PairPool pool = [] {
    PairPool p;
    for (double cost : {0.0, 0.05, 0.1, 0.5}) {
      EnvSpec spec;
      spec.kind = EnvKind::kPendulum;
      spec.dynamics_params = {2, 4, 6, 8, 10, 12, 14, 16};
      spec.action_cost_coeff = cost;
      p.families.push_back(make_family(spec));
    }
    for (const HipMdpFamily& fam : p.families) {
      for (int i = 0; i < fam.size(); ++i) {
        for (int j = 0; j < fam.size(); ++j) {
          if (i != j) p.pairs.emplace_back(&fam.member(i), &fam.member(j));
        }
      }
    }
    return p;
  }();
  return pool;
}

Outcome ValueGap() {
  const auto& pairs = Pool().pairs;
  const std::size_t n = std::min<std::size_t>(200, pairs.size());
  int ok = 0, premise = 0;
  double slack = INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    // Spread the 200 picks across the pool.
    const auto& [m1, m2] = pairs[k * pairs.size() / n];
    const TheoremCheck c = verify_value_gap_lemma(*m1, *m2, pair_lipschitz(*m1, *m2));
    premise += c.premise_holds;
    ok += c.premise_holds && c.satisfied;
    slack = std::min(slack, c.rhs - c.lhs);
  }
  return {ok == static_cast<int>(n) && n == 200,
          std::to_string(ok) + "/" + std::to_string(n) + " satisfied (premise " +
              std::to_string(premise) + "), min slack " + Fmt("%.3g", slack)};
}

Outcome OccupancyEquality() {
  const auto& pairs = Pool().pairs;
  int premise = 0, counterexamples = 0;
  double worst = 0.0;
  for (const auto& [m1, m2] : pairs) {
    const TheoremCheck c = verify_occupancy_equality(*m1, *m2, pair_lipschitz(*m1, *m2));
    if (!c.premise_holds) continue;
    ++premise;
    worst = std::max(worst, c.lhs);
    counterexamples += !c.satisfied;
  }
  return {pairs.size() >= 100 && premise > 0 && counterexamples == 0,
          std::to_string(pairs.size()) + " pairs, premise holds on " + std::to_string(premise) +
              ", counterexamples " + std::to_string(counterexamples) + ", max L_inf " +
              Fmt("%.3g", worst) + " (tol 1e-8)"};
}

Outcome PerformanceBound() {
  const auto& pairs = Pool().pairs;
  const std::size_t n = 100;
  int checks = 0, ok = 0;
  Rng rng(7, "acceptance:performance");
  for (std::size_t k = 0; k < n; ++k) {
    const auto& [m1, m2] = pairs[k * pairs.size() / n];
    const LipschitzConstants lips = pair_lipschitz(*m1, *m2);
    std::vector<PolicyTable> candidates = {
        solve_optimal(*m2).policy, PolicyTable::Uniform(m1->n_states(), m1->n_actions())};
    for (int r = 0; r < 20; ++r) {
      candidates.push_back(RandomPolicy(m1->n_states(), m1->n_actions(), rng));
    }
    for (const PolicyTable& pi : candidates) {
      const TheoremCheck c = verify_performance_bound(*m1, *m2, pi, lips);
      ++checks;
      ok += c.premise_holds && c.satisfied;
    }
  }
  return {ok == checks,
          std::to_string(ok) + "/" + std::to_string(checks) + " policy checks over " +
              std::to_string(n) + " pairs"};
}

Outcome MotivatingExample() {
  EnvSpec spec;
  spec.kind = EnvKind::kPendulum;
  spec.dynamics_params = {5, 10};
  spec.action_cost_coeff = 0.1;
  const HipMdpFamily fam = make_family(spec);
  int wins = 0;
  double state_js = 0.0, action_js = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MotivatingResult r = motivating_example(fam, MotivatingOptions{}, seed);
    const PairComparison& c = r.comparisons.front();
    wins += c.state.js_divergence < c.action.js_divergence;
    state_js += c.state.js_divergence / 10.0;
    action_js += c.action.js_divergence / 10.0;
  }
  return {wins == 10, std::to_string(wins) + "/10 seeds with state JS < action JS (mean " +
                          Fmt("%.4f", state_js) + " vs " + Fmt("%.4f", action_js) + ")"};
}

Outcome SrpoEfficacy() {
  EnvSpec grid;
  grid.dynamics_params = {0.0, 0.05, 0.1, 0.15, 0.2};
  const HipMdpFamily g = make_family(grid);
  const SrpoConfig cfg = SrpoConfig::Standard();
  const LearnerConfig learner;
  double srpo_mean = 0.0, base_mean = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    srpo_mean += srpo_train(g, cfg, learner, seed).final_mean_return / 10.0;
    base_mean += baseline_train(g, cfg, learner, seed).final_mean_return / 10.0;
  }
  EnvSpec opposite;
  opposite.kind = EnvKind::kBottleneck;
  opposite.dynamics_params = {0.1};
  const HipMdpFamily o = make_family(opposite);
  int behavior_worse = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double s = srpo_train(o, cfg, learner, seed).final_mean_return;
    const double b = behavior_regularized_train(o, cfg, learner, seed).final_mean_return;
    behavior_worse += b < s;
  }
  return {srpo_mean >= base_mean && behavior_worse >= 7,
          "gridworld SRPO " + Fmt("%.4f", srpo_mean) + " vs baseline " + Fmt("%.4f", base_mean) +
              "; behavior-regularized below SRPO on " + std::to_string(behavior_worse) +
              "/10 seeds (need 7)"};
}

Outcome Reproducibility() {
  const fs::path root = fs::temp_directory_path() / "srpolab_acceptance_repro";
  fs::remove_all(root);
  const char* configs[] = {
      R"({"experiment": "train-srpo", "env": {"dynamics_params": [0.0, 0.1]},
          "learner": {"epochs": 30}, "seeds": [0, 1, 2]})",
      R"({"experiment": "train-behavior-reg", "env": {"kind": "bottleneck",
          "dynamics_params": [0.1]}, "learner": {"epochs": 30}, "seeds": [3, 4]})",
      R"({"experiment": "verify-theory", "env": {"kind": "pendulum", "angle_bins": 9,
          "velocity_bins": 9, "dynamics_params": [1, 2, 3], "action_cost_coeff": 0.1},
          "theory": {"n_pairs": 4, "n_random_policies": 3}, "seeds": [0, 1]})",
      R"({"experiment": "density", "env": {"kind": "pendulum", "dynamics_params": [5, 10],
          "action_cost_coeff": 0.1}, "density": {"n_rollouts": 50}, "seeds": [0, 1]})",
      R"({"experiment": "occupancy", "env": {"dynamics_params": [0.0, 0.2]}, "seeds": [0]})",
  };
  int files = 0, identical = 0;
  for (std::size_t i = 0; i < std::size(configs); ++i) {
    RunConfig c = ParseRunConfig(configs[i]);
    std::vector<RunManifest> runs;
    for (int rep = 0; rep < 2; ++rep) {
      c.output_dir = root / ("config" + std::to_string(i)) / ("run" + std::to_string(rep));
      c.parallel = rep == 0 ? 1 : 2;
      runs.push_back(run(c));
    }
    for (const SeedOutcome& s : runs[0].seeds) {
      for (const std::string& f : s.files) {
        if (!f.ends_with(".csv")) continue;
        ++files;
        const fs::path base = root / ("config" + std::to_string(i));
        identical += ReadTextFile(base / "run0" / f) == ReadTextFile(base / "run1" / f);
      }
    }
    if (runs[0].config_hash != runs[1].config_hash) return {false, "config hash changed"};
  }
  return {files > 0 && identical == files,
          std::to_string(identical) + "/" + std::to_string(files) +
              " CSV files byte-identical across reruns"};
}

}  // namespace
}  // namespace srpo

int main() {
  using namespace srpo;
  const std::vector<Criterion> criteria = {
      {1, "occupancy exactness", 5, OccupancyExactness},
      {2, "KL-Lagrangian identity", 30, KlIdentity},
      {3, "discriminator ratio recovery", 20, RatioRecovery},
      {4, "value-gap bound", 60, ValueGap},
      {5, "occupancy equality", 60, OccupancyEquality},
      {6, "performance lower bound", 120, PerformanceBound},
      {7, "motivating example", 60, MotivatingExample},
      {8, "SRPO efficacy", 300, SrpoEfficacy},
      {9, "reproducibility", 0, Reproducibility},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds <= 0 || secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::string timing = Fmt("%.2f s", secs);
    if (c.limit_seconds > 0) timing += Fmt(" / %.0f s", c.limit_seconds);
    std::printf("%s  %d. %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
