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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "srpolab/envs.hpp"
#include "srpolab/error.hpp"
#include "srpolab/solvers.hpp"

namespace srpo {
namespace {

EnvSpec SmallPendulum(std::vector<double> params) {
  EnvSpec spec;
  spec.kind = EnvKind::kPendulum;
  spec.angle_bins = 9;
  spec.velocity_bins = 9;
  spec.dynamics_params = std::move(params);
  return spec;
}

void CheckRowsSumToOne(const TabularMdp& m) {
  for (int s = 0; s < m.n_states(); ++s) {
    for (int a = 0; a < m.n_actions(); ++a) {
      double sum = 0.0;
      for (int next = 0; next < m.n_states(); ++next) sum += m.p(s, a, next);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("gridworld family sizes and homomorphism") {
  EnvSpec spec;
  spec.width = 4;
  spec.height = 3;
  spec.dynamics_params = {0.0, 0.1, 0.3};
  const HipMdpFamily fam = make_gridworld_family(spec);
  REQUIRE(fam.size() == 3);
  for (const TabularMdp& m : fam.members()) {
    CHECK(m.n_states() == 12);
    CHECK(m.n_actions() == kGridActions);
    CHECK(m.gamma() == 0.9);
    CheckRowsSumToOne(m);
    CHECK(is_homomorphous(fam.member(0), m));
  }
  CHECK(fam.member(0).is_deterministic());
  CHECK_FALSE(fam.member(1).is_deterministic());
}

TEST_CASE("slip distance grows with the slip gap") {
  EnvSpec spec;
  spec.dynamics_params = {0.0, 0.1, 0.2, 0.4};
  const HipMdpFamily fam = make_gridworld_family(spec);
  double last = 0.0;
  for (int i = 1; i < fam.size(); ++i) {
    const double eps = dynamics_distance(fam.member(0), fam.member(i),
                                         DistanceMode::kTotalVariation);
    CHECK(eps > last);
    last = eps;
  }
  CHECK(dynamics_distance(fam.member(2), fam.member(2)) == 0.0);
}

TEST_CASE("mirrored gridworld has opposite optimal actions and equal state paths") {
  EnvSpec spec;
  spec.kind = EnvKind::kMirroredGridworld;
  const HipMdpFamily fam = make_family(spec);
  REQUIRE(fam.size() == 2);
  const OptimalSolution a = solve_optimal(fam.member(0));
  const OptimalSolution b = solve_optimal(fam.member(1));
  for (int s = 0; s < fam.member(0).n_states(); ++s) {
    CHECK(a.values.v[s] == doctest::Approx(b.values.v[s]).epsilon(1e-9));
  }
  const OccupancyVector da = occupancy(fam.member(0), a.policy);
  const OccupancyVector db = occupancy(fam.member(1), b.policy);
  bool differ = false;
  for (int s = 0; s < da.size(); ++s) {
    CHECK(da[s] == doctest::Approx(db[s]).epsilon(1e-9));
    differ |= a.policy.deterministic_action(s) != b.policy.deterministic_action(s);
  }
  CHECK(differ);
}

TEST_CASE("pendulum sizes, determinism and homomorphism") {
  const HipMdpFamily fam = make_family(SmallPendulum({0.5, 1.0, 2.0}));
  REQUIRE(fam.size() == 3);
  for (const TabularMdp& m : fam.members()) {
    CHECK(m.n_states() == 81);
    CHECK(m.n_actions() == 5);
    CHECK(m.is_deterministic());
    CheckRowsSumToOne(m);
    CHECK(is_homomorphous(fam.member(0), m));
    CHECK(std::isfinite(exact_inverse_lipschitz(m)));
  }
  EnvSpec full;
  full.kind = EnvKind::kPendulum;
  full.dynamics_params = {1.0};
  const HipMdpFamily big = make_family(full);
  CHECK(big.member(0).n_states() == 225);
  CHECK(big.member(0).n_actions() == 5);
}

TEST_CASE("pendulum upright rest state is fixed without gravity or friction") {
  EnvSpec spec = SmallPendulum({0.0});
  spec.friction = 0.0;
  const TabularMdp m = make_family(spec).member(0);
  const int center = 4 * 9 + 4;
  CHECK(m.successor(center, 2) == center);
  CHECK(m.successor(center, 0) != center);
  CHECK(m.state_coord(center)[0] == 0.0);
  CHECK(m.state_coord(center)[1] == 0.0);
}

TEST_CASE("pendulum action cost sets the reward constant") {
  EnvSpec spec = SmallPendulum({1.0});
  const TabularMdp free = make_family(spec).member(0);
  CHECK(free.reward_lipschitz().value() == 0.0);
  CHECK(discrete_reward_lipschitz(free) == 0.0);
  spec.action_cost_coeff = 0.3;
  const TabularMdp costly = make_family(spec).member(0);
  CHECK(costly.reward_lipschitz().value() == doctest::Approx(0.6));
  CHECK(discrete_reward_lipschitz(costly) <= 0.6 + 1e-12);
}

TEST_CASE("same spec builds the same family") {
  const EnvSpec spec = SmallPendulum({0.5, 1.5});
  const HipMdpFamily a = make_family(spec);
  const HipMdpFamily b = make_family(spec);
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.member(i).transition() == b.member(i).transition());
    CHECK(a.member(i).reward() == b.member(i).reward());
    CHECK(a.theta_label(i) == b.theta_label(i));
  }
  CHECK(EnvSignature(spec) == EnvSignature(SmallPendulum({0.5, 1.5})));
  CHECK(EnvSignature(spec) != EnvSignature(SmallPendulum({0.5, 2.0})));
}

TEST_CASE("bottleneck members disagree only at the bottleneck") {
  EnvSpec spec;
  spec.kind = EnvKind::kBottleneck;
  spec.dynamics_params = {0.1};
  const HipMdpFamily fam = make_family(spec);
  REQUIRE(fam.size() == 2);
  const OptimalSolution a = solve_optimal(fam.member(0));
  const OptimalSolution b = solve_optimal(fam.member(1));
  CHECK(a.policy.deterministic_action(kBottleneckState) == 0);
  CHECK(b.policy.deterministic_action(kBottleneckState) == 1);
  CHECK(is_homomorphous(fam.member(0), fam.member(1)));
  CheckRowsSumToOne(fam.member(0));
  CHECK(fam.member(0).p(kBottleneckStart, 0, kBottleneckState) == 1.0);
  CHECK(fam.member(0).p(kBottleneckDetour, 1, kBottleneckPenalty) == doctest::Approx(0.1));
  CHECK(fam.member(1).p(kBottleneckLure, 1, kBottleneckPenalty) == doctest::Approx(0.1));
  CHECK(fam.member(0).r(kBottleneckState, 1, kBottleneckLure) == doctest::Approx(0.5));
}

TEST_CASE("environment names and invalid specs") {
  for (EnvKind k : {EnvKind::kGridworld, EnvKind::kMirroredGridworld, EnvKind::kPendulum,
                    EnvKind::kBottleneck}) {
    CHECK(ParseEnvKind(ToString(k)) == k);
  }
  CHECK(ParsePendulumKnob("friction") == PendulumKnob::kFriction);
  CHECK_THROWS_AS(ParseEnvKind("cartpole"), Error);
  EnvSpec spec;
  spec.dynamics_params = {1.5};
  CHECK_THROWS_AS(make_gridworld_family(spec), Error);
  spec.dynamics_params = {0.0};
  spec.gamma = 1.0;
  CHECK_THROWS_AS(make_gridworld_family(spec), Error);
  EnvSpec pend = SmallPendulum({1.0});
  pend.angle_bins = 8;
  CHECK_THROWS_AS(make_family(pend), Error);
  EnvSpec bottleneck;
  bottleneck.kind = EnvKind::kBottleneck;
  CHECK_THROWS_AS(make_family(bottleneck), Error);
}

}  // namespace
}  // namespace srpo
