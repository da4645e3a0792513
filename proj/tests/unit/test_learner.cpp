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
#include <random>
#include <set>

#include "srpolab/envs.hpp"
#include "srpolab/error.hpp"
#include "srpolab/learner.hpp"
#include "srpolab/theory.hpp"
#include "test_helpers.hpp"

namespace srpo {
namespace {

Transition Make(int s, double r, int theta = 0) {
  return {s, 0, r, s, theta, false, std::nullopt};
}

// Discriminator with a single constant logit.
Discriminator ConstantDisc(double prob) {
  Discriminator d;
  d.features = FeatureMap::OneHot(1);
  d.weights = {0.0};
  d.bias = std::log(prob / (1.0 - prob));
  return d;
}

std::vector<int> Draw(const std::vector<double>& p, int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::discrete_distribution<int> dist(p.begin(), p.end());
  std::vector<int> out(n);
  for (int& k : out) k = dist(gen);
  return out;
}

TEST_CASE("replay buffer evicts oldest and samples in insertion order") {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.Push(Make(i, i));
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).s == 2);
  CHECK(buf.at(2).s == 4);
  Rng rng(1, "test");
  const auto sample = buf.Sample(3, rng);
  REQUIRE(sample.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(sample[i].s == 2 + i);
  const auto two = buf.Sample(2, rng);
  CHECK(two[0].s < two[1].s);
  CHECK_THROWS_AS(buf.Sample(4, rng), Error);
  CHECK_THROWS_AS(ReplayBuffer(0), Error);
}

TEST_CASE("partition takes ceil(rho n) from each end, disjoint") {
  std::vector<Transition> batch;
  for (int i = 0; i < 10; ++i) batch.push_back(Make(i, (i * 7) % 10));
  const Partition p = partition_batch(batch, 0.25);
  CHECK(p.real.size() == 3);
  CHECK(p.fake.size() == 3);
  std::set<int> real, fake;
  for (const auto& t : p.real) real.insert(t.s);
  for (const auto& t : p.fake) fake.insert(t.s);
  for (int s : real) CHECK(fake.count(s) == 0);
  CHECK(p.real[0].r == 9.0);
  CHECK(p.fake[0].r == 0.0);
  for (const auto& t : p.real) CHECK(t.r >= 7.0);
  for (const auto& t : p.fake) CHECK(t.r <= 2.0);
}

TEST_CASE("partition ties keep earlier transitions in the top set") {
  std::vector<Transition> batch;
  for (int i = 0; i < 4; ++i) batch.push_back(Make(i, 1.0));
  const Partition p = partition_batch(batch, 0.5);
  CHECK(p.real[0].s == 0);
  CHECK(p.real[1].s == 1);
  CHECK(p.fake[0].s == 3);
  CHECK(p.fake[1].s == 2);
}

TEST_CASE("partition errors") {
  CHECK_THROWS_AS(partition_batch({Make(0, 1.0)}, 0.2), Error);
  std::vector<Transition> three = {Make(0, 1.0), Make(1, 2.0), Make(2, 3.0)};
  try {
    partition_batch(three, 0.6);
    FAIL("expected overlap error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientData);
  }
  CHECK_THROWS_AS(partition_batch(three, 0.0), Error);
  CHECK_THROWS_AS(partition_batch(three, 0.3, PartitionScore::kValue), Error);
  for (int i = 0; i < 3; ++i) three[i].value_score = -i;
  const Partition p = partition_batch(three, 0.3, PartitionScore::kValue);
  CHECK(p.real[0].s == 0);
  CHECK(p.fake[0].s == 2);
}

TEST_CASE("discriminator on identical multisets stays near one half") {
  const std::vector<int> keys = {0, 1, 1, 2, 3, 3, 3, 4};
  SrpoConfig cfg;
  const Discriminator d = train_discriminator(keys, keys, FeatureMap::OneHot(5), cfg, 7);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(d.Prob(k) - 0.5) < 0.05);
}

TEST_CASE("discriminator separates disjoint supports up to the clamp") {
  std::vector<int> real, fake;
  for (int i = 0; i < 50; ++i) {
    real.push_back(i % 2);
    fake.push_back(2 + i % 2);
  }
  SrpoConfig cfg;
  cfg.disc_epochs = 2000;
  const Discriminator d = train_discriminator(real, fake, FeatureMap::OneHot(4), cfg, 3);
  CHECK(d.Prob(0) > 0.99);
  CHECK(d.Prob(1) > 0.99);
  CHECK(d.Prob(2) < 0.01);
  CHECK(d.Prob(3) < 0.01);
  CHECK(d.Prob(0) <= kDiscClampHi);
  CHECK(d.Prob(2) >= kDiscClampLo);
}

TEST_CASE("discriminator loss never increases") {
  const std::vector<int> real = Draw({0.5, 0.3, 0.2}, 500, 1);
  const std::vector<int> fake = Draw({0.2, 0.3, 0.5}, 500, 2);
  SrpoConfig cfg;
  cfg.disc_lr = 500.0;  // forces the halving path
  const Discriminator d = train_discriminator(real, fake, FeatureMap::OneHot(3), cfg, 1);
  REQUIRE(d.loss_history.size() == static_cast<std::size_t>(cfg.disc_epochs) + 1);
  for (std::size_t i = 1; i < d.loss_history.size(); ++i) {
    CHECK(d.loss_history[i] <= d.loss_history[i - 1]);
  }
}

TEST_CASE("discriminator matches the count-based optimum") {
  const std::vector<int> real = {0, 0, 0, 1, 1, 2, 2, 2, 2, 3};
  const std::vector<int> fake = {0, 1, 1, 1, 2, 3, 3, 3, 3, 3};
  SrpoConfig cfg;
  const Discriminator d = train_discriminator(real, fake, FeatureMap::OneHot(4), cfg, 5);
  for (int k = 0; k < 4; ++k) {
    double nr = 0.0, nf = 0.0;
    for (int x : real) nr += x == k;
    for (int x : fake) nf += x == k;
    CHECK(std::abs(d.Prob(k) - nr / (nr + nf)) < 0.02);
  }
}

TEST_CASE("discriminator ratio recovers p/q from samples") {
  const std::vector<double> p = {0.2, 0.15, 0.12, 0.1, 0.1, 0.08, 0.08, 0.07, 0.06, 0.04};
  const std::vector<double> q = {0.05, 0.07, 0.08, 0.1, 0.1, 0.12, 0.12, 0.13, 0.13, 0.1};
  const std::vector<int> real = Draw(p, 20000, 11);
  const std::vector<int> fake = Draw(q, 20000, 12);
  SrpoConfig cfg;
  RatioClip wide{1e-6, 1e6};
  const Discriminator d = train_discriminator(real, fake, FeatureMap::OneHot(10), cfg, 9);
  for (int k = 0; k < 10; ++k) {
    if (std::min(p[k], q[k]) < 0.05) continue;
    double nr = 0.0, nf = 0.0;
    for (int x : real) nr += x == k;
    for (int x : fake) nf += x == k;
    const double oracle = nr / nf;
    CHECK(std::abs(density_ratio(d, k, wide) / oracle - 1.0) < 0.10);
  }
}

TEST_CASE("density ratio and augmentation arithmetic") {
  const RatioClip clip;
  CHECK(density_ratio(ConstantDisc(0.5), 0, clip) == doctest::Approx(1.0));
  CHECK(density_ratio(ConstantDisc(0.8), 0, clip) == doctest::Approx(4.0));
  CHECK(density_ratio(ConstantDisc(1.0 - 1e-9), 0, {0.05, 100.0}) == 100.0);
  CHECK(density_ratio(ConstantDisc(1e-9), 0, clip) == clip.lower);

  CHECK(augment_reward(0.7, ConstantDisc(0.8), 0, 0.0, clip) == 0.7);
  CHECK(augment_reward(0.7, ConstantDisc(0.5), 0, 0.3, clip) == doctest::Approx(0.7));
  CHECK(augment_reward(1.0, ConstantDisc(0.8), 0, 0.3, clip) ==
        doctest::Approx(1.41589).epsilon(1e-5));
  CHECK_THROWS_AS(augment_reward(1.0, ConstantDisc(0.8), 0, -0.1, clip), Error);

  double prev = -1e300;
  for (double d = 0.05; d < 0.96; d += 0.05) {
    const double v = augment_reward(0.0, ConstantDisc(d), 0, 0.2, clip);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("kl identity: zeta equal to d_pi gives zero on both sides") {
  const TabularMdp m = testing::RandomMdp(5, 2, 0.8, 21);
  const PolicyTable pi = PolicyTable::Uniform(5, 2);
  const OccupancyVector d = occupancy(m, pi);
  const KlIdentityResult r = kl_identity_check(m, pi, d, 2000, 4);
  CHECK(r.direct_kl == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(r.rollout_estimate) < 1e-9);
}

TEST_CASE("kl identity: rollout estimate agrees with direct KL") {
  const TabularMdp m = testing::RandomMdp(5, 2, 0.8, 22);
  const PolicyTable pi = PolicyTable::Uniform(5, 2);
  const OccupancyVector zeta({0.4, 0.25, 0.15, 0.1, 0.1}, 0.8);
  const KlIdentityResult r = kl_identity_check(m, pi, zeta, 200000, 6);

  // Independent direct sum from the power-series occupancy.
  std::vector<double> d(5, 0.0), mass(m.rho0().begin(), m.rho0().end());
  double weight = 1.0 - m.gamma();
  for (int t = 0; t < 400; ++t) {
    std::vector<double> next(5, 0.0);
    for (int s = 0; s < 5; ++s) {
      d[s] += weight * mass[s];
      for (int a = 0; a < 2; ++a) {
        for (int sp = 0; sp < 5; ++sp) next[sp] += mass[s] * pi.prob(s, a) * m.p(s, a, sp);
      }
    }
    mass.swap(next);
    weight *= m.gamma();
  }
  const auto ds = SmoothDistribution(d);
  const auto zs = SmoothDistribution(zeta.d());
  long double kl = 0.0L;
  for (int s = 0; s < 5; ++s) {
    kl += static_cast<long double>(ds[s]) * std::log(static_cast<long double>(ds[s]) / zs[s]);
  }
  CHECK(r.direct_kl == doctest::Approx(static_cast<double>(kl)).epsilon(1e-10));
  CHECK(r.direct_kl >= 0.0);
  CHECK(r.standard_error > 0.0);
  CHECK(std::abs(r.rollout_estimate - r.direct_kl) <= 3.0 * r.standard_error);
}

TEST_CASE("kl identity rejects bad inputs") {
  const TabularMdp m = testing::RandomMdp(3, 2, 0.8, 23);
  const PolicyTable pi = PolicyTable::Uniform(3, 2);
  CHECK_THROWS_AS(kl_identity_check(m, pi, OccupancyVector({0.5, 0.5}, 0.8), 10, 1), Error);
  CHECK_THROWS_AS(kl_identity_check(m, pi, OccupancyVector({0.2, 0.3, 0.5}, 0.8), 1, 1), Error);
}

HipMdpFamily Grid(std::vector<double> slips) {
  EnvSpec spec;
  spec.dynamics_params = std::move(slips);
  return make_gridworld_family(spec);
}

LearnerConfig Short() {
  LearnerConfig l;
  l.epochs = 20;
  l.updates_per_epoch = 200;
  return l;
}

TEST_CASE("single-member lambda=0 training reaches the optimum within 5%") {
  const HipMdpFamily fam = Grid({0.0});
  const double opt = expected_return(fam.member(0), solve_optimal(fam.member(0)).policy);
  SrpoConfig cfg;
  cfg.lambda = 0.0;
  for (std::uint64_t seed : {0, 1, 2}) {
    const TrainingResult res = srpo_train(fam, cfg, LearnerConfig{}, seed);
    CHECK(std::abs(res.final_mean_return - opt) <= 0.05 * std::abs(opt));
    const TrainingResult base = baseline_train(fam, cfg, LearnerConfig{}, seed);
    CHECK(std::abs(base.final_mean_return - opt) <= 0.05 * std::abs(opt));
  }
}

bool SameLog(const TrainingResult& a, const TrainingResult& b) {
  if (a.log.size() != b.log.size()) return false;
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    const auto& x = a.log[i];
    const auto& y = b.log[i];
    if (x.epoch != y.epoch || x.theta_idx != y.theta_idx ||
        x.mean_return != y.mean_return || x.disc_loss != y.disc_loss ||
        x.lambda != y.lambda || x.rho != y.rho || x.seed != y.seed) {
      return false;
    }
  }
  return true;
}

TEST_CASE("baseline equals srpo with lambda=0 bitwise") {
  const HipMdpFamily fam = Grid({0.0, 0.1});
  SrpoConfig cfg;
  const TrainingResult base = baseline_train(fam, cfg, Short(), 3);
  cfg.lambda = 0.0;
  const TrainingResult zero = srpo_train(fam, cfg, Short(), 3);
  CHECK(SameLog(base, zero));
  CHECK(TrainingLogCsv(base.log) == TrainingLogCsv(zero.log));
  const TrainingResult behavior = behavior_regularized_train(fam, cfg, Short(), 3);
  CHECK(behavior.final_returns == base.final_returns);
  CHECK(behavior.policies == base.policies);
}

TEST_CASE("lambda enters only through the augmented updates") {
  const HipMdpFamily fam = Grid({0.0, 0.1});
  LearnerConfig l = Short();
  l.updates_per_epoch = 0;
  SrpoConfig a, b;
  a.lambda = 0.0;
  b.lambda = 0.1;
  const TrainingResult ra = srpo_train(fam, a, l, 8);
  const TrainingResult rb = srpo_train(fam, b, l, 8);
  REQUIRE(ra.log.size() == rb.log.size());
  for (std::size_t i = 0; i < ra.log.size(); ++i) {
    CHECK(ra.log[i].mean_return == rb.log[i].mean_return);
    CHECK(ra.log[i].disc_loss == rb.log[i].disc_loss);
  }
}

TEST_CASE("training is reproducible under a fixed seed") {
  const HipMdpFamily fam = Grid({0.0, 0.2});
  SrpoConfig cfg;
  CHECK(SameLog(srpo_train(fam, cfg, Short(), 5), srpo_train(fam, cfg, Short(), 5)));
  CHECK(SameLog(behavior_regularized_train(fam, cfg, Short(), 5),
                behavior_regularized_train(fam, cfg, Short(), 5)));
  const TrainingResult r = srpo_train(fam, cfg, Short(), 5);
  CHECK(r.log.size() == 20u * 2u);
  CHECK(r.policies.size() == 2u);
}

TEST_CASE("behavior regularization is misled on the bottleneck family") {
  EnvSpec spec;
  spec.kind = EnvKind::kBottleneck;
  spec.dynamics_params = {0.1};
  const HipMdpFamily fam = make_family(spec);
  SrpoConfig cfg;
  int not_worse = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const double srpo = srpo_train(fam, cfg, LearnerConfig{}, seed).final_mean_return;
    const double behavior =
        behavior_regularized_train(fam, cfg, LearnerConfig{}, seed).final_mean_return;
    not_worse += behavior <= srpo;
  }
  CHECK(not_worse >= 3);
}

TEST_CASE("training log csv layout") {
  const std::string csv = TrainingLogCsv({{0, 1, 0.5, 0.25, 0.1, 0.2, 7}});
  CHECK(csv == "epoch,theta_idx,mean_return,disc_loss,lambda,rho,seed\n"
               "0,1,0.5,0.25,0.1,0.2,7\n");
}

TEST_CASE("config validation") {
  SrpoConfig cfg;
  CHECK_NOTHROW(cfg.Validate());
  CHECK(SrpoConfig::Standard().lambda == 0.1);
  CHECK(SrpoConfig::Strong().lambda == 0.3);
  cfg.rho = 0.0;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg = SrpoConfig{};
  cfg.ratio_clip = {2.0, 1.0};
  CHECK_THROWS_AS(cfg.Validate(), Error);
  LearnerConfig l;
  l.q_lr = 0.0;
  CHECK_THROWS_AS(srpo_train(Grid({0.0}), SrpoConfig{}, l, 0), Error);
}

}  // namespace
}  // namespace srpo
