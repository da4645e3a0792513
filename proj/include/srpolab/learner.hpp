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

// State-regularized policy optimization on tabular families: replay buffer,
// reward/value partition, logistic discriminator, density-ratio reward
// augmentation and a theta-conditioned soft Q-learning loop.

#ifndef SRPOLAB_LEARNER_HPP_
#define SRPOLAB_LEARNER_HPP_

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srpolab/mdp.hpp"
#include "srpolab/rng.hpp"
#include "srpolab/solvers.hpp"
#include "srpolab/transition.hpp"

namespace srpo {

class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  // Evicts the oldest transition when full.
  void Push(const Transition& t);
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  const Transition& at(int i) const { return items_.at(i); }
  // n distinct transitions, uniformly, returned in buffer (insertion) order.
  std::vector<Transition> Sample(int n, Rng& rng) const;

 private:
  int capacity_;
  std::deque<Transition> items_;
};

enum class PartitionScore { kReward, kValue };

struct Partition {
  std::vector<Transition> real;  // highest scores
  std::vector<Transition> fake;  // lowest scores
};

// Top and bottom ceil(rho * n) transitions by score; ties go to the earlier
// transition first. Value mode reads Transition::value_score.
Partition partition_batch(const std::vector<Transition>& batch, double rho,
                          PartitionScore score = PartitionScore::kReward);

// Row per key (state, or state-action pair): the discriminator input.
struct FeatureMap {
  int n_keys = 0;
  int dim = 0;
  std::vector<double> table;  // n_keys x dim

  std::span<const double> row(int key) const {
    return {table.data() + static_cast<std::size_t>(key) * dim,
            static_cast<std::size_t>(dim)};
  }
  static FeatureMap OneHot(int n_keys);
  static FeatureMap FromCoords(const CoordTable& coords);
};

enum class FeatureKind { kOneHot, kCoords };

struct RatioClip {
  double lower = 0.05;
  double upper = 20.0;
};

inline constexpr double kDiscClampLo = 1e-4;
inline constexpr double kDiscClampHi = 1.0 - 1e-4;

struct SrpoConfig {
  double lambda = 0.1;
  double rho = 0.2;
  int batch_size = 256;
  double disc_lr = 1.0;
  int disc_epochs = 200;
  RatioClip ratio_clip;
  PartitionScore score = PartitionScore::kReward;
  FeatureKind features = FeatureKind::kOneHot;
  // Training epochs between cold restarts of the discriminator.
  int disc_interval = 10;

  static SrpoConfig Standard();  // lambda = 0.1
  static SrpoConfig Strong();    // lambda = 0.3
  void Validate() const;
};

struct Discriminator {
  FeatureMap features;
  std::vector<double> weights;
  double bias = 0.0;
  // Cross-entropy after initialization and after every epoch.
  std::vector<double> loss_history;

  double Logit(int key) const;
  // Logistic output clamped to [kDiscClampLo, kDiscClampHi].
  double Prob(int key) const;
  double final_loss() const { return loss_history.empty() ? 0.0 : loss_history.back(); }
};

// Logistic regression of real (label 1) against fake (label 0) keys by
// full-batch gradient descent. A step that would raise the loss is retried
// with half the rate, so the loss never increases between epochs.
Discriminator train_discriminator(const std::vector<int>& real_keys,
                                  const std::vector<int>& fake_keys,
                                  const FeatureMap& features,
                                  const SrpoConfig& cfg, std::uint64_t rng_seed);

double density_ratio(const Discriminator& disc, int key, RatioClip clip);
double augment_reward(double r, const Discriminator& disc, int key,
                      double lambda, RatioClip clip);

struct KlIdentityResult {
  double direct_kl = 0.0;
  double rollout_estimate = 0.0;
  double standard_error = 0.0;
};

// Compares KL(d_pi || zeta) with -(1-gamma) E_tau sum_t gamma^t
// (log zeta(s_t) - log d_pi(s_t)) estimated from rollouts. Both
// distributions are smoothed first.
KlIdentityResult kl_identity_check(const TabularMdp& m, const PolicyTable& pi,
                                   const OccupancyVector& zeta, int n_rollouts,
                                   std::uint64_t rng_seed);

struct LearnerConfig {
  int epochs = 150;
  int episodes_per_member = 2;
  int horizon = 40;
  double q_lr = 0.2;
  double temperature = 0.05;
  // Initial value of every Q entry; unset means max|r| / (1 - gamma).
  std::optional<double> q_init;
  // Probability of a uniform action during collection.
  double explore_epsilon = 0.1;
  int updates_per_epoch = 400;
  int buffer_capacity = 20000;

  void Validate() const;
};

struct TrainingLogRow {
  int epoch;
  int theta_idx;
  double mean_return;  // exact return of the greedy policy in member theta
  double disc_loss;
  double lambda;
  double rho;
  std::uint64_t seed;
};

struct TrainingResult {
  std::vector<PolicyTable> policies;  // greedy, one per member
  std::vector<TrainingLogRow> log;
  std::vector<double> final_returns;  // per member
  double final_mean_return = 0.0;
};

TrainingResult srpo_train(const HipMdpFamily& family, const SrpoConfig& cfg,
                          const LearnerConfig& learner, std::uint64_t rng_seed);
// The same pipeline with the augmentation switched off.
TrainingResult baseline_train(const HipMdpFamily& family, const SrpoConfig& cfg,
                              const LearnerConfig& learner,
                              std::uint64_t rng_seed);
// Discriminator over (state, action) pairs; augmentation uses the
// state-action ratio.
TrainingResult behavior_regularized_train(const HipMdpFamily& family,
                                          const SrpoConfig& cfg,
                                          const LearnerConfig& learner,
                                          std::uint64_t rng_seed);

std::string TrainingLogCsv(const std::vector<TrainingLogRow>& log);

}  // namespace srpo

#endif  // SRPOLAB_LEARNER_HPP_
