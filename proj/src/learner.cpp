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

#include "srpolab/learner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include "srpolab/csv.hpp"
#include "srpolab/error.hpp"
#include "srpolab/theory.hpp"

namespace srpo {
namespace {

constexpr int kMaxHalvings = 60;

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct KeyCounts {
  std::vector<int> keys;
  std::vector<double> n_real;
  std::vector<double> n_fake;
  double total = 0.0;
};

KeyCounts CountKeys(const std::vector<int>& real, const std::vector<int>& fake,
                    int n_keys) {
  std::map<int, std::pair<double, double>> counts;
  for (int k : real) {
    Require(k >= 0 && k < n_keys, ErrorCode::kInvalidArgument,
            "discriminator key out of range");
    counts[k].first += 1.0;
  }
  for (int k : fake) {
    Require(k >= 0 && k < n_keys, ErrorCode::kInvalidArgument,
            "discriminator key out of range");
    counts[k].second += 1.0;
  }
  KeyCounts out;
  for (const auto& [k, c] : counts) {
    out.keys.push_back(k);
    out.n_real.push_back(c.first);
    out.n_fake.push_back(c.second);
  }
  out.total = static_cast<double>(real.size() + fake.size());
  return out;
}

double Logit(const FeatureMap& f, const std::vector<double>& w, double b, int key) {
  auto x = f.row(key);
  double z = b;
  for (int i = 0; i < f.dim; ++i) z += w[i] * x[i];
  return z;
}

double CrossEntropy(const FeatureMap& f, const KeyCounts& c,
                    const std::vector<double>& w, double b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c.keys.size(); ++i) {
    const double z = Logit(f, w, b, c.keys[i]);
    acc += c.n_real[i] * Softplus(-z) + c.n_fake[i] * Softplus(z);
  }
  return acc / c.total;
}

double SoftValue(std::span<const double> q, double temperature) {
  const double peak = *std::max_element(q.begin(), q.end());
  double acc = 0.0;
  for (double x : q) acc += std::exp((x - peak) / temperature);
  return peak + temperature * std::log(acc);
}

enum class RegularizerKind { kState, kStateAction };

FeatureMap BuildFeatures(const TabularMdp& m, FeatureKind kind,
                         RegularizerKind reg) {
  const int n_keys = reg == RegularizerKind::kState ? m.n_states()
                                                    : m.n_states() * m.n_actions();
  if (kind == FeatureKind::kOneHot) return FeatureMap::OneHot(n_keys);
  Require(m.has_state_coords(), ErrorCode::kDomain,
          "coordinate features require state_coords");
  if (reg == RegularizerKind::kState) {
    return FeatureMap::FromCoords(m.annotations().state_coords);
  }
  Require(m.has_action_coords(), ErrorCode::kDomain,
          "state-action coordinate features require action_coords");
  FeatureMap f;
  const int ds = m.annotations().state_coords.dim;
  const int da = m.annotations().action_coords.dim;
  f.n_keys = n_keys;
  f.dim = ds + da;
  for (int s = 0; s < m.n_states(); ++s) {
    for (int a = 0; a < m.n_actions(); ++a) {
      auto xs = m.state_coord(s);
      auto xa = m.action_coord(a);
      f.table.insert(f.table.end(), xs.begin(), xs.end());
      f.table.insert(f.table.end(), xa.begin(), xa.end());
    }
  }
  return f;
}

TrainingResult Train(const HipMdpFamily& family, const SrpoConfig& cfg,
                     const LearnerConfig& learner, std::uint64_t seed,
                     RegularizerKind reg, double lambda) {
  cfg.Validate();
  learner.Validate();
  Require(lambda >= 0.0, ErrorCode::kInvalidArgument, "lambda must be >= 0");

  const TabularMdp& ref = family.member(0);
  const int n_states = ref.n_states();
  const int n_actions = ref.n_actions();
  const double gamma = ref.gamma();
  const int k = family.size();
  const FeatureMap features = BuildFeatures(ref, cfg.features, reg);
  const double q_init = learner.q_init.value_or(ref.r_max() / (1.0 - gamma));
  auto key_of = [&](const Transition& t) {
    return reg == RegularizerKind::kState ? t.s : t.s * n_actions + t.a;
  };

  std::vector<std::vector<double>> q(k, std::vector<double>(
                                            static_cast<std::size_t>(n_states) * n_actions, q_init));
  auto q_row = [&](int theta, int s) -> std::span<double> {
    return {q[theta].data() + static_cast<std::size_t>(s) * n_actions,
            static_cast<std::size_t>(n_actions)};
  };

  // Separate streams keep collection identical across lambda values.
  Rng collect_rng(seed, "collect");
  Rng batch_rng(seed, "partition_batch");
  Rng replay_rng(seed, "replay");
  const std::uint64_t disc_seed = DeriveSeed(seed, "discriminator");

  ReplayBuffer buffer(learner.buffer_capacity);
  std::optional<Discriminator> disc;
  std::vector<double> probs(n_actions);
  TrainingResult result;

  for (int epoch = 0; epoch < learner.epochs; ++epoch) {
    for (int theta = 0; theta < k; ++theta) {
      const TabularMdp& m = family.member(theta);
      for (int ep = 0; ep < learner.episodes_per_member; ++ep) {
        int s = collect_rng.Categorical(m.rho0());
        for (int t = 0; t < learner.horizon; ++t) {
          auto row = q_row(theta, s);
          const double peak = *std::max_element(row.begin(), row.end());
          for (int a = 0; a < n_actions; ++a) {
            probs[a] = std::exp((row[a] - peak) / learner.temperature);
          }
          const int a = collect_rng.Uniform() < learner.explore_epsilon
                            ? collect_rng.UniformInt(n_actions)
                            : collect_rng.Categorical(probs);
          auto succ = m.successors(s, a);
          const double u = collect_rng.Uniform();
          double acc = 0.0;
          const Successor* pick = &succ.back();
          for (const Successor& e : succ) {
            acc += e.prob;
            if (u < acc) {
              pick = &e;
              break;
            }
          }
          buffer.Push({s, a, pick->reward, pick->next_state, theta,
                       m.is_terminal(pick->next_state), std::nullopt});
          s = pick->next_state;
        }
      }
    }

    if (epoch % cfg.disc_interval == 0) {
      std::vector<Transition> batch =
          buffer.Sample(std::min(cfg.batch_size, buffer.size()), batch_rng);
      if (cfg.score == PartitionScore::kValue) {
        for (Transition& t : batch) {
          t.value_score = SoftValue(q_row(t.theta_idx, t.s), learner.temperature);
        }
      }
      const int n_side = static_cast<int>(std::ceil(cfg.rho * batch.size()));
      if (batch.size() >= 2 && 2 * n_side <= static_cast<int>(batch.size())) {
        const Partition part = partition_batch(batch, cfg.rho, cfg.score);
        std::vector<int> real, fake;
        for (const Transition& t : part.real) real.push_back(key_of(t));
        for (const Transition& t : part.fake) fake.push_back(key_of(t));
        disc = train_discriminator(real, fake, features, cfg,
                                   DeriveSeed(disc_seed, std::to_string(epoch)));
      }
    }

    for (int u = 0; u < learner.updates_per_epoch && buffer.size() > 0; ++u) {
      const Transition& t = buffer.at(replay_rng.UniformInt(buffer.size()));
      double r = t.r;
      if (disc && lambda > 0.0) {
        r = augment_reward(t.r, *disc, key_of(t), lambda, cfg.ratio_clip);
      }
      const double target = r + gamma * SoftValue(q_row(t.theta_idx, t.s_next),
                                                   learner.temperature);
      double& cell = q_row(t.theta_idx, t.s)[t.a];
      cell += learner.q_lr * (target - cell);
    }

    result.final_returns.assign(k, 0.0);
    result.policies.clear();
    for (int theta = 0; theta < k; ++theta) {
      ValueTable vt;
      vt.q = q[theta];
      PolicyTable pi = greedy_policy(vt, n_actions);
      const double ret = expected_return(family.member(theta), pi);
      result.final_returns[theta] = ret;
      result.log.push_back({epoch, theta, ret, disc ? disc->final_loss() : 0.0,
                            lambda, cfg.rho, seed});
      result.policies.push_back(std::move(pi));
    }
  }
  result.final_mean_return =
      std::accumulate(result.final_returns.begin(), result.final_returns.end(), 0.0) / k;
  return result;
}

}  // namespace

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  Require(capacity > 0, ErrorCode::kInvalidArgument,
          "replay buffer capacity must be positive");
}

void ReplayBuffer::Push(const Transition& t) {
  if (static_cast<int>(items_.size()) == capacity_) items_.pop_front();
  items_.push_back(t);
}

std::vector<Transition> ReplayBuffer::Sample(int n, Rng& rng) const {
  Require(n >= 0 && n <= size(), ErrorCode::kInsufficientData,
          "replay buffer holds fewer transitions than requested");
  // Partial Fisher-Yates over indices, then restore insertion order.
  std::vector<int> idx(size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.UniformInt(size() - i)]);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<Transition> out;
  out.reserve(n);
  for (int i : idx) out.push_back(items_[i]);
  return out;
}

Partition partition_batch(const std::vector<Transition>& batch, double rho,
                          PartitionScore score) {
  Require(rho > 0.0 && rho < 1.0, ErrorCode::kInvalidArgument,
          "partition: rho must lie in (0, 1)");
  const int n = static_cast<int>(batch.size());
  Require(n >= 2, ErrorCode::kInsufficientData,
          "partition: batch needs at least two transitions");
  const int k = static_cast<int>(std::ceil(rho * n));
  Require(2 * k <= n, ErrorCode::kInsufficientData,
          "partition: top and bottom ceil(rho * n) sets would overlap");
  std::vector<double> scores(n);
  for (int i = 0; i < n; ++i) {
    if (score == PartitionScore::kReward) {
      scores[i] = batch[i].r;
    } else {
      Require(batch[i].value_score.has_value(), ErrorCode::kInvalidArgument,
              "partition: value mode needs value_score on every transition");
      scores[i] = *batch[i].value_score;
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  Partition out;
  for (int i = 0; i < k; ++i) out.real.push_back(batch[order[i]]);
  for (int i = n - 1; i >= n - k; --i) out.fake.push_back(batch[order[i]]);
  return out;
}

FeatureMap FeatureMap::OneHot(int n_keys) {
  Require(n_keys > 0, ErrorCode::kInvalidArgument, "feature map needs keys");
  FeatureMap f;
  f.n_keys = n_keys;
  f.dim = n_keys;
  f.table.assign(static_cast<std::size_t>(n_keys) * n_keys, 0.0);
  for (int i = 0; i < n_keys; ++i) f.table[static_cast<std::size_t>(i) * n_keys + i] = 1.0;
  return f;
}

FeatureMap FeatureMap::FromCoords(const CoordTable& coords) {
  Require(!coords.empty(), ErrorCode::kInvalidArgument, "coordinate table is empty");
  FeatureMap f;
  f.dim = coords.dim;
  f.n_keys = static_cast<int>(coords.values.size()) / coords.dim;
  f.table = coords.values;
  return f;
}

SrpoConfig SrpoConfig::Standard() { return {}; }

SrpoConfig SrpoConfig::Strong() {
  SrpoConfig cfg;
  cfg.lambda = 0.3;
  return cfg;
}

void LearnerConfig::Validate() const {
  Require(epochs > 0 && episodes_per_member > 0 &&
              horizon > 0 && updates_per_epoch >= 0 &&
              buffer_capacity > 0,
          ErrorCode::kInvalidArgument, "learner sizes must be positive");
  Require(q_lr > 0.0 && q_lr <= 1.0 && temperature > 0.0,
          ErrorCode::kInvalidArgument,
          "learner q_lr must lie in (0, 1] and temperature must be positive");
  Require(explore_epsilon >= 0.0 && explore_epsilon <= 1.0,
          ErrorCode::kInvalidArgument, "learner explore_epsilon must lie in [0, 1]");
  Require(!q_init || std::isfinite(*q_init),
          ErrorCode::kInvalidArgument, "learner q_init must be finite");
}

void SrpoConfig::Validate() const {
  Require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::kInvalidArgument,
          "srpo.lambda must be finite and >= 0");
  Require(rho > 0.0 && rho < 1.0, ErrorCode::kInvalidArgument,
          "srpo.rho must lie in (0, 1)");
  Require(batch_size > 0 && disc_epochs > 0 && disc_interval > 0,
          ErrorCode::kInvalidArgument,
          "srpo batch_size, disc_epochs and disc_interval must be positive");
  Require(disc_lr > 0.0, ErrorCode::kInvalidArgument, "srpo.disc_lr must be positive");
  Require(ratio_clip.lower > 0.0 && ratio_clip.lower < ratio_clip.upper,
          ErrorCode::kInvalidArgument, "srpo.ratio_clip needs 0 < lower < upper");
}

double Discriminator::Logit(int key) const {
  return srpo::Logit(features, weights, bias, key);
}

double Discriminator::Prob(int key) const {
  return std::clamp(Sigmoid(Logit(key)), kDiscClampLo, kDiscClampHi);
}

Discriminator train_discriminator(const std::vector<int>& real_keys,
                                  const std::vector<int>& fake_keys,
                                  const FeatureMap& features,
                                  const SrpoConfig& cfg, std::uint64_t rng_seed) {
  Require(!real_keys.empty() && !fake_keys.empty(), ErrorCode::kInsufficientData,
          "discriminator needs non-empty real and fake sets");
  Require(cfg.disc_lr > 0.0 && cfg.disc_epochs > 0, ErrorCode::kInvalidArgument,
          "discriminator learning rate and epochs must be positive");
  const KeyCounts counts = CountKeys(real_keys, fake_keys, features.n_keys);

  Discriminator disc;
  disc.features = features;
  disc.weights.assign(features.dim, 0.0);
  Rng rng(rng_seed, "discriminator_init");
  for (double& w : disc.weights) w = 1e-3 * rng.Normal();

  double loss = CrossEntropy(features, counts, disc.weights, disc.bias);
  disc.loss_history.push_back(loss);
  double lr = cfg.disc_lr;
  std::vector<double> grad(features.dim), trial(features.dim);
  for (int epoch = 0; epoch < cfg.disc_epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < counts.keys.size(); ++i) {
      const int key = counts.keys[i];
      const double z = srpo::Logit(features, disc.weights, disc.bias, key);
      const double g =
          (Sigmoid(z) * (counts.n_real[i] + counts.n_fake[i]) - counts.n_real[i]) /
          counts.total;
      auto x = features.row(key);
      for (int j = 0; j < features.dim; ++j) grad[j] += g * x[j];
      grad_b += g;
    }
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings && !accepted; ++h) {
      for (int j = 0; j < features.dim; ++j) trial[j] = disc.weights[j] - lr * grad[j];
      const double trial_b = disc.bias - lr * grad_b;
      const double trial_loss = CrossEntropy(features, counts, trial, trial_b);
      Require(!std::isnan(trial_loss), ErrorCode::kNumerical,
              "discriminator loss became NaN");
      if (trial_loss <= loss) {
        disc.weights.swap(trial);
        disc.bias = trial_b;
        loss = trial_loss;
        accepted = true;
      } else {
        lr *= 0.5;
      }
    }
    disc.loss_history.push_back(loss);
  }
  return disc;
}

double density_ratio(const Discriminator& disc, int key, RatioClip clip) {
  const double d = disc.Prob(key);
  return std::clamp(d / (1.0 - d), clip.lower, clip.upper);
}

double augment_reward(double r, const Discriminator& disc, int key,
                      double lambda, RatioClip clip) {
  Require(lambda >= 0.0, ErrorCode::kInvalidArgument, "lambda must be >= 0");
  if (lambda == 0.0) return r;
  return r + lambda * std::log(density_ratio(disc, key, clip));
}

KlIdentityResult kl_identity_check(const TabularMdp& m, const PolicyTable& pi,
                                   const OccupancyVector& zeta, int n_rollouts,
                                   std::uint64_t rng_seed) {
  Require(n_rollouts > 1, ErrorCode::kInvalidArgument,
          "kl_identity_check needs at least two rollouts");
  Require(zeta.size() == m.n_states(), ErrorCode::kStructural,
          "zeta must have one entry per state");
  const OccupancyVector d = occupancy(m, pi);
  const std::vector<double> ds = SmoothDistribution(d.d());
  const std::vector<double> zs = SmoothDistribution(zeta.d());
  std::vector<double> f(m.n_states());
  double f_max = 0.0;
  for (int s = 0; s < m.n_states(); ++s) {
    f[s] = std::log(zs[s]) - std::log(ds[s]);
    Require(std::isfinite(f[s]), ErrorCode::kDomain,
            "kl_identity_check: support mismatch survives smoothing");
    f_max = std::max(f_max, std::abs(f[s]));
  }
  KlIdentityResult out;
  for (int s = 0; s < m.n_states(); ++s) out.direct_kl -= ds[s] * f[s];
  out.direct_kl = std::max(0.0, out.direct_kl);

  const double gamma = m.gamma();
  // Truncate once the discounted tail is below 1e-10.
  int horizon = 1;
  if (f_max > 0.0) {
    horizon = static_cast<int>(
        std::ceil(std::log(1e-10 * (1.0 - gamma) / f_max) / std::log(gamma)));
    horizon = std::max(horizon, 1);
  }
  Rng rng(rng_seed, "kl_identity");
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_rollouts; ++i) {
    int s = rng.Categorical(m.rho0());
    double g = 0.0, disc = 1.0;
    for (int t = 0; t < horizon; ++t) {
      g += disc * f[s];
      disc *= gamma;
      const int a = rng.Categorical(pi.row(s));
      auto succ = m.successors(s, a);
      const double u = rng.Uniform();
      double acc = 0.0;
      int next = succ.back().next_state;
      for (const Successor& e : succ) {
        acc += e.prob;
        if (u < acc) {
          next = e.next_state;
          break;
        }
      }
      s = next;
    }
    sum += g;
    sum_sq += g * g;
  }
  const double n = n_rollouts;
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  out.rollout_estimate = -(1.0 - gamma) * mean;
  out.standard_error = (1.0 - gamma) * std::sqrt(var / n);
  return out;
}

TrainingResult srpo_train(const HipMdpFamily& family, const SrpoConfig& cfg,
                          const LearnerConfig& learner, std::uint64_t rng_seed) {
  return Train(family, cfg, learner, rng_seed, RegularizerKind::kState, cfg.lambda);
}

TrainingResult baseline_train(const HipMdpFamily& family, const SrpoConfig& cfg,
                              const LearnerConfig& learner,
                              std::uint64_t rng_seed) {
  return Train(family, cfg, learner, rng_seed, RegularizerKind::kState, 0.0);
}

TrainingResult behavior_regularized_train(const HipMdpFamily& family,
                                          const SrpoConfig& cfg,
                                          const LearnerConfig& learner,
                                          std::uint64_t rng_seed) {
  return Train(family, cfg, learner, rng_seed, RegularizerKind::kStateAction,
               cfg.lambda);
}

std::string TrainingLogCsv(const std::vector<TrainingLogRow>& log) {
  CsvWriter csv({"epoch", "theta_idx", "mean_return", "disc_loss", "lambda", "rho", "seed"});
  for (const TrainingLogRow& row : log) {
    csv.Row({std::to_string(row.epoch), std::to_string(row.theta_idx),
             FormatDouble(row.mean_return), FormatDouble(row.disc_loss),
             FormatDouble(row.lambda), FormatDouble(row.rho), std::to_string(row.seed)});
  }
  return csv.str();
}

}  // namespace srpo
