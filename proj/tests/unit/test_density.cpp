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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "srpolab/density.hpp"
#include "srpolab/envs.hpp"
#include "srpolab/error.hpp"

namespace srpo {
namespace {

double NormalPdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

std::vector<std::vector<double>> NormalSample(int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<std::vector<double>> pts(n);
  for (auto& p : pts) p = {z(gen)};
  return pts;
}

TEST_CASE("kde peaks at the origin for symmetric points") {
  const std::vector<std::vector<double>> pts = {{-1.0, 0.0}, {1.0, 0.0}, {0.0, -1.0},
                                                {0.0, 1.0},  {0.0, 0.0}, {0.0, 0.0}};
  const std::vector<GridAxis> axes = {{"x", -3.0, 3.0, 61}, {"y", -3.0, 3.0, 61}};
  const DensityGrid g = kde(pts, axes);
  const auto it = std::max_element(g.values.begin(), g.values.end());
  const int idx = static_cast<int>(it - g.values.begin());
  CHECK(idx / 61 == 30);
  CHECK(idx % 61 == 30);
  for (int i = 0; i < 61; ++i) {
    for (int j = 0; j < 61; ++j) {
      CHECK(std::abs(g.at(i, j) - g.at(60 - i, j)) <= 1e-10);
      CHECK(std::abs(g.at(i, j) - g.at(j, i)) <= 1e-10);
    }
  }
}

TEST_CASE("kde of a standard normal sample is close in L1") {
  const auto pts = NormalSample(10000, 1);
  const GridAxis axis{"x", -6.0, 6.0, 241};
  const DensityGrid g = kde(pts, {axis});
  const double h = (axis.max - axis.min) / (axis.n_bins - 1);
  double l1 = 0.0;
  for (int i = 0; i < axis.n_bins; ++i) {
    const double w = (i == 0 || i == axis.n_bins - 1) ? 0.5 : 1.0;
    l1 += w * h * std::abs(g.at(i) - NormalPdf(axis.node(i)));
  }
  CHECK(l1 <= 0.05);
  CHECK(TrapezoidIntegral(g) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.normalization == doctest::Approx(1.0).epsilon(0.02));
  // Scott's rule with the sample standard deviation.
  double mean = 0.0, var = 0.0;
  for (const auto& p : pts) mean += p[0];
  mean /= pts.size();
  for (const auto& p : pts) var += (p[0] - mean) * (p[0] - mean);
  var /= pts.size() - 1;
  CHECK(g.bandwidths[0] == doctest::Approx(std::sqrt(var) * std::pow(10000.0, -0.2)));
}

TEST_CASE("kde ignores point order and honours weights") {
  auto pts = NormalSample(500, 2);
  const std::vector<GridAxis> axes = {{"x", -4.0, 4.0, 64}};
  const DensityGrid a = kde(pts, axes);
  std::mt19937_64 gen(5);
  std::shuffle(pts.begin(), pts.end(), gen);
  const DensityGrid b = kde(pts, axes);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-12 * std::max(1.0, a.values[i]));
  }
  const std::vector<std::vector<double>> dup = {{0.0}, {0.0}, {0.0}, {1.0}};
  const std::vector<std::vector<double>> weighted = {{0.0}, {1.0}};
  const DensityGrid c = kde(dup, axes, Bandwidth::Fixed(0.3));
  const DensityGrid d = kde(weighted, axes, Bandwidth::Fixed(0.3), {3.0, 1.0});
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    CHECK(c.values[i] == doctest::Approx(d.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("kde falls back on zero variance and rejects bad input") {
  const std::vector<GridAxis> axes = {{"x", -1.0, 1.0, 21}};
  const DensityGrid g = kde({{0.0}, {0.0}}, axes);
  CHECK(g.bandwidths[0] == doctest::Approx(0.2));
  CHECK(g.warnings.size() == 1u);
  CHECK_THROWS_AS(kde({{0.0}}, axes), Error);
  CHECK_THROWS_AS(kde({{0.0}, {1.0}}, {{"x", 1.0, 1.0, 21}}), Error);
  CHECK_THROWS_AS(kde({{0.0}, {1.0}}, axes, Bandwidth::Fixed(-1.0)), Error);
  CHECK_THROWS_AS(kde({{0.0}, {1.0}}, axes, Bandwidth::Scott(), {1.0, -1.0}), Error);
  CHECK_THROWS_AS(kde({{0.0, 1.0}, {1.0, 0.0}}, axes), Error);
}

TEST_CASE("compare densities on identical, disjoint and overlapping grids") {
  const std::vector<GridAxis> axes = {{"x", -10.0, 10.0, 201}};
  const DensityGrid left = kde({{-8.0}, {-8.0}}, axes, Bandwidth::Fixed(0.1));
  const DensityGrid right = kde({{8.0}, {8.0}}, axes, Bandwidth::Fixed(0.1));
  const DensityComparison same = compare_densities(left, left);
  CHECK(same.l1_distance == 0.0);
  CHECK(same.js_divergence == 0.0);
  const DensityComparison apart = compare_densities(left, right);
  CHECK(apart.l1_distance == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(apart.js_divergence == doctest::Approx(std::numbers::ln2).epsilon(1e-9));
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityGrid a = kde({{u(gen)}, {u(gen)}, {u(gen)}}, axes);
    const DensityGrid b = kde({{u(gen)}, {u(gen)}, {u(gen)}}, axes);
    const DensityComparison c = compare_densities(a, b);
    CHECK(c.js_divergence >= 0.0);
    CHECK(c.js_divergence <= std::numbers::ln2);
    CHECK(c.l1_distance <= 2.0 + 1e-12);
    CHECK(compare_densities(b, a).js_divergence == doctest::Approx(c.js_divergence));
  }
  CHECK_THROWS_AS(compare_densities(left, kde({{0.0}, {1.0}}, {{"x", -1.0, 1.0, 5}})),
                  Error);
}

TEST_CASE("density csv has one row per node") {
  const DensityGrid g = kde({{0.0, 0.0}, {1.0, 1.0}}, {{"a", 0.0, 1.0, 3}, {"b", 0.0, 1.0, 4}});
  const std::string csv = DensityGridCsv(g);
  CHECK(csv.rfind("a,b,density\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}

TEST_CASE("motivating example on identical members reports no difference") {
  EnvSpec spec;
  spec.kind = EnvKind::kPendulum;
  spec.angle_bins = 9;
  spec.velocity_bins = 9;
  spec.dynamics_params = {1.0, 1.0};
  spec.start_spread = 0;
  const HipMdpFamily fam = make_pendulum_family(spec);
  MotivatingOptions opt;
  opt.n_rollouts = 50;
  const MotivatingResult r = motivating_example(fam, opt, 3);
  REQUIRE(r.comparisons.size() == 1u);
  CHECK(r.comparisons[0].state.l1_distance <= 1e-12);
  CHECK(r.comparisons[0].action.l1_distance <= 1e-12);
}

TEST_CASE("motivating example is deterministic and separates the mirrored gridworld") {
  EnvSpec spec;
  spec.kind = EnvKind::kMirroredGridworld;
  MotivatingOptions opt;
  opt.n_rollouts = 50;
  const HipMdpFamily fam = make_family(spec);
  const MotivatingResult a = motivating_example(fam, opt, 7);
  const MotivatingResult b = motivating_example(fam, opt, 7);
  REQUIRE(a.comparisons.size() == 1u);
  CHECK(a.comparisons[0].state.js_divergence == b.comparisons[0].state.js_divergence);
  CHECK(a.state_grids[0].values == b.state_grids[0].values);
  CHECK(a.comparisons[0].action.l1_distance > a.comparisons[0].state.l1_distance);
}

}  // namespace
}  // namespace srpo
