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

// Gaussian kernel density estimates on regular grids of at most two axes.

#ifndef SRPOLAB_DENSITY_HPP_
#define SRPOLAB_DENSITY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "srpolab/mdp.hpp"

namespace srpo {

struct GridAxis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  int n_bins = 64;

  // i-th grid node, i in [0, n_bins).
  double node(int i) const;
  bool operator==(const GridAxis&) const = default;
};

inline constexpr int kDefaultBins = 64;
inline constexpr int kMaxAxes = 2;

struct Bandwidth {
  enum class Rule { kScott, kFixed };
  Rule rule = Rule::kScott;
  double value = 0.0;  // used by kFixed and as the zero-variance fallback

  static Bandwidth Scott() { return {}; }
  static Bandwidth Fixed(double h) { return {Rule::kFixed, h}; }
};

struct DensityGrid {
  std::vector<GridAxis> axes;
  std::vector<double> values;  // row-major, first axis slowest
  // Trapezoidal integral of the raw estimate before normalization.
  double normalization = 0.0;
  std::vector<double> bandwidths;
  std::vector<std::string> warnings;

  double at(int i, int j = 0) const;
};

// Trapezoidal integral over the grid.
double TrapezoidIntegral(const DensityGrid& grid);

// points[k] has one coordinate per axis. weights, if given, are
// nonnegative multiplicities. Zero-variance axes under the Scott rule fall
// back to a fixed bandwidth (bandwidth.value if positive, else two grid
// spacings) and record a warning.
DensityGrid kde(const std::vector<std::vector<double>>& points,
                const std::vector<GridAxis>& axes,
                const Bandwidth& bandwidth = Bandwidth::Scott(),
                const std::vector<double>& weights = {});

struct DensityComparison {
  double l1_distance = 0.0;
  double js_divergence = 0.0;  // natural log, in [0, ln 2]
};
DensityComparison compare_densities(const DensityGrid& g1, const DensityGrid& g2);

// Long-format CSV: one column per axis, then "density".
std::string DensityGridCsv(const DensityGrid& grid);

struct MotivatingOptions {
  int n_rollouts = 200;
  int horizon = 30;
  int n_bins = kDefaultBins;
  Bandwidth bandwidth = Bandwidth::Scott();
};

struct PairComparison {
  int member_a;
  int member_b;
  DensityComparison state;
  DensityComparison action;
};

struct MotivatingResult {
  std::vector<DensityGrid> state_grids;   // one per member
  std::vector<DensityGrid> action_grids;  // one per member
  std::vector<PairComparison> comparisons;  // every member pair a < b
};

// Solves each member, rolls out its optimal policy from rho0 and estimates
// state and action densities through the coordinate tables.
MotivatingResult motivating_example(const HipMdpFamily& family,
                                    const MotivatingOptions& options,
                                    std::uint64_t rng_seed);

}  // namespace srpo

#endif  // SRPOLAB_DENSITY_HPP_
