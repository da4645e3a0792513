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

#include "srpolab/density.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "srpolab/csv.hpp"
#include "srpolab/error.hpp"
#include "srpolab/log.hpp"
#include "srpolab/rng.hpp"
#include "srpolab/solvers.hpp"

namespace srpo {
namespace {

double TrapezoidWeight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

double Spacing(const GridAxis& axis) {
  return axis.n_bins > 1 ? (axis.max - axis.min) / (axis.n_bins - 1) : 1.0;
}

void CheckAxes(const std::vector<GridAxis>& axes) {
  Require(!axes.empty() && static_cast<int>(axes.size()) <= kMaxAxes,
          ErrorCode::kInvalidArgument, "density grids have one or two axes");
  for (const GridAxis& axis : axes) {
    Require(axis.n_bins >= 2 && std::isfinite(axis.min) && std::isfinite(axis.max) &&
                axis.max > axis.min,
            ErrorCode::kInvalidArgument,
            "grid axis '" + axis.name + "' needs min < max and at least two bins");
  }
}

// KL(p || (p + q) / 2) with 0 log 0 = 0, written through q / p so that
// denormal masses cannot overflow the ratio.
double KlToMidpoint(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double term = p[i] * std::log(2.0 / (1.0 + q[i] / p[i]));
    if (std::isfinite(term)) acc += term;
  }
  return acc;
}

std::vector<double> Masses(const DensityGrid& g) {
  double total = 0.0;
  for (double v : g.values) total += v;
  Require(total > 0.0, ErrorCode::kNumerical, "density grid has zero mass");
  std::vector<double> p(g.values.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = g.values[i] / total;
  return p;
}

GridAxis PaddedAxis(std::string name, double lo, double hi, int n_bins) {
  double span = hi - lo;
  if (span <= 0.0) span = 1.0;
  return {std::move(name), lo - 0.1 * span, hi + 0.1 * span, n_bins};
}

std::vector<GridAxis> AxesFor(const CoordTable& coords, const std::string& prefix,
                              int n_bins) {
  Require(coords.dim >= 1 && coords.dim <= kMaxAxes, ErrorCode::kDomain,
          prefix + " coordinates must have one or two dimensions for a density grid");
  const int n_items = static_cast<int>(coords.values.size()) / coords.dim;
  std::vector<GridAxis> axes;
  for (int k = 0; k < coords.dim; ++k) {
    double lo = coords.row(0)[k], hi = lo;
    for (int i = 1; i < n_items; ++i) {
      lo = std::min(lo, coords.row(i)[k]);
      hi = std::max(hi, coords.row(i)[k]);
    }
    axes.push_back(PaddedAxis(prefix + std::to_string(k), lo, hi, n_bins));
  }
  return axes;
}

}  // namespace

double GridAxis::node(int i) const {
  if (i == n_bins - 1) return max;
  return min + (max - min) * static_cast<double>(i) / (n_bins - 1);
}

double DensityGrid::at(int i, int j) const {
  if (axes.size() == 1) return values[i];
  return values[static_cast<std::size_t>(i) * axes[1].n_bins + j];
}

double TrapezoidIntegral(const DensityGrid& grid) {
  CheckAxes(grid.axes);
  const GridAxis& a0 = grid.axes[0];
  double acc = 0.0;
  if (grid.axes.size() == 1) {
    for (int i = 0; i < a0.n_bins; ++i) acc += TrapezoidWeight(i, a0.n_bins) * grid.values[i];
    return acc * Spacing(a0);
  }
  const GridAxis& a1 = grid.axes[1];
  for (int i = 0; i < a0.n_bins; ++i) {
    for (int j = 0; j < a1.n_bins; ++j) {
      acc += TrapezoidWeight(i, a0.n_bins) * TrapezoidWeight(j, a1.n_bins) *
             grid.values[static_cast<std::size_t>(i) * a1.n_bins + j];
    }
  }
  return acc * Spacing(a0) * Spacing(a1);
}

DensityGrid kde(const std::vector<std::vector<double>>& points,
                const std::vector<GridAxis>& axes, const Bandwidth& bandwidth,
                const std::vector<double>& weights) {
  CheckAxes(axes);
  const int d = static_cast<int>(axes.size());
  Require(points.size() >= 2, ErrorCode::kInsufficientData,
          "kde needs at least two points");
  Require(weights.empty() || weights.size() == points.size(),
          ErrorCode::kInvalidArgument, "kde: one weight per point is required");
  if (bandwidth.rule == Bandwidth::Rule::kFixed) {
    Require(bandwidth.value > 0.0 && std::isfinite(bandwidth.value),
            ErrorCode::kInvalidArgument, "kde: fixed bandwidth must be positive");
  }

  // Merge duplicates in a sorted map: the result is independent of input
  // order and tabular inputs shrink to their distinct coordinates.
  std::map<std::vector<double>, double> merged;
  for (std::size_t k = 0; k < points.size(); ++k) {
    Require(static_cast<int>(points[k].size()) == d, ErrorCode::kInvalidArgument,
            "kde: point dimension does not match the grid");
    for (double x : points[k]) {
      Require(std::isfinite(x), ErrorCode::kInvalidArgument, "kde: non-finite point");
    }
    const double w = weights.empty() ? 1.0 : weights[k];
    Require(w >= 0.0 && std::isfinite(w), ErrorCode::kInvalidArgument,
            "kde: weights must be nonnegative");
    if (w > 0.0) merged[points[k]] += w;
  }
  double n = 0.0;
  for (const auto& [p, w] : merged) n += w;
  Require(n > 0.0, ErrorCode::kInsufficientData, "kde: all weights are zero");

  DensityGrid grid;
  grid.axes = axes;
  grid.bandwidths.resize(d);
  for (int k = 0; k < d; ++k) {
    if (bandwidth.rule == Bandwidth::Rule::kFixed) {
      grid.bandwidths[k] = bandwidth.value;
      continue;
    }
    double mean = 0.0;
    for (const auto& [p, w] : merged) mean += w * p[k];
    mean /= n;
    double var = 0.0;
    for (const auto& [p, w] : merged) var += w * (p[k] - mean) * (p[k] - mean);
    var = n > 1.0 ? var / (n - 1.0) : 0.0;
    const double sigma = std::sqrt(var);
    if (sigma > 0.0) {
      grid.bandwidths[k] = sigma * std::pow(n, -1.0 / (d + 4));
    } else {
      const double fallback =
          bandwidth.value > 0.0 ? bandwidth.value : 2.0 * Spacing(axes[k]);
      grid.bandwidths[k] = fallback;
      grid.warnings.push_back("axis '" + axes[k].name +
                              "' has zero variance; using fixed bandwidth " +
                              FormatDouble(fallback));
      LogInfo("kde: " + grid.warnings.back());
    }
  }

  const int n0 = axes[0].n_bins;
  const int n1 = d == 2 ? axes[1].n_bins : 1;
  grid.values.assign(static_cast<std::size_t>(n0) * n1, 0.0);
  std::vector<double> k0(n0), k1(n1, 1.0);
  const double norm0 = 1.0 / (grid.bandwidths[0] * std::sqrt(2.0 * std::numbers::pi));
  const double norm1 =
      d == 2 ? 1.0 / (grid.bandwidths[1] * std::sqrt(2.0 * std::numbers::pi)) : 1.0;
  for (const auto& [p, w] : merged) {
    for (int i = 0; i < n0; ++i) {
      const double z = (axes[0].node(i) - p[0]) / grid.bandwidths[0];
      k0[i] = norm0 * std::exp(-0.5 * z * z);
    }
    if (d == 2) {
      for (int j = 0; j < n1; ++j) {
        const double z = (axes[1].node(j) - p[1]) / grid.bandwidths[1];
        k1[j] = norm1 * std::exp(-0.5 * z * z);
      }
    }
    const double scale = w / n;
    for (int i = 0; i < n0; ++i) {
      const double a = scale * k0[i];
      double* row = grid.values.data() + static_cast<std::size_t>(i) * n1;
      for (int j = 0; j < n1; ++j) row[j] += a * k1[j];
    }
  }
  grid.normalization = TrapezoidIntegral(grid);
  Require(grid.normalization > 0.0, ErrorCode::kNumerical,
          "kde: estimate vanishes on the grid");
  for (double& v : grid.values) v /= grid.normalization;
  return grid;
}

DensityComparison compare_densities(const DensityGrid& g1, const DensityGrid& g2) {
  Require(g1.axes == g2.axes, ErrorCode::kStructural,
          "compare_densities: grids have different axes");
  const std::vector<double> p = Masses(g1);
  const std::vector<double> q = Masses(g2);
  DensityComparison out;
  for (std::size_t i = 0; i < p.size(); ++i) out.l1_distance += std::abs(p[i] - q[i]);
  out.js_divergence = std::clamp(0.5 * KlToMidpoint(p, q) + 0.5 * KlToMidpoint(q, p),
                                 0.0, std::numbers::ln2);
  return out;
}

std::string DensityGridCsv(const DensityGrid& grid) {
  std::vector<std::string> header;
  for (const GridAxis& axis : grid.axes) header.push_back(axis.name);
  header.push_back("density");
  CsvWriter csv(header);
  const int n0 = grid.axes[0].n_bins;
  const int n1 = grid.axes.size() == 2 ? grid.axes[1].n_bins : 1;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      std::vector<std::string> row = {FormatDouble(grid.axes[0].node(i))};
      if (grid.axes.size() == 2) row.push_back(FormatDouble(grid.axes[1].node(j)));
      row.push_back(FormatDouble(grid.values[static_cast<std::size_t>(i) * n1 + j]));
      csv.Row(row);
    }
  }
  return csv.str();
}

MotivatingResult motivating_example(const HipMdpFamily& family,
                                    const MotivatingOptions& options,
                                    std::uint64_t rng_seed) {
  Require(family.size() >= 2, ErrorCode::kInvalidArgument,
          "motivating_example needs at least two members");
  const TabularMdp& first = family.member(0);
  Require(first.has_state_coords() && first.has_action_coords(), ErrorCode::kDomain,
          "motivating_example needs state and action coordinates");
  const std::vector<GridAxis> state_axes =
      AxesFor(first.annotations().state_coords, "state", options.n_bins);
  const std::vector<GridAxis> action_axes =
      AxesFor(first.annotations().action_coords, "action", options.n_bins);

  MotivatingResult result;
  for (int i = 0; i < family.size(); ++i) {
    const TabularMdp& m = family.member(i);
    const OptimalSolution opt = solve_optimal(m);
    const auto runs =
        sample_trajectories(m, opt.policy, options.n_rollouts, options.horizon,
                            DeriveSeed(rng_seed, "motivating:" + std::to_string(i)), i);
    // Visit counts per state and per action, mapped through coordinates.
    std::vector<double> state_count(m.n_states(), 0.0), action_count(m.n_actions(), 0.0);
    for (const auto& run : runs) {
      for (const Transition& t : run) {
        state_count[t.s] += 1.0;
        action_count[t.a] += 1.0;
      }
    }
    std::vector<std::vector<double>> sp, ap;
    std::vector<double> sw, aw;
    for (int s = 0; s < m.n_states(); ++s) {
      if (state_count[s] == 0.0) continue;
      auto c = m.state_coord(s);
      sp.emplace_back(c.begin(), c.end());
      sw.push_back(state_count[s]);
    }
    for (int a = 0; a < m.n_actions(); ++a) {
      if (action_count[a] == 0.0) continue;
      auto c = m.action_coord(a);
      ap.emplace_back(c.begin(), c.end());
      aw.push_back(action_count[a]);
    }
    // A single distinct point still carries its multiplicity.
    if (sp.size() == 1) {
      sp.push_back(sp.front());
      sw.back() *= 0.5;
      sw.push_back(sw.back());
    }
    if (ap.size() == 1) {
      ap.push_back(ap.front());
      aw.back() *= 0.5;
      aw.push_back(aw.back());
    }
    result.state_grids.push_back(kde(sp, state_axes, options.bandwidth, sw));
    result.action_grids.push_back(kde(ap, action_axes, options.bandwidth, aw));
  }
  for (int a = 0; a < family.size(); ++a) {
    for (int b = a + 1; b < family.size(); ++b) {
      result.comparisons.push_back(
          {a, b, compare_densities(result.state_grids[a], result.state_grids[b]),
           compare_densities(result.action_grids[a], result.action_grids[b])});
    }
  }
  return result;
}

}  // namespace srpo
