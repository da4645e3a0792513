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

#ifndef SRPOLAB_TRANSITION_HPP_
#define SRPOLAB_TRANSITION_HPP_

#include <optional>
#include <vector>

namespace srpo {

struct Transition {
  int s = 0;
  int a = 0;
  double r = 0.0;
  int s_next = 0;
  int theta_idx = 0;
  // s_next is terminal (absorbing with zero reward).
  bool done = false;
  // Cached value estimate used by value-mode partitioning.
  std::optional<double> value_score;

  bool operator==(const Transition&) const = default;
};

using Trajectory = std::vector<Transition>;

}  // namespace srpo

#endif  // SRPOLAB_TRANSITION_HPP_
